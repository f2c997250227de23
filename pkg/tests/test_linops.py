import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from helpers import crandn, random_normal
from opalg import linops
from opalg.errors import InvalidShape

finite = st.floats(-1, 1, allow_nan=False, allow_infinity=False)


def small_matrices(max_n=8):
    return st.integers(1, max_n).flatmap(
        lambda n: st.tuples(arrays(float, (n, n), elements=finite), arrays(float, (n, n), elements=finite))
    ).map(lambda pair: pair[0] + 1j * pair[1])


@pytest.mark.parametrize(
    "m, expected",
    [
        (np.eye(3), 1.0),
        (np.diag([1.0, 2.0]), 2.0),
        (np.array([[0, 1], [0, 0]]), 1.0),
    ],
)
def test_op_norm_examples(m, expected):
    assert linops.op_norm(m) == pytest.approx(expected, abs=1e-15)


def test_op_norm_rejects_empty():
    with pytest.raises(InvalidShape):
        linops.op_norm(np.zeros((0, 0)))


@settings(max_examples=60, deadline=None)
@given(small_matrices())
def test_cstar_identity(m):
    n = linops.op_norm(m)
    assert abs(n**2 - linops.op_norm(m.conj().T @ m)) <= 1e-9 * max(n**2, 1e-300)


@settings(max_examples=60, deadline=None)
@given(small_matrices())
def test_adjoint_is_involution(m):
    assert np.array_equal(linops.adjoint(linops.adjoint(m)), m)


@settings(max_examples=60, deadline=None)
@given(small_matrices())
def test_norm_dominates_eigenvalues(m):
    assert np.abs(np.linalg.eigvals(m)).max() <= linops.op_norm(m) * (1 + 1e-12) + 1e-15


@pytest.mark.parametrize(
    "m, expected",
    [
        (np.diag([1, 1j]), [1j, 1]),
        (np.array([[0, 1], [1, 0]]), [-1, 1]),
        (np.array([[2, 1], [1, 2]]), [1, 3]),
    ],
)
def test_eig_examples(m, expected):
    vals = linops.eig(m).values
    # ordered lexicographically by (re, im)
    assert np.allclose(vals, expected, atol=1e-12)


def test_eig_rejects_non_square():
    with pytest.raises(InvalidShape):
        linops.eig(np.zeros((2, 3)))


def test_eig_normal_reconstruction():
    rng = np.random.default_rng(0)
    for n in range(1, 9):
        m = random_normal(rng, n)
        dec = linops.eig(m)
        assert dec.normal
        v = dec.vectors
        assert linops.op_norm(v.conj().T @ v - np.eye(n)) <= 1e-10
        assert linops.op_norm((v * dec.values) @ v.conj().T - m) <= 1e-8 * linops.op_norm(m)
        assert dec.residual <= 1e-8


def test_eig_residual_non_normal():
    rng = np.random.default_rng(1)
    m = crandn(rng, 6, 6)
    dec = linops.eig(m)
    for lam, v in zip(dec.values, dec.vectors.T):
        assert np.linalg.norm(m @ v - lam * v) <= dec.residual * linops.op_norm(m) + 1e-15
    assert dec.residual <= 1e-10


def test_eig_order_is_deterministic():
    rng = np.random.default_rng(2)
    m = random_normal(rng, 5)
    a, b = linops.eig(m).values, linops.eig(m.copy()).values
    assert np.array_equal(a, b)
    keys = [(round(z.real, 9), round(z.imag, 9)) for z in a]
    assert keys == sorted(keys)


@pytest.mark.parametrize(
    "m, dim",
    [(np.eye(2), 0), (np.zeros((2, 2)), 2), (np.array([[1, 0], [0, 0]]), 1)],
)
def test_nullspace_examples(m, dim):
    ns = linops.nullspace(m)
    assert ns.shape == (2, dim)
    if dim:
        assert np.allclose(ns.conj().T @ ns, np.eye(dim))
        assert np.allclose(m @ ns, 0)


def test_nullspace_of_rank_one():
    ns = linops.nullspace(np.array([[1, 0], [0, 0]]))
    assert abs(abs(ns[1, 0]) - 1) < 1e-15


def test_nullspace_floor_ignores_noise():
    noise = 1e-17 * np.ones((4, 4))
    assert linops.nullspace(noise).shape[1] == 3  # relative threshold sees rank 1
    assert linops.nullspace(noise, floor=1.0).shape[1] == 4


def test_cluster_values_single_linkage():
    vals = np.array([0.0, 1e-9, 2e-9, 1.0, 1.0 + 5e-10])
    clusters = linops.cluster_values(vals, 1.5e-9)
    assert [sorted(c.tolist()) for c in clusters] == [[0, 1, 2], [3, 4]]


def test_subspace_angle():
    a = np.eye(3)[:, :2]
    assert linops.subspace_angle(a, a[:, ::-1]) < 1e-15
    assert linops.subspace_angle(a[:, :1], np.eye(3)[:, 1:2]) == pytest.approx(np.pi / 2)
