from itertools import product

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import crandn, random_normal, random_unitary
from opalg import gnsrep, linops, staralg, vonneumann
from opalg.errors import NotCommutative, NotCyclic, ZeroRepresentation, ZeroVector
from opalg.vonneumann import OperatorSet

rngs = st.integers(0, 2**32 - 1).map(np.random.default_rng)
SX = np.array([[0.0, 1.0], [1.0, 0.0]])


def matrix_units(n):
    return [np.outer(np.eye(n)[i], np.eye(n)[j]) for i in range(n) for j in range(n)]


def diag_units(n):
    return [np.diag(np.eye(n)[i]) for i in range(n)]


def block_algebra(rng, blocks):
    """Generators of a unitarily rotated sum of M_{d} (x) 1_{m} blocks.

    The commutant oracle is sum m^2 and the algebra itself has sum d^2.
    """
    n = sum(d * m for d, m in blocks)
    q = random_unitary(rng, n)
    gens, start = [], 0
    for d, m in blocks:
        for u in matrix_units(d):
            big = np.zeros((n, n), dtype=complex)
            big[start : start + d * m, start : start + d * m] = np.kron(u, np.eye(m))
            gens.append(q @ big @ q.conj().T)
        start += d * m
    return gens


BLOCKS = [[(2, 1)], [(1, 2)], [(2, 1), (1, 1)], [(1, 1), (1, 1), (1, 1)], [(2, 2)], [(1, 3), (1, 1)]]


def test_commutant_examples():
    assert len(vonneumann.commutant([np.eye(2)])) == 4
    assert len(vonneumann.commutant(matrix_units(3))) == 1
    C = vonneumann.commutant(diag_units(3))
    assert len(C) == 3
    for c in C.mats:
        assert np.allclose(c, np.diag(np.diag(c)), atol=1e-12)


def test_commutant_of_empty_set_is_everything():
    assert len(vonneumann.commutant(vonneumann.empty_set(3))) == 9
    assert len(vonneumann.bicommutant(vonneumann.empty_set(3))) == 1


def test_bicommutant_of_sigma_x():
    B = vonneumann.bicommutant([SX])
    assert vonneumann.same_span(B, [np.eye(2), SX])


def test_commutant_basis_is_trace_orthonormal():
    C = vonneumann.commutant(diag_units(4))
    gram = np.einsum("kij,lij->kl", C.mats.conj(), C.mats)
    assert np.allclose(gram, np.eye(len(C)), atol=1e-12)


@pytest.mark.parametrize("blocks", BLOCKS)
def test_commutant_dimension_oracle(blocks):
    rng = np.random.default_rng(sum(d * m for d, m in blocks))
    gens = block_algebra(rng, blocks)
    C = vonneumann.commutant(gens)
    assert len(C) == sum(m * m for _, m in blocks)
    assert vonneumann.is_algebra(C)
    B = vonneumann.commutant(C)
    assert len(B) == sum(d * d for d, _ in blocks)
    # double commutant theorem: A'' = span(A) for a unital *-subalgebra
    assert vonneumann.same_span(B, gens)


@settings(max_examples=15, deadline=None)
@given(rngs)
def test_third_commutant_is_first(rng):
    gens = [crandn(rng, 3, 3)] if rng.uniform() < 0.5 else [random_normal(rng, 4)]
    C1 = vonneumann.commutant(OperatorSet(gens[0].shape[0], gens, star_closed=True))
    C3 = vonneumann.commutant(vonneumann.commutant(C1))
    assert vonneumann.same_span(C1, C3)


@settings(max_examples=15, deadline=None)
@given(rngs)
def test_w_star_of_normal_set_is_commutative(rng):
    q = random_unitary(rng, 4)
    normals = [(q * crandn(rng, 4)) @ q.conj().T for _ in range(2)]
    W = vonneumann.bicommutant(OperatorSet(4, normals, star_closed=True))
    assert vonneumann.commutes_pairwise(W.mats, 1e-8) is None


@settings(max_examples=15, deadline=None)
@given(rngs)
def test_w_star_of_normal_is_bicommutant(rng):
    vals = crandn(rng, 4)
    vals[3] = vals[0]
    b = random_normal(rng, 4, vals)
    W = vonneumann.generated_algebra([b])
    assert len(W) == 3
    assert vonneumann.same_span(W, vonneumann.bicommutant(OperatorSet(4, [b], star_closed=True)))


def test_invariant_subspace_criterion():
    rng = np.random.default_rng(5)
    rep = [scipy.linalg.block_diag(crandn(rng, 2, 2), crandn(rng, 1, 1), crandn(rng, 1, 1)) for _ in range(3)]
    S = OperatorSet(4, rep, star_closed=True)
    C = vonneumann.commutant(S)
    for bits in product([0, 1], repeat=4):
        p = np.diag(np.array(bits, dtype=float))
        invariant = all(
            linops.op_norm((np.eye(4) - p) @ a @ p) <= 1e-12 for a in list(rep) + [a.conj().T for a in rep]
        )
        assert vonneumann.in_span(C, p) == invariant


def test_irreducibility_examples():
    assert vonneumann.irreducibility_report(matrix_units(3))["irreducible"]
    rep = vonneumann.irreducibility_report(diag_units(2))
    assert rep == {"irreducible": False, "commutant_dim": 2, "multiplicity_free": True}
    amp = [np.kron(np.eye(2), u) for u in matrix_units(2)]
    rep = vonneumann.irreducibility_report(amp)
    assert rep["commutant_dim"] == 4 and not rep["multiplicity_free"]


def test_irreducibility_on_gns_rep():
    A = staralg.matrix_algebra(3)
    g = gnsrep.gns_construct(A, gnsrep.vector_state(A, [0.0, 1.0, 0.0]))
    assert vonneumann.irreducibility_report(g.rep)["irreducible"]


def test_zero_representation():
    with pytest.raises(ZeroRepresentation):
        vonneumann.irreducibility_report([np.zeros((2, 2))])


def test_vector_report_examples():
    d2 = diag_units(2)
    r = vonneumann.vector_report(d2, np.array([1.0, 1.0]) / np.sqrt(2))
    assert r["cyclic"] and r["separating"]
    r = vonneumann.vector_report(d2, [1.0, 0.0])
    assert not r["cyclic"] and not r["separating"]
    with pytest.raises(ZeroVector):
        vonneumann.vector_report(d2, [0.0, 0.0])


@settings(max_examples=15, deadline=None)
@given(rngs, st.sampled_from(BLOCKS))
def test_cyclic_iff_separating_for_commutant(rng, blocks):
    gens = block_algebra(rng, blocks)
    A = vonneumann.generated_algebra(gens)
    C = vonneumann.commutant(gens)
    n = A.carrier_dim
    x = crandn(rng, n) if rng.uniform() < 0.7 else np.eye(n)[0]
    assert vonneumann.vector_report(A, x)["cyclic"] == vonneumann.vector_report(C, x)["separating"]


@settings(max_examples=15, deadline=None)
@given(rngs)
def test_commutative_sets_have_separating_vectors(rng):
    b = random_normal(rng, 4, np.array([1.0, 1.0, 2.0, 3.0]))
    W = vonneumann.generated_algebra([b])
    x, margin = vonneumann.find_separating_vector(W, seed=int(rng.integers(1000)))
    assert margin > 1e-9
    assert vonneumann.vector_report(W, x)["separating"]


def test_diagonalise_examples():
    d2 = diag_units(2)
    res = vonneumann.diagonalise_cyclic(d2, np.array([1.0, 1.0]) / np.sqrt(2))
    assert np.allclose(res.weights, [0.5, 0.5])
    assert np.allclose(np.abs(res.unitary), np.eye(2))
    res = vonneumann.diagonalise_cyclic(d2, [np.sqrt(0.2), np.sqrt(0.8)])
    assert np.allclose(res.weights, [0.2, 0.8])
    assert res.intertwining_residual <= 1e-9


def test_diagonalise_errors():
    with pytest.raises(NotCyclic):
        vonneumann.diagonalise_cyclic(diag_units(2), [1.0, 0.0])
    with pytest.raises(NotCommutative):
        vonneumann.diagonalise_cyclic(matrix_units(2), [1.0, 1.0])
    with pytest.raises(ZeroVector):
        vonneumann.diagonalise_cyclic(diag_units(2), [0.0, 0.0])


@settings(max_examples=20, deadline=None)
@given(rngs)
def test_diagonalisation_properties(rng):
    q = random_unitary(rng, 4)
    gens = [(q * crandn(rng, 4)) @ q.conj().T for _ in range(2)]
    c = crandn(rng, 4)
    c /= np.linalg.norm(c)
    res = vonneumann.diagonalise_cyclic(gens, c)
    U = res.unitary
    assert linops.op_norm(U.conj().T @ U - np.eye(4)) <= 1e-9
    assert res.intertwining_residual <= 1e-9
    assert res.weights.sum() == pytest.approx(1.0)
    # mu_i = |<c, q_i>|^2 against the known joint eigenbasis
    oracle = np.sort(np.abs(q.conj().T @ c) ** 2)
    assert np.allclose(np.sort(res.weights), oracle, atol=1e-9)
    # cyclic commutative reps are multiplicity free and maximal commutative
    W = vonneumann.generated_algebra(gens)
    C = vonneumann.commutant(OperatorSet(4, gens, star_closed=True))
    assert vonneumann.irreducibility_report(gens)["multiplicity_free"]
    assert vonneumann.same_span(W, C)


def test_span_helpers():
    assert vonneumann.span_angle([np.eye(2)], [np.eye(2), SX]) == pytest.approx(np.pi / 2)
    assert vonneumann.in_span([np.eye(2), SX], np.eye(2) + 3 * SX)
    assert not vonneumann.in_span([np.eye(2)], SX)
    assert vonneumann.commutes_pairwise([SX, np.eye(2)]) is None
    assert vonneumann.commutes_pairwise([SX, np.diag([1.0, -1.0])]) == (0, 1)
