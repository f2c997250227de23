import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opalg import unbounded as ub
from opalg.errors import InvalidInput, SupportExceedsTruncation
from opalg.unbounded import AffineSymbol, DiagonalOperator, Power, PowerSymbol, PowerWeights, SeqVector, TableSymbol

LINEAR = DiagonalOperator(PowerSymbol(1.0))
finite_vectors = st.lists(
    st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False), min_size=1, max_size=30
).map(lambda v: SeqVector(entries=v))


def test_symbols():
    n = np.arange(1, 5)
    assert np.allclose(PowerSymbol(2.0, 0.5)(n), 0.5 * n**2)
    assert np.allclose(AffineSymbol(2.0, -1.0)(n), 2 * n - 1)
    assert np.allclose(TableSymbol((3.0, 1.0))(n), [3, 1, 1, 1])
    assert PowerSymbol(0.5, 0.0).exponent == 0.0 and AffineSymbol(0.0, 2.0).exponent == 0.0
    with pytest.raises(InvalidInput):
        TableSymbol(())


def test_complex_symbol_rejected():
    with pytest.raises(InvalidInput):
        DiagonalOperator(lambda n: 1j * n)


@pytest.mark.parametrize("r", [0.0, 0.5, 2.0])
@pytest.mark.parametrize("N", [1, 10, 4096])
def test_normalized_weights_sum_to_one(r, N):
    a = DiagonalOperator(PowerSymbol(), PowerWeights(r))
    w = a.normalized_weights(N)
    assert abs(w.sum() - 1) <= 1e-12 and np.all(w > 0)


def test_seq_vector_forms():
    assert SeqVector.basis(3).support_size == 3
    assert SeqVector(entries=[1, 2, 0, 0]).support_size == 2
    assert np.allclose(SeqVector.power_law(2.0).values(3), [1, 0.25, 1 / 9])
    with pytest.raises(InvalidInput):
        SeqVector()
    with pytest.raises(InvalidInput):
        SeqVector(entries=[1.0], s=1.0)


def test_domain_examples():
    assert ub.domain_membership(LINEAR, SeqVector.basis(7))["member"]
    out = ub.domain_membership(LINEAR, SeqVector.power_law(1.0))
    assert not out["member"] and out["certificate"]["exponent"] == pytest.approx(0.0)
    out = ub.domain_membership(LINEAR, SeqVector.power_law(2.0))
    assert out["member"] and not out["certificate"]["heuristic"]


@pytest.mark.parametrize("s", [0.75, 1.0, 1.5, 2.0, 3.0])
@pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
def test_power_family_certificate_matches_p_series(s, t):
    a = DiagonalOperator(PowerSymbol(t))
    member = ub.domain_membership(a, SeqVector.power_law(s))["member"]
    # sum n^(2t - 2s) < oo iff 2(s - t) > 1
    assert member == (2 * (s - t) > 1)


def test_vector_outside_the_space():
    out = ub.domain_membership(DiagonalOperator(PowerSymbol(0.0)), SeqVector.power_law(0.25))
    assert not out["member"] and not out["certificate"]["in_space"]


def test_heuristic_fallback_is_flagged():
    a = DiagonalOperator(lambda n: np.log(np.asarray(n, dtype=float)))
    conv = ub.domain_membership(a, SeqVector.power_law(2.0))
    assert conv["member"] and conv["certificate"]["heuristic"]
    div = ub.domain_membership(a, SeqVector.power_law(0.5))
    assert not div["member"] and div["certificate"]["heuristic"]


@pytest.mark.parametrize("p, q", [(1.0, 2.0), (0.5, 1.0), (2.0, 2.0)])
def test_addition_domain_is_domain_of_sum(p, q):
    # D(Psi(f) + Psi(g)) = D(f) & D(g) = D_{|f| + |g|}, and |f| + |g| ~ n^(t max(p, q))
    a = DiagonalOperator(PowerSymbol(1.0))
    for s in np.arange(0.75, 4.0, 0.25):
        x = SeqVector.power_law(s)
        both = ub.domain_membership(a, x, Power(p))["member"] and ub.domain_membership(a, x, Power(q))["member"]
        assert both == ub.domain_membership(a, x, Power(max(p, q)))["member"]


def test_apply_examples():
    x = SeqVector(entries=[1.0, 2.0, 3.0])
    assert np.allclose(ub.apply_function(LINEAR, lambda g: np.ones_like(g), x).entries, x.entries)
    assert np.allclose(ub.apply_function(LINEAR, lambda g: g, SeqVector.basis(3)).entries, [0, 0, 3])


def test_support_exceeds_truncation():
    a = DiagonalOperator(PowerSymbol(), truncation=4)
    with pytest.raises(SupportExceedsTruncation) as info:
        ub.apply_function(a, lambda g: g, SeqVector.basis(5))
    assert info.value.payload == {"support": 5, "truncation": 4}
    with pytest.raises(InvalidInput):
        ub.apply_function(a, lambda g: g, SeqVector.power_law(2.0))


@settings(max_examples=50, deadline=None)
@given(finite_vectors, st.floats(0, 2))
def test_functional_calculus_identities(x, r):
    a = DiagonalOperator(PowerSymbol(1.5), PowerWeights(r))
    f = lambda g: np.exp(1j * g) * (1 + g)  # noqa: E731
    h = lambda g: 1 / (1 + g**2)  # noqa: E731
    fx = ub.apply_function(a, f, x)
    # norm identity against the scalar measure
    n = np.arange(1, x.support_size + 1)
    w = a.weights(n)
    expected = np.sqrt(np.sum(np.abs(f(a.symbol(n))) ** 2 * np.abs(x.entries) ** 2 * w))
    assert ub.norm(a, fx) == pytest.approx(expected, rel=1e-12, abs=1e-300)
    # multiplication theorem and Psi(f)* Psi(f) = Psi(|f|^2)
    lhs = ub.apply_function(a, f, ub.apply_function(a, h, x)).entries
    rhs = ub.apply_function(a, lambda g: f(g) * h(g), x).entries
    assert np.allclose(lhs, rhs, rtol=1e-13, atol=0)
    ff = ub.apply_function(a, lambda g: np.conj(f(g)), fx).entries
    assert np.allclose(ff, ub.apply_function(a, lambda g: np.abs(f(g)) ** 2, x).entries, rtol=1e-12, atol=0)


def test_adjoint_is_conjugate_function():
    a = DiagonalOperator(PowerSymbol(1.0), truncation=50)
    f = lambda g: np.exp(2j * g) + g  # noqa: E731
    M = ub.truncated_matrix(a, f)
    Mc = ub.truncated_matrix(a, lambda g: np.conj(f(g)))
    assert np.array_equal(M.conj().T, Mc)


def test_cayley_examples():
    zero = ub.cayley_pair(DiagonalOperator(PowerSymbol(1.0, 0.0), truncation=8))
    assert np.allclose(zero.u, -1)
    lin = ub.cayley_pair(DiagonalOperator(PowerSymbol(1.0), truncation=10_000))
    assert lin.modulus_defect <= 1e-15
    assert lin.roundtrip_residual <= 1e-12
    assert lin.distance_from_one > 0


def test_cayley_of_unbounded_symbol_tends_to_one():
    c = ub.cayley_pair(DiagonalOperator(PowerSymbol(2.0), truncation=1000))
    dist = np.abs(1 - c.u)
    assert np.all(np.diff(dist) < 0) and dist[-1] < 1e-5
    bounded = ub.cayley_pair(DiagonalOperator(TableSymbol((1.0, -3.0, 2.0)), truncation=1000))
    assert bounded.distance_from_one >= 2 / np.sqrt(10) - 1e-12


def test_spectrum_points_are_real_atoms():
    a = DiagonalOperator(TableSymbol((2.0, -1.0, 2.0, 5.0)), truncation=10)
    assert np.allclose(a.spectrum_points(), [-1, 2, 5])


def test_evolve_examples():
    x = SeqVector(entries=[1.0, 1j, -2.0])
    assert np.allclose(ub.evolve(LINEAR, 0.0, x).entries, x.entries)
    out = ub.evolve(LINEAR, np.pi, SeqVector.basis(1))
    assert np.allclose(out.entries, [-1])


@settings(max_examples=50, deadline=None)
@given(finite_vectors, st.floats(-50, 50), st.floats(-50, 50))
def test_unitary_group(x, t, s):
    a = DiagonalOperator(AffineSymbol(0.7, -3.0), PowerWeights(1.0))
    assert ub.norm(a, ub.evolve(a, t, x)) == pytest.approx(ub.norm(a, x), rel=1e-12, abs=1e-300)
    assert ub.group_law_residual(a, t, s, x) <= 1e-12 * max(1.0, ub.norm(a, x)) * (1 + abs(t) + abs(s))


def test_generator_examples():
    assert ub.generator_check(LINEAR, SeqVector(entries=[0.0]), 1e-3).residual == 0.0
    hs = [1e-2, 1e-3, 1e-4]
    res = [ub.generator_check(LINEAR, SeqVector.basis(2), h).residual for h in hs]
    for big, small in zip(res, res[1:]):
        assert big / small == pytest.approx(10, rel=0.05)
    assert ub.loglog_slope(hs, res) == pytest.approx(1.0, abs=0.01)
    # the Taylor constant |g|^2/2 for g = 2
    assert ub.generator_check(LINEAR, SeqVector.basis(2), 1e-6).constant == pytest.approx(2.0, rel=1e-4)


def test_generator_rejects_bad_step():
    with pytest.raises(InvalidInput):
        ub.generator_check(LINEAR, SeqVector.basis(1), 0.0)
