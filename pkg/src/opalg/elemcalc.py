"""Square roots, absolute values, polar and Jordan decompositions, and
the bounded Cayley transform.

Two square-root routes are kept on purpose.  :func:`sqrt_series` sums
the binomial series of ``sqrt(1 + x)`` directly in the algebra; the
eigen-route :func:`positive_sqrt` is the reference it is checked against.
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.special import binom

from . import linops
from .errors import MuTooSmall, NotHermitian, NotInvertible, NotPositive, SpectralRadiusTooLarge
from .linops import DEFAULT_TOL
from .specanalysis import positive_test, spectral_radius


def sqrt_poly(n):
    """Exact coefficients (ascending degree) of the n-th polynomial of the
    iteration ``p_0 = 0``, ``p_{k+1} = p_k + (x - p_k^2) / 2``.

    The degree doubles each step (``deg p_n = 2^(n-1)``), so only small
    ``n`` are practical; use :func:`sqrt_poly_eval` to evaluate.
    """
    p = [Fraction(0)]
    for _ in range(n):
        sq = [Fraction(0)] * (2 * len(p) - 1)
        for i, a in enumerate(p):
            if a == 0:
                continue
            for j, b in enumerate(p):
                sq[i + j] += a * b
        new = [Fraction(0)] * max(len(p), len(sq), 2)
        for i, a in enumerate(p):
            new[i] += a
        new[1] += Fraction(1, 2)
        for i, a in enumerate(sq):
            new[i] -= a / 2
        while len(new) > 1 and new[-1] == 0:
            new.pop()
        p = new
    return p


def sqrt_poly_eval(t, n):
    """``p_n(t)`` by running the recursion on the value (vectorised in t)."""
    t = np.asarray(t, dtype=float)
    p = np.zeros_like(t)
    for _ in range(n):
        p = p + 0.5 * (t - p * p)
    return p


def sqrt_poly_gap(t, n):
    """``sqrt(t) - p_n(t)`` on ``[0, 1]`` via the error recursion
    ``d_{k+1} = d_k (1 - sqrt t + d_k / 2)``, ``d_0 = sqrt t``.

    Every factor is non-negative, so the sign of the gap is exact in
    floating point and its relative accuracy stays near machine epsilon,
    unlike ``sqrt(t) - sqrt_poly_eval(t, n)`` which cancels once ``p_n``
    is within an ulp of ``sqrt t``.
    """
    s = np.sqrt(np.asarray(t, dtype=float))
    d = s.copy()
    for _ in range(n):
        d = d * ((1.0 - s) + 0.5 * d)
    return d


def sqrt_poly_scaled_eval(t, n, k):
    """``q_n(t) = 2^k p_n(t / 4^k)``, approximating sqrt on ``[0, 4^k]``."""
    return 2.0**k * sqrt_poly_eval(np.asarray(t, dtype=float) / 4.0**k, n)


@dataclass(frozen=True)
class SeriesRoot:
    b: np.ndarray
    terms: int
    residual: float
    tail_bound: float


def _sqrt_series_coeffs(count):
    return np.array([binom(0.5, k) for k in range(count + 1)])


def sqrt_series(a, terms=None, tol=DEFAULT_TOL, max_terms=20000):
    """``b = sum_{n>=1} binom(1/2, n) a^n`` so that ``(1 + b)^2 = 1 + a``.

    Needs ``r_lambda(a) < 1``.  With ``terms=None`` the sum runs until a
    term drops below ``1e-17 (1 + |b|)``.  ``tail_bound`` bounds the norm
    of ``(1 + b)^2 - (1 + a)``: squaring the degree-K partial sum leaves
    exactly the terms of degree K+1..2K, whose coefficients are known.
    """
    a = linops.as_cmat(a, square=True)
    n = a.shape[0]
    r = spectral_radius(a, tol=tol).eig_max
    if r >= 1 - tol:
        raise SpectralRadiusTooLarge(f"r_lambda(a) = {r:.6g} >= 1", spectral_radius=r)
    cap = max_terms if terms is None else int(terms)
    c = _sqrt_series_coeffs(cap)
    powers = [linops.identity(n)]
    b = np.zeros_like(a)
    small = 0
    k = 0
    for k in range(1, cap + 1):
        powers.append(powers[-1] @ a)
        term = c[k] * powers[k]
        b = b + term
        if terms is None:
            if linops.op_norm(term) <= 1e-17 * (1 + linops.op_norm(b)):
                small += 1
                if small >= 3:
                    break
            else:
                small = 0
    K = k
    one = linops.identity(n)
    residual = linops.op_norm((one + b) @ (one + b) - (one + a))
    # (1 + s_K(x))^2 - (1 + x) = sum_{m=K+1}^{2K} d_m x^m
    ck = c[: K + 1].copy()
    ck[0] = 1.0
    d = np.convolve(ck, ck)
    p = powers[K]
    bound = 0.0
    for m in range(K + 1, 2 * K + 1):
        p = p @ a
        bound += abs(d[m]) * linops.op_norm(p)
        if abs(d[m]) * linops.op_norm(p) < 1e-300:
            break
    return SeriesRoot(b=b, terms=K, residual=residual, tail_bound=float(bound))


def _hermitian_eig(a, tol):
    a = linops.as_cmat(a, square=True)
    nrm = linops.op_norm(a)
    if linops.op_norm(a - a.conj().T) > tol * max(nrm, 1e-300):
        raise NotHermitian("matrix is not Hermitian", defect=linops.op_norm(a - a.conj().T))
    w, v = np.linalg.eigh(linops.hermitian_part(a))
    return w, v, nrm


def _from_eig(w, v):
    return (v * w) @ v.conj().T


def positive_sqrt(a, tol=DEFAULT_TOL):
    """The unique positive square root, via the spectral decomposition.

    Eigenvalues in ``[-tol |a|, 0)`` are clamped to zero.
    """
    a = linops.as_cmat(a, square=True)
    if not positive_test(a, tol):
        w = np.linalg.eigvalsh(linops.hermitian_part(a))
        raise NotPositive("matrix is not positive", min_eigenvalue=float(w.min()))
    w, v, nrm = _hermitian_eig(a, tol)
    w = np.where(w < 0, 0.0, w)
    return _from_eig(np.sqrt(w), v)


def absolute_value(a, tol=DEFAULT_TOL):
    """``|a| = (a* a)^(1/2)``."""
    a = linops.as_cmat(a)
    return positive_sqrt(a.conj().T @ a, tol=max(tol, 1e-12))


@dataclass(frozen=True)
class PolarPair:
    u: np.ndarray
    p: np.ndarray

    def __iter__(self):
        yield self.u
        yield self.p


def polar_factorise(a, tol=DEFAULT_TOL):
    """``a = u |a|`` with ``u`` unitary, for invertible ``a``."""
    a = linops.as_cmat(a, square=True)
    s = linops.singular_values(a)
    if s[-1] <= tol * s[0]:
        raise NotInvertible("matrix is not invertible", min_singular_value=float(s[-1]))
    p = absolute_value(a, tol)
    u = np.linalg.solve(p.T, a.T).T  # a p^{-1}
    return PolarPair(u=u, p=p)


@dataclass(frozen=True)
class JordanParts:
    plus: np.ndarray
    minus: np.ndarray
    reflection: np.ndarray
    p: np.ndarray
    q: np.ndarray

    def __iter__(self):
        yield self.plus
        yield self.minus


def jordan_parts(a, tol=DEFAULT_TOL):
    """Orthogonal decomposition ``a = a_plus - a_minus`` of a Hermitian ``a``.

    The reflection ``u`` (the unitary polar factor, taken as +1 on the
    kernel) splits as ``u = p - q`` with ``p = (1 + u)/2`` and
    ``q = (1 - u)/2``; then ``a_plus = p |a| = (|a| + a)/2`` and
    ``a_minus = q |a| = (|a| - a)/2``.
    """
    w, v, nrm = _hermitian_eig(a, tol)
    absa = _from_eig(np.abs(w), v)
    sign = np.where(w < -tol * nrm, -1.0, 1.0)
    u = _from_eig(sign, v)
    n = u.shape[0]
    p = 0.5 * (linops.identity(n) + u)
    q = 0.5 * (linops.identity(n) - u)
    plus = linops.hermitian_part(p @ absa)
    minus = linops.hermitian_part(q @ absa)
    return JordanParts(plus=plus, minus=minus, reflection=u, p=p, q=q)


def reflection_projections(u):
    """``(p, q)`` with ``u = p - q`` for a reflection ``u`` (``u = u*``, ``u^2 = 1``)."""
    u = linops.as_cmat(u, square=True)
    n = u.shape[0]
    return 0.5 * (linops.identity(n) + u), 0.5 * (linops.identity(n) - u)


def cayley_bounded(a, mu, tol=DEFAULT_TOL):
    """``u = (a - i mu)(a + i mu)^{-1}`` for Hermitian ``a`` and ``mu > r_lambda(a)``."""
    w, v, nrm = _hermitian_eig(a, tol)
    r = float(np.max(np.abs(w)))
    if not mu > r:
        raise MuTooSmall(f"mu = {mu} must exceed r_lambda(a) = {r}", mu=float(mu), spectral_radius=r)
    a = linops.hermitian_part(a)
    n = a.shape[0]
    one = linops.identity(n)
    return np.linalg.solve((a + 1j * mu * one).T, (a - 1j * mu * one).T).T
