"""Spectral radius, the Ptak function, Hermitian and positivity tests,
and the rational functional calculus.

Functions accept either a square matrix or a pair ``(A, x)`` of a
:class:`~opalg.staralg.StarAlgebra` and a coefficient vector.  Algebra
elements are worked with inside the unitisation; returned elements are
coefficient vectors over the unitisation basis.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import linops, staralg
from .errors import InvalidInput, PoleOnSpectrum
from .linops import DEFAULT_TOL


class _Matrices:
    def __init__(self, m):
        self.value = linops.as_cmat(m, square=True)
        self.n = self.value.shape[0]

    def mul(self, x, y):
        return x @ y

    def star(self, x):
        return x.conj().T

    def norm(self, x):
        return linops.op_norm(x)

    def one(self):
        return linops.identity(self.n)

    def operator(self, x):
        return x

    def solve(self, x, y):
        """x^{-1} y"""
        return np.linalg.solve(x, y)


class _Elements:
    def __init__(self, A, x):
        self.algebra = staralg.unitise(A)
        self.value = staralg.embed(A, x)

    def mul(self, x, y):
        return staralg.multiply(self.algebra, x, y)

    def star(self, x):
        return staralg.star(self.algebra, x)

    def norm(self, x):
        return staralg.norm(self.algebra, x)

    def one(self):
        return self.algebra.unit.copy()

    def operator(self, x):
        return staralg.left_regular(self.algebra, x)

    def solve(self, x, y):
        return np.linalg.solve(self.operator(x), y)


def _wrap(a):
    if isinstance(a, tuple):
        if len(a) != 2 or not isinstance(a[0], staralg.StarAlgebra):
            raise InvalidInput("expected a matrix or an (algebra, element) pair")
        return _Elements(*a)
    return _Matrices(a)


def _spectrum_values(ctx, x, tol):
    return linops.eig(ctx.operator(x), tol).values


@dataclass(frozen=True)
class SpectralRadius:
    value: float
    sequence: tuple
    eig_max: float
    gap: float

    def __float__(self):
        return self.value


def spectral_radius(a, k_max=20, tol=DEFAULT_TOL):
    """Gelfand's limit ``|a^n|^(1/n)`` along ``n = 2^k``, ``k <= k_max``.

    Each square is renormalised and the logarithms of the norms are
    accumulated, so the iteration cannot overflow or underflow.  The
    diagnostics carry ``r_0..r_k`` and the distance to ``max |eig|``.
    """
    ctx = _wrap(a)
    x = ctx.value
    s = ctx.norm(x)
    seq = [s]
    value = s
    if s > 0:
        logn = math.log(s)
        b = x / s
        for k in range(1, k_max + 1):
            b = ctx.mul(b, b)
            s = ctx.norm(b)
            if s == 0.0:
                value = 0.0
                seq.append(0.0)
                break
            b = b / s
            logn = 2.0 * logn + math.log(s)
            value = math.exp(logn / 2.0**k)
            seq.append(value)
    eig_max = float(np.max(np.abs(_spectrum_values(ctx, x, tol))))
    return SpectralRadius(value=float(value), sequence=tuple(seq), eig_max=eig_max, gap=abs(value - eig_max))


def ptak(a, k_max=20, tol=DEFAULT_TOL):
    """``r_sigma(a) = r_lambda(a* a)^(1/2)``."""
    ctx = _wrap(a)
    x = ctx.value
    aa = ctx.mul(ctx.star(x), x)
    # the unitisation is unital, so passing it back in adds no second unit
    inner = (ctx.algebra, aa) if isinstance(ctx, _Elements) else aa
    return math.sqrt(spectral_radius(inner, k_max, tol).value)


@dataclass(frozen=True)
class HermitianVerdict:
    counterexample: np.ndarray | None
    reason: str = ""

    @property
    def found(self):
        return self.counterexample is not None


def hermitian_probe(A, samples=32, seed=0, tol=1e-8):
    """Search for a witness that ``A`` is not Hermitian.

    Tries the Hermitian basis, ``samples`` random real combinations of it
    (real spectrum required), then ``samples`` random elements for the
    inequality ``r_lambda <= r_sigma``.  A clean run proves nothing.
    """
    rng = np.random.default_rng(seed)
    hb = staralg.hermitian_basis(A)
    cands = list(hb)
    H = np.array(hb)
    for _ in range(samples):
        cands.append(rng.standard_normal(len(hb)) @ H)
    for h in cands:
        if np.allclose(h, 0):
            continue
        L = staralg.left_regular(A, h)
        vals = linops.eig(L, tol).values
        if np.max(np.abs(vals.imag)) > tol * (1 + linops.op_norm(L)):
            return HermitianVerdict(h, "hermitian element with non-real spectrum")
    for _ in range(samples):
        x = rng.standard_normal(A.dim) + 1j * rng.standard_normal(A.dim)
        rl = spectral_radius((A, x), tol=tol).eig_max
        rs = math.sqrt(spectral_radius((A, staralg.multiply(A, staralg.star(A, x), x)), tol=tol).eig_max)
        if rl > rs * (1 + 1e-6) + tol:
            return HermitianVerdict(x, "r_lambda exceeds r_sigma")
    return HermitianVerdict(None, "no counterexample")


def positive_test(a, tol=DEFAULT_TOL):
    """Hermitian with spectrum in [0, inf), all to ``tol`` relative to the norm."""
    ctx = _wrap(a)
    x = ctx.value
    nrm = ctx.norm(x)
    if nrm == 0.0:
        return True
    if ctx.norm(x - ctx.star(x)) > tol * nrm:
        return False
    vals = _spectrum_values(ctx, x, tol)
    scale = max(nrm, linops.op_norm(ctx.operator(x)))
    return bool(vals.real.min() >= -tol * scale and np.abs(vals.imag).max() <= tol * scale)


def _horner(ctx, x, coeffs):
    out = ctx.one() * 0
    for c in reversed(coeffs):
        out = ctx.mul(out, x) + c * ctx.one()
    return out


def rational_apply(a, numerator, poles=(), tol=DEFAULT_TOL):
    """``r(a)`` for ``r(x) = p(x) / prod_j (x - z_j)^m_j``.

    ``numerator`` lists coefficients of ``p`` in ascending degree;
    ``poles`` lists ``(z_j, m_j)``.  A pole within
    ``tol (1 + r_lambda(a))`` of the spectrum raises ``PoleOnSpectrum``.
    """
    ctx = _wrap(a)
    x = ctx.value
    coeffs = [complex(c) for c in numerator]
    if not coeffs:
        coeffs = [0j]
    sp = _spectrum_values(ctx, x, tol)
    rl = float(np.max(np.abs(sp)))
    for z, m in poles:
        if int(m) < 0:
            raise InvalidInput("pole multiplicity must be non-negative")
        dist = np.abs(sp - z)
        k = int(np.argmin(dist))
        if dist[k] < tol * (1 + rl):
            raise PoleOnSpectrum(
                f"pole {z} meets the spectrum", root=[complex(z).real, complex(z).imag],
                nearest=[sp[k].real, sp[k].imag], distance=float(dist[k]),
            )
    out = _horner(ctx, x, coeffs)
    for z, m in poles:
        shifted = x - complex(z) * ctx.one()
        for _ in range(int(m)):
            out = ctx.solve(shifted, out)
    return out


def rational_eval(z, numerator, poles=()):
    """Scalar evaluation of the same rational function."""
    z = np.asarray(z, dtype=complex)
    out = np.zeros_like(z)
    for c in reversed([complex(c) for c in numerator] or [0j]):
        out = out * z + c
    for p, m in poles:
        out = out / (z - complex(p)) ** int(m)
    return out
