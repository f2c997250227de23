"""Unbounded self-adjoint multiplication operators on weighted sequence spaces.

The operator multiplies the n-th coordinate (n = 1, 2, ...) by a real
symbol ``g_n``.  Symbols, weights and vectors come in closed-form power
families so that domain questions reduce to p-series exponents; only the
realisations (matrices, evolutions) are truncated.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput, SupportExceedsTruncation

DEFAULT_TRUNCATION = 4096
HEURISTIC_GROWTH = 1e-2


def _indices(N):
    return np.arange(1, int(N) + 1, dtype=float)


# symbols -----------------------------------------------------------------

@dataclass(frozen=True)
class PowerSymbol:
    """``g_n = c n^t``."""

    t: float = 1.0
    c: float = 1.0

    def __call__(self, n):
        return self.c * np.asarray(n, dtype=float) ** self.t

    @property
    def exponent(self):
        return 0.0 if self.c == 0 else float(self.t)


@dataclass(frozen=True)
class AffineSymbol:
    """``g_n = slope n + shift``."""

    slope: float = 1.0
    shift: float = 0.0

    def __call__(self, n):
        return self.slope * np.asarray(n, dtype=float) + self.shift

    @property
    def exponent(self):
        return 1.0 if self.slope != 0 else 0.0


@dataclass(frozen=True)
class TableSymbol:
    """Explicit values ``g_1 .. g_m``; the last value repeats beyond ``m``."""

    values: tuple

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).ravel()
        if v.size == 0:
            raise InvalidInput("symbol table is empty")
        object.__setattr__(self, "values", tuple(float(a) for a in v))

    def __call__(self, n):
        n = np.asarray(n, dtype=int)
        v = np.asarray(self.values)
        return v[np.minimum(n, v.size) - 1]

    @property
    def exponent(self):
        return 0.0


@dataclass(frozen=True)
class PowerWeights:
    """``w_n = n^(-r)``; ``r = 0`` is the counting measure."""

    r: float = 0.0

    def __call__(self, n):
        return np.asarray(n, dtype=float) ** (-self.r)


@dataclass(frozen=True)
class Power:
    """``f(x) = x^p``; ``exponent`` is what the domain certificate uses."""

    p: float = 1.0

    def __call__(self, x):
        x = np.asarray(x)
        if float(self.p).is_integer():
            return x ** int(self.p)
        return np.asarray(x, dtype=complex) ** self.p

    @property
    def exponent(self):
        return float(self.p)


IDENTITY = Power(1.0)


@dataclass(frozen=True)
class DiagonalOperator:
    symbol: object
    weights: PowerWeights = PowerWeights()
    truncation: int = DEFAULT_TRUNCATION

    def __post_init__(self):
        g = np.asarray(self.symbol(_indices(min(self.truncation, 64))))
        if np.iscomplexobj(g) and np.abs(g.imag).max() > 0:
            raise InvalidInput("symbol must be real")

    def symbol_values(self, N=None):
        return np.asarray(self.symbol(_indices(N or self.truncation)), dtype=float)

    def weight_values(self, N=None):
        return self.weights(_indices(N or self.truncation))

    def normalized_weights(self, N=None):
        w = self.weight_values(N)
        return w / w.sum()

    def spectrum_points(self, N=None):
        """Atoms ``{g_n : n <= N}``; the spectrum is their closure."""
        return np.unique(self.symbol_values(N))


# vectors -----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SeqVector:
    """Either explicit entries (``entries[0]`` is ``x_1``) or ``x_n = c n^(-s)``."""

    entries: np.ndarray = None
    s: float = None
    c: complex = 1.0

    def __post_init__(self):
        if (self.entries is None) == (self.s is None):
            raise InvalidInput("give either entries or a power-law exponent")
        if self.entries is not None:
            e = np.atleast_1d(np.asarray(self.entries, dtype=complex))
            nz = np.nonzero(e)[0]
            object.__setattr__(self, "entries", e[: nz[-1] + 1] if nz.size else e[:0])

    @classmethod
    def basis(cls, k):
        e = np.zeros(k, dtype=complex)
        e[k - 1] = 1.0
        return cls(entries=e)

    @classmethod
    def power_law(cls, s, c=1.0):
        return cls(s=float(s), c=c)

    @property
    def finite(self):
        return self.entries is not None

    @property
    def support_size(self):
        return self.entries.size if self.finite else None

    def values(self, N):
        if self.finite:
            out = np.zeros(int(N), dtype=complex)
            m = min(int(N), self.entries.size)
            out[:m] = self.entries[:m]
            return out
        return self.c * _indices(N) ** (-self.s)


def _finite_entries(x, N):
    if not x.finite:
        raise InvalidInput("operation needs a finitely supported vector")
    if x.support_size > N:
        raise SupportExceedsTruncation(
            "vector support exceeds the truncation", support=int(x.support_size), truncation=int(N)
        )
    return x.entries


def norm(a, x, N=None):
    """Weighted norm ``(sum |x_n|^2 w_n)^(1/2)`` (truncated at N for power laws)."""
    N = N or a.truncation
    v = x.entries if x.finite else x.values(N)
    return float(np.sqrt(np.sum(np.abs(v) ** 2 * a.weights(_indices(v.size)))))


def domain_membership(a, x, f=IDENTITY, N=None, growth_tol=HEURISTIC_GROWTH):
    """Is ``x`` in the domain of ``f(a)``, i.e. ``sum |f(g_n)|^2 |x_n|^2 w_n < oo``?

    Power families are settled by the p-series exponent
    ``2 (s - p t) + r > 1``.  Otherwise partial sums at N and 2N are
    compared and the verdict is flagged as heuristic.
    """
    if x.finite:
        return {"member": True, "certificate": {"kind": "finite", "heuristic": False}}
    t = getattr(a.symbol, "exponent", None)
    p = getattr(f, "exponent", None)
    if t is not None and p is not None and x.c != 0:
        expo = 2.0 * (x.s - p * t) + a.weights.r
        in_space = 2.0 * x.s + a.weights.r > 1.0
        return {
            "member": bool(in_space and expo > 1.0),
            "certificate": {"kind": "p-series", "exponent": expo, "in_space": in_space, "heuristic": False},
        }
    N = N or a.truncation

    def partial(M):
        n = _indices(M)
        terms = np.abs(f(a.symbol(n))) ** 2 * np.abs(x.values(M)) ** 2 * a.weights(n)
        return float(np.sum(terms))

    s1, s2 = partial(N), partial(2 * N)
    ratio = s2 / s1 if s1 > 0 else 1.0
    return {
        "member": bool(ratio <= 1.0 + growth_tol),
        "certificate": {"kind": "partial-sums", "ratio": ratio, "N": int(N), "heuristic": True},
    }


def apply_function(a, f, x, N=None):
    """``Psi(f) x = (f(g_n) x_n)_n`` for finitely supported ``x``."""
    N = N or a.truncation
    e = _finite_entries(x, N)
    g = a.symbol(_indices(e.size))
    return SeqVector(entries=np.asarray(f(g), dtype=complex) * e)


def truncated_matrix(a, f=IDENTITY, N=None):
    """Diagonal realisation of ``Psi(f)`` on the first N coordinates."""
    return np.diag(np.asarray(f(a.symbol_values(N)), dtype=complex))


@dataclass(frozen=True)
class CayleyPair:
    u: np.ndarray
    recovered: np.ndarray
    roundtrip_residual: float
    modulus_defect: float
    distance_from_one: float


def cayley_pair(a, N=None):
    """``u_n = (g_n - i)/(g_n + i)`` and the recovered ``g_n = i(1 + u_n)/(1 - u_n)``.

    On the unit circle ``i(1 + u)/(1 - u) = -(1 + Re u)/Im u``; this form
    avoids the cancellation in ``1 - u`` for large ``g``.
    """
    g = a.symbol_values(N)
    u = (g - 1j) / (g + 1j)
    num = 1.0 + u.real
    den = u.imag
    back = -np.divide(num, den, out=np.zeros_like(num), where=den != 0)
    resid = float(np.max(np.abs(back - g) / np.maximum(1.0, np.abs(g)))) if g.size else 0.0
    return CayleyPair(
        u=u,
        recovered=back,
        roundtrip_residual=resid,
        modulus_defect=float(np.max(np.abs(np.abs(u) - 1.0))) if g.size else 0.0,
        distance_from_one=float(np.min(np.abs(1.0 - u))) if g.size else float("inf"),
    )


def evolve(a, t, x, N=None):
    """``(U_t x)_n = exp(-i t g_n) x_n``."""
    N = N or a.truncation
    e = _finite_entries(x, N)
    g = a.symbol(_indices(e.size))
    return SeqVector(entries=np.exp(-1j * float(t) * g) * e)


def group_law_residual(a, t, s, x, N=None):
    """``|U_(t+s) x - U_t U_s x|``."""
    lhs = evolve(a, t + s, x, N).values(max(x.support_size, 1))
    rhs = evolve(a, t, evolve(a, s, x, N), N).values(max(x.support_size, 1))
    w = a.weights(_indices(lhs.size))
    return float(np.sqrt(np.sum(np.abs(lhs - rhs) ** 2 * w)))


@dataclass(frozen=True)
class GeneratorCheck:
    residual: float
    constant: float
    h: float


def generator_check(a, x, h, N=None):
    """``|(i/h)(U_h x - x) - a x|``; first order in ``h``, ``constant = residual / h``."""
    if not h > 0:
        raise InvalidInput("step must be positive", h=h)
    N = N or a.truncation
    e = _finite_entries(x, N)
    n = _indices(e.size)
    g = a.symbol(n)
    diff = 1j / h * np.expm1(-1j * h * g) * e - g * e
    r = float(np.sqrt(np.sum(np.abs(diff) ** 2 * a.weights(n))))
    return GeneratorCheck(residual=r, constant=r / h, h=float(h))


def loglog_slope(hs, residuals):
    """Least-squares slope of ``log residual`` against ``log h``."""
    return float(np.polyfit(np.log(hs), np.log(residuals), 1)[0])
