"""Characters and the Gelfand transform of commutative algebras, the
truncated convolution algebra l1(Z), and Wiener inversion.

Characters are found without any ideal theory.  For a generic element
``c`` of a commutative semisimple algebra the left-multiplication
operator ``L_c`` on the unitisation has simple eigenvalues; its
eigenvectors are the minimal idempotents, and every basis element acts
on each of them by a scalar, which is the character value.
"""

from dataclasses import dataclass

import numpy as np

from . import linops, staralg
from .errors import InvalidInput, NotCommutative, NotSemisimple, TransformVanishes
from .linops import DEFAULT_TOL

CHARACTER_SEED = 20240607


@dataclass(frozen=True)
class CharacterTable:
    """Row ``t`` holds ``tau_t(b_i)`` over the basis of the algebra."""

    characters: np.ndarray
    multiplicativity_residual: float

    def __len__(self):
        return self.characters.shape[0]


def characters(A, tol=1e-9, seed=CHARACTER_SEED, retries=3):
    """All characters of a commutative, semisimple algebra ``A``.

    Characters of the unitisation that vanish on ``A`` (the one at
    infinity, present when ``A`` has no unit) are dropped.  Rows are
    ordered lexicographically by their values.
    """
    if not staralg.is_commutative(A, tol):
        m = np.abs(A.mult - np.transpose(A.mult, (1, 0, 2))).max(axis=2)
        i, j = np.unravel_index(int(np.argmax(m)), m.shape)
        raise NotCommutative("basis elements do not commute", pair=[A.basis_names[i], A.basis_names[j]])
    At = staralg.unitise(A)
    ops = np.array([staralg.left_regular(At, At.basis(i)) for i in range(At.dim)])
    scale = max(1.0, max(linops.op_norm(L) for L in ops))
    rng = np.random.default_rng(seed)
    for _ in range(retries):
        c = rng.standard_normal(At.dim) + 1j * rng.standard_normal(At.dim)
        Lc = np.tensordot(c, ops, axes=1)
        w, v = np.linalg.eig(Lc)
        gap = np.abs(w[:, None] - w[None, :])
        np.fill_diagonal(gap, np.inf)
        if w.size > 1 and gap.min() <= 1e-6 * linops.op_norm(Lc):
            continue
        if np.linalg.cond(v) > 1e8:
            continue
        v = v / np.linalg.norm(v, axis=0, keepdims=True)
        # tau_t(b_i) v_t = L_{b_i} v_t
        table = np.einsum("ta,iab,bt->ti", v.conj().T, ops, v)
        break
    else:
        raise NotSemisimple("left-regular family is not simultaneously diagonalisable")
    table = table[:, : A.dim] if At.adjoined else table
    keep = np.abs(table).max(axis=1) > tol * scale
    table = table[keep]
    table = _sort_rows(table)
    residual = _multiplicativity_residual(A, table)
    return CharacterTable(characters=table, multiplicativity_residual=residual)


def _sort_rows(table):
    keys = []
    for k in reversed(range(table.shape[1])):
        keys.append(np.round(table[:, k].imag, 9))
        keys.append(np.round(table[:, k].real, 9))
    return table[np.lexsort(keys)]


def _multiplicativity_residual(A, table):
    if table.size == 0:
        return 0.0
    # tau(b_i b_j) - tau(b_i) tau(b_j)
    lhs = np.einsum("ijk,tk->tij", A.mult, table)
    rhs = table[:, :, None] * table[:, None, :]
    return float(np.abs(lhs - rhs).max())


def gelfand_transform(A, x, table=None):
    """Values ``x^(tau_t) = tau_t(x)`` over the character table."""
    if table is None:
        table = characters(A)
    x = np.asarray(x, dtype=complex)
    if x.shape != (A.dim,):
        raise InvalidInput("element length does not match algebra dimension")
    return table.characters @ x


@dataclass(frozen=True)
class L1ZElement:
    """Finitely supported sequence on Z: ``coeffs[j]`` sits at ``offset + j``."""

    offset: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=complex))
        nz = np.nonzero(c)[0]
        if nz.size == 0:
            object.__setattr__(self, "offset", 0)
            object.__setattr__(self, "coeffs", np.zeros(0, dtype=complex))
        else:
            object.__setattr__(self, "offset", int(self.offset) + int(nz[0]))
            object.__setattr__(self, "coeffs", c[nz[0] : nz[-1] + 1].copy())

    @classmethod
    def delta(cls, k, value=1.0):
        return cls(k, [value])

    @classmethod
    def from_dict(cls, mapping):
        if not mapping:
            return cls(0, [])
        lo, hi = min(mapping), max(mapping)
        c = np.zeros(hi - lo + 1, dtype=complex)
        for k, v in mapping.items():
            c[k - lo] += v
        return cls(lo, c)

    def __getitem__(self, k):
        j = k - self.offset
        if 0 <= j < self.coeffs.size:
            return self.coeffs[j]
        return 0j

    @property
    def support(self):
        return (self.offset, self.offset + self.coeffs.size - 1)

    @property
    def width(self):
        return self.coeffs.size

    def norm1(self):
        return float(np.sum(np.abs(self.coeffs)))

    def __eq__(self, other):
        if not isinstance(other, L1ZElement):
            return NotImplemented
        return self.offset == other.offset and np.array_equal(self.coeffs, other.coeffs)

    def __add__(self, other):
        lo = min(self.offset, other.offset)
        hi = max(self.offset + self.width, other.offset + other.width)
        c = np.zeros(max(hi - lo, 0), dtype=complex)
        c[self.offset - lo : self.offset - lo + self.width] += self.coeffs
        c[other.offset - lo : other.offset - lo + other.width] += other.coeffs
        return L1ZElement(lo, c)

    def __sub__(self, other):
        return self + L1ZElement(other.offset, -other.coeffs)

    def __mul__(self, other):
        return l1z_convolve(self, other)


def l1z_convolve(a, b):
    if a.width == 0 or b.width == 0:
        return L1ZElement(0, [])
    return L1ZElement(a.offset + b.offset, np.convolve(a.coeffs, b.coeffs))


def l1z_star(a):
    """``a*(k) = conj(a(-k))``."""
    if a.width == 0:
        return a
    return L1ZElement(-(a.offset + a.width - 1), np.conj(a.coeffs[::-1]))


def l1z_transform_grid(a, N):
    """``f(t_j) = sum_k a(k) exp(-i k t_j)`` at ``t_j = 2 pi j / N``."""
    N = int(N)
    if N < 1:
        raise InvalidInput("grid size must be positive")
    if a.width == 0:
        return np.zeros(N, dtype=complex)
    k = np.arange(a.offset, a.offset + a.width)
    if a.width <= N:
        buf = np.zeros(N, dtype=complex)
        np.add.at(buf, k % N, a.coeffs)
        return np.fft.fft(buf)
    t = 2 * np.pi * np.arange(N) / N
    return np.exp(-1j * np.outer(t, k)) @ a.coeffs


@dataclass(frozen=True)
class WienerInverse:
    b: L1ZElement
    residual: float
    tail: float
    tail_ok: bool
    min_symbol: float


def wiener_invert(a, K, N=None, tol=DEFAULT_TOL):
    """Approximate inverse of ``a`` in l1(Z) with support in ``[-K, K]``.

    ``b(k) = (1/N) sum_j exp(i k t_j) / f(t_j)`` where ``f`` is the symbol
    of ``a``.  ``residual`` is ``|a*b - delta_0|_1``; ``tail_ok`` says
    whether ``|b(+-K)| <= tol``, a heuristic certificate only.
    """
    K = int(K)
    if N is None:
        N = max(4096, 32 * K)
    N = int(N)
    if N < 2 * K + 1:
        raise InvalidInput("grid too small for the requested truncation", N=N, K=K)
    f = l1z_transform_grid(a, N)
    j = int(np.argmin(np.abs(f)))
    fmin = float(np.abs(f[j]))
    if fmin <= tol * max(1.0, a.norm1()):
        raise TransformVanishes(
            "symbol vanishes on the grid", t=float(2 * np.pi * j / N), value=fmin,
        )
    g = np.fft.ifft(1.0 / f)  # g[k] = (1/N) sum_j exp(2 pi i jk/N) / f_j
    ks = np.arange(-K, K + 1)
    b = L1ZElement(-K, g[ks % N])
    resid = (l1z_convolve(a, b) - L1ZElement.delta(0)).norm1()
    tail = float(max(abs(b[-K]), abs(b[K])))
    return WienerInverse(b=b, residual=resid, tail=tail, tail_ok=tail <= tol, min_symbol=fmin)


def toeplitz_inverse(a, K):
    """Reference inverse: solve ``(a*b)(n) = delta_0(n)`` for ``|n| <= K``
    with ``b`` supported in ``[-K, K]`` as a dense linear system."""
    K = int(K)
    idx = np.arange(-K, K + 1)
    T = np.array([[a[n - k] for k in idx] for n in idx], dtype=complex)
    rhs = (idx == 0).astype(complex)
    return L1ZElement(-K, np.linalg.solve(T, rhs))

