"""Finite-dimensional *-algebras given by structure constants.

An algebra element is a coefficient vector (1-D complex array) over the
basis.  Products are read off the dense tensor ``mult`` with
``b_i b_j = sum_k mult[i, j, k] b_k``; the involution is the matrix
``star`` whose column ``i`` holds the coefficients of ``b_i*``, so that
``x* = star @ conj(x)``.

Spectra are never computed from ideal theory: an element acts on the
unitisation by left multiplication, that action is injective, and the
spectrum of the element is the spectrum of the resulting matrix.
"""

from dataclasses import dataclass, field, replace
from itertools import product

import numpy as np

from . import linops
from .errors import (
    AlgebraViolation,
    AssociativityViolation,
    InvalidInput,
    InvolutionViolation,
    NormViolation,
)
from .linops import DEFAULT_TOL

NORM_TAGS = ("operator", "ell1", "sup")


@dataclass(frozen=True, eq=False)
class StarAlgebra:
    """Validated structure data; build instances with :func:`build_algebra`.

    ``realization`` (operator tag only) holds one matrix per basis element;
    the norm of ``x`` is then the operator norm of ``sum x_i M_i``.
    ``unit`` is the coefficient vector of the unit, or ``None``.
    ``adjoined`` marks an algebra produced by :func:`unitise`, whose last
    basis element is the adjoined unit.
    """

    basis_names: tuple
    mult: np.ndarray
    star: np.ndarray
    norm_tag: str = "ell1"
    unit: np.ndarray | None = None
    realization: np.ndarray | None = None
    weights: np.ndarray | None = None
    adjoined: bool = False
    base: "StarAlgebra | None" = field(default=None, repr=False)

    @property
    def dim(self):
        return len(self.basis_names)

    @property
    def unital(self):
        return self.unit is not None

    def basis(self, i):
        x = np.zeros(self.dim, dtype=complex)
        x[i] = 1.0
        return x

    def index(self, name):
        return self.basis_names.index(name)


def multiply(A, x, y):
    return np.einsum("i,j,ijk->k", np.asarray(x, complex), np.asarray(y, complex), A.mult)


def star(A, x):
    return A.star @ np.conj(np.asarray(x, dtype=complex))


def power(A, x, n):
    if n < 1:
        raise InvalidInput("power needs n >= 1")
    out = np.asarray(x, dtype=complex)
    for _ in range(n - 1):
        out = multiply(A, out, x)
    return out


def realize(A, x):
    """The matrix ``sum x_i M_i`` of an operator-tagged algebra."""
    if A.realization is None:
        raise InvalidInput("algebra has no matrix realization")
    return np.tensordot(np.asarray(x, dtype=complex), A.realization, axes=1)


def norm(A, x):
    """The algebra norm selected by ``A.norm_tag``.

    For an adjoined unit on an ell1/sup algebra, ``|l e + a| = |l| + |a|``.
    """
    x = np.asarray(x, dtype=complex)
    if A.norm_tag == "operator":
        return linops.op_norm(realize(A, x))
    if A.adjoined:
        return abs(x[-1]) + norm(A.base, x[:-1])
    if A.norm_tag == "ell1":
        w = np.ones(A.dim) if A.weights is None else A.weights
        return float(np.sum(w * np.abs(x)))
    if A.norm_tag == "sup":
        return float(np.max(np.abs(x))) if x.size else 0.0
    raise InvalidInput(f"unknown norm tag {A.norm_tag!r}")


def is_hermitian(A, x, tol=DEFAULT_TOL):
    x = np.asarray(x, dtype=complex)
    return norm(A, x - star(A, x)) <= tol * max(norm(A, x), 1e-300)


def _find_unit(mult, tol):
    dim = mult.shape[0]
    # e b_j = b_j and b_j e = b_j for all j, linear in e
    left = np.transpose(mult, (1, 2, 0)).reshape(dim * dim, dim)
    right = np.transpose(mult, (0, 2, 1)).reshape(dim * dim, dim)
    system = np.vstack([left, right])
    rhs = np.concatenate([np.eye(dim).reshape(-1)] * 2).astype(complex)
    e, *_ = np.linalg.lstsq(system, rhs, rcond=None)
    if np.linalg.norm(system @ e - rhs) <= tol * max(1.0, np.linalg.norm(rhs)) * 10:
        # snap entries that are integers up to rounding
        for part in (e.real, e.imag):
            near = np.round(part)
            part[np.abs(part - near) < tol] = near[np.abs(part - near) < tol]
        return e
    return None


def build_algebra(
    basis_names,
    mult,
    star_matrix,
    norm_tag="ell1",
    unit=None,
    realization=None,
    weights=None,
    detect_unit=True,
    tol=DEFAULT_TOL,
):
    """Validate raw structure data and return a :class:`StarAlgebra`.

    Checks associativity on every basis triple, that the involution is
    conjugate-linear, involutive and product-reversing on basis pairs,
    and that the norm is submultiplicative on basis pairs.  Every failed
    check is collected; the raised error is of the class of the first
    failure and lists all of them.

    ``unit`` may be a basis index or a coefficient vector.  With
    ``detect_unit`` (default) a unit is looked for when none is given.
    """
    names = tuple(str(n) for n in basis_names)
    dim = len(names)
    if dim == 0:
        raise InvalidInput("algebra needs at least one basis element")
    mult = np.asarray(mult, dtype=complex)
    if mult.shape != (dim, dim, dim):
        raise InvalidInput("structure tensor has the wrong shape", shape=list(mult.shape), dim=dim)
    S = np.asarray(star_matrix, dtype=complex)
    if S.shape != (dim, dim):
        raise InvalidInput("star matrix has the wrong shape", shape=list(S.shape), dim=dim)
    if norm_tag not in NORM_TAGS:
        raise InvalidInput(f"unknown norm tag {norm_tag!r}")
    if realization is not None:
        realization = np.asarray(realization, dtype=complex)
        if realization.ndim != 3 or realization.shape[0] != dim or realization.shape[1] != realization.shape[2]:
            raise InvalidInput("realization must be dim square matrices")
    if norm_tag == "operator" and realization is None:
        raise InvalidInput("operator norm tag needs a matrix realization")
    if weights is not None:
        weights = np.asarray(weights, dtype=float)
        if weights.shape != (dim,) or np.any(weights <= 0):
            raise InvalidInput("weights must be positive, one per basis element")

    scale = max(1.0, float(np.max(np.abs(mult))))
    violations = []

    # (b_i b_j) b_k - b_i (b_j b_k)
    lhs = np.einsum("ijm,mkn->ijkn", mult, mult)
    rhs = np.einsum("jkm,imn->ijkn", mult, mult)
    bad = np.abs(lhs - rhs).max(axis=3)
    for i, j, k in zip(*np.nonzero(bad > tol * scale**2)):
        violations.append(("associativity", (names[i], names[j], names[k]), float(bad[i, j, k])))

    invol = np.abs(S @ np.conj(S) - np.eye(dim))
    for i in range(dim):
        if invol[:, i].max() > tol:
            violations.append(("involution", (names[i],), float(invol[:, i].max())))
    # (b_i b_j)* = b_j* b_i*
    for i, j in product(range(dim), repeat=2):
        left = S @ np.conj(mult[i, j])
        right = np.einsum("p,q,pqk->k", S[:, j], S[:, i], mult)
        d = float(np.abs(left - right).max())
        if d > tol * scale:
            violations.append(("involution", (names[i], names[j]), d))

    A = StarAlgebra(
        basis_names=names,
        mult=mult,
        star=S,
        norm_tag=norm_tag,
        realization=realization,
        weights=weights,
    )

    if realization is not None:
        # the realization must be a *-homomorphism
        for i, j in product(range(dim), repeat=2):
            d = linops.op_norm(realization[i] @ realization[j] - realize(A, mult[i, j]))
            if d > tol * scale * max(1.0, linops.op_norm(realization[i]) * linops.op_norm(realization[j])):
                violations.append(("realization", (names[i], names[j]), d))
        for i in range(dim):
            d = linops.op_norm(realization[i].conj().T - realize(A, S[:, i]))
            if d > tol * max(1.0, linops.op_norm(realization[i])):
                violations.append(("realization", (names[i],), d))

    for i, j in product(range(dim), repeat=2):
        ni, nj = norm(A, A.basis(i)), norm(A, A.basis(j))
        nij = norm(A, mult[i, j])
        if nij > ni * nj * (1 + tol) + tol:
            violations.append(("norm", (names[i], names[j]), nij - ni * nj))

    if violations:
        kind = violations[0][0]
        cls = {
            "associativity": AssociativityViolation,
            "involution": InvolutionViolation,
            "realization": InvolutionViolation,
            "norm": NormViolation,
        }.get(kind, AlgebraViolation)
        first = violations[0]
        raise cls(
            f"{kind} violated on {first[1]} (defect {first[2]:.3g})",
            violations=[{"check": v[0], "basis": list(v[1]), "defect": v[2]} for v in violations],
        )

    if unit is not None:
        if np.ndim(unit) == 0:
            e = np.zeros(dim, dtype=complex)
            e[int(unit)] = 1.0
        else:
            e = np.asarray(unit, dtype=complex)
        for j in range(dim):
            bj = A.basis(j)
            if np.abs(multiply(A, e, bj) - bj).max() > tol * scale or np.abs(multiply(A, bj, e) - bj).max() > tol * scale:
                raise InvalidInput("declared unit does not act as identity", basis=names[j])
    elif detect_unit:
        e = _find_unit(mult, tol)
    else:
        e = None
    return replace(A, unit=e)


def _from_matrices(names, mats, unit=None, detect_unit=True, tol=DEFAULT_TOL):
    """Algebra spanned by linearly independent matrices closed under * and products."""
    mats = np.asarray(mats, dtype=complex)
    dim, n, _ = mats.shape
    flat = mats.reshape(dim, n * n).T
    pinv = np.linalg.pinv(flat)

    def coords(m):
        return pinv @ m.reshape(-1)

    mult = np.zeros((dim, dim, dim), dtype=complex)
    for i, j in product(range(dim), repeat=2):
        mult[i, j] = coords(mats[i] @ mats[j])
    S = np.stack([coords(mats[i].conj().T) for i in range(dim)], axis=1)
    mult[np.abs(mult) < 1e-14] = 0.0
    S[np.abs(S) < 1e-14] = 0.0
    return build_algebra(
        names, mult, S, norm_tag="operator", unit=unit, realization=mats, detect_unit=detect_unit, tol=tol
    )


def matrix_algebra(n):
    """M_n with the matrix-unit basis e_ij (row-major), operator norm."""
    names, mats = [], []
    for i, j in product(range(n), repeat=2):
        m = np.zeros((n, n), dtype=complex)
        m[i, j] = 1.0
        names.append(f"e{i + 1}{j + 1}")
        mats.append(m)
    return _from_matrices(names, mats)


def diagonal_algebra(n):
    """D_n, the diagonal n x n matrices, basis e_ii, operator norm."""
    mats = []
    for i in range(n):
        m = np.zeros((n, n), dtype=complex)
        m[i, i] = 1.0
        mats.append(m)
    return _from_matrices([f"d{i + 1}" for i in range(n)], mats)


def operator_algebra(mats, names=None, detect_unit=True):
    """Algebra spanned by a *-closed, product-closed, independent set of matrices."""
    mats = [np.asarray(m, dtype=complex) for m in mats]
    if names is None:
        names = [f"b{i}" for i in range(len(mats))]
    return _from_matrices(names, mats, detect_unit=detect_unit)


def group_ring(orders):
    """C[G] for G = Z_{n1} x ... x Z_{nr} with convolution and the l1 norm.

    Basis ``delta_g`` for g in the product group, enumerated in row-major
    (lexicographic) order of the tuple g; ``delta_g* = delta_{-g}``.
    """
    orders = [int(n) for n in orders]
    if not orders:
        raise InvalidInput("need at least one cyclic factor")
    if any(n < 1 for n in orders):
        raise InvalidInput("cyclic orders must be >= 1", orders=orders)
    elements = list(product(*[range(n) for n in orders]))
    index = {g: k for k, g in enumerate(elements)}
    dim = len(elements)
    mult = np.zeros((dim, dim, dim), dtype=complex)
    S = np.zeros((dim, dim), dtype=complex)
    for g in elements:
        inv = tuple((-gi) % n for gi, n in zip(g, orders))
        S[index[inv], index[g]] = 1.0
        for h in elements:
            gh = tuple((gi + hi) % n for gi, hi, n in zip(g, h, orders))
            mult[index[g], index[h], index[gh]] = 1.0
    if len(orders) == 1:
        names = [f"delta{g[0]}" for g in elements]
    else:
        names = ["delta(" + ",".join(map(str, g)) + ")" for g in elements]
    return build_algebra(names, mult, S, norm_tag="ell1", unit=0)


def unitise(A):
    """The unitisation; ``A`` itself when ``A`` is unital.

    The adjoined unit ``e`` is appended as the last basis element.  For
    the operator tag the realization is extended by the identity matrix;
    otherwise the norm becomes ``|l e + a| = |l| + |a|``.
    """
    if A.unital:
        return A
    d = A.dim
    mult = np.zeros((d + 1, d + 1, d + 1), dtype=complex)
    mult[:d, :d, :d] = A.mult
    for i in range(d):
        mult[d, i, i] = 1.0
        mult[i, d, i] = 1.0
    mult[d, d, d] = 1.0
    S = np.zeros((d + 1, d + 1), dtype=complex)
    S[:d, :d] = A.star
    S[d, d] = 1.0
    realization = None
    if A.realization is not None:
        n = A.realization.shape[1]
        realization = np.concatenate([A.realization, np.eye(n, dtype=complex)[None]], axis=0)
    weights = None
    if A.weights is not None:
        weights = np.concatenate([A.weights, [1.0]])
    unit = np.zeros(d + 1, dtype=complex)
    unit[d] = 1.0
    return StarAlgebra(
        basis_names=A.basis_names + ("e",),
        mult=mult,
        star=S,
        norm_tag=A.norm_tag,
        unit=unit,
        realization=realization,
        weights=weights,
        adjoined=True,
        base=A,
    )


def embed(A, x):
    """Coefficients of ``x`` in A, expressed in the basis of the unitisation."""
    x = np.asarray(x, dtype=complex)
    if x.shape != (A.dim,):
        raise InvalidInput("element length does not match algebra dimension", expected=A.dim, got=int(x.size))
    if A.unital:
        return x
    return np.concatenate([x, [0.0]])


def left_regular(A, x):
    """Matrix of ``L_x : y -> x y`` on the unitisation, canonical basis."""
    At = unitise(A)
    xt = embed(A, x)
    return np.einsum("i,ijk->kj", xt, At.mult)


def spectrum(A, x, tol=DEFAULT_TOL):
    """Distinct spectral values of ``x``, clustered within ``tol (1 + |L_x|)``."""
    L = left_regular(A, x)
    vals = linops.eig(L, tol).values
    gap = max(tol, 1e-8) * (1 + linops.op_norm(L))
    return linops.distinct_values(vals, gap)


def hermitian_basis(A):
    """Real-spanning Hermitian elements (b + b*)/2 and (b - b*)/2i."""
    out = []
    for i in range(A.dim):
        b = A.basis(i)
        bs = star(A, b)
        out.append(0.5 * (b + bs))
        out.append(-0.5j * (b - bs))
    return out


def is_commutative(A, tol=DEFAULT_TOL):
    return commutativity_defect(A) <= tol * max(1.0, float(np.max(np.abs(A.mult))))


def commutativity_defect(A):
    return float(np.max(np.abs(A.mult - np.transpose(A.mult, (1, 0, 2))))) if A.dim else 0.0
