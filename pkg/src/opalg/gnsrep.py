"""Positive functionals, the GNS construction, direct sums of GNS
representations, and the Gelfand-Naimark seminorm over a family of states.

A functional is stored by its values on the basis.  The Hilbert form it
induces on the algebra is ``<x, y> = phi(y* x) = y^H G x`` with Gram
matrix ``G[i, j] = phi(b_i* b_j)``.  The GNS space is the range of ``G``:
coordinates ``z = diag(sqrt(l)) V^H x`` over the eigenpairs of ``G``
above the rank threshold, which makes the induced inner product the
standard one on ``C^d``.
"""

from dataclasses import dataclass, field
from itertools import product

import numpy as np
import scipy.linalg

from . import linops, staralg
from .errors import GammaTooSmall, InvalidInput, NotAState, NotPositive, ZeroFunctional
from .linops import DEFAULT_TOL


@dataclass(frozen=True, eq=False)
class Functional:
    algebra: staralg.StarAlgebra
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != (self.algebra.dim,):
            raise InvalidInput("functional length does not match algebra dimension",
                               expected=self.algebra.dim, got=int(v.size))
        object.__setattr__(self, "values", v)

    def __call__(self, x):
        return complex(np.dot(self.values, np.asarray(x, dtype=complex)))

    def __add__(self, other):
        return Functional(self.algebra, self.values + other.values)

    def __rmul__(self, s):
        return Functional(self.algebra, s * self.values)


@dataclass(frozen=True, eq=False)
class Representation:
    """``mats[i]`` is the operator of basis element ``i`` on ``C^dim``."""

    algebra: staralg.StarAlgebra
    mats: np.ndarray

    @property
    def dim(self):
        return self.mats.shape[1]

    def __call__(self, x):
        return np.tensordot(np.asarray(x, dtype=complex), self.mats, axes=1)


def representation_defect(rep):
    """Largest violation of multiplicativity and *-preservation on the basis."""
    A = rep.algebra
    worst = 0.0
    for i, j in product(range(A.dim), repeat=2):
        worst = max(worst, linops.op_norm(rep.mats[i] @ rep.mats[j] - rep(A.mult[i, j])))
    for i in range(A.dim):
        worst = max(worst, linops.op_norm(rep.mats[i].conj().T - rep(A.star[:, i])))
    return worst


def gram_matrix(A, phi):
    values = phi.values if isinstance(phi, Functional) else np.asarray(phi, dtype=complex)
    # (b_i* b_j)_k = sum_p star[p, i] mult[p, j, k]
    prods = np.einsum("pi,pjk->ijk", A.star, A.mult)
    return prods @ values


@dataclass(frozen=True)
class FunctionalDiagnostics:
    positive: bool
    hermitian: bool
    variation: float
    min_gram_eigenvalue: float


def functional_diagnostics(A, phi, tol=DEFAULT_TOL, require_positive=False):
    """Positivity (Gram test), the Hermitian property, and the variation.

    The variation is ``phi(e)`` for unital ``A``, otherwise the squared
    length of the reproducing vector, or ``inf`` when none exists.
    """
    phi = phi if isinstance(phi, Functional) else Functional(A, phi)
    G = gram_matrix(A, phi)
    Gh = 0.5 * (G + G.conj().T)
    w = np.linalg.eigvalsh(Gh) if G.size else np.zeros(0)
    scale = max(1.0, float(np.max(np.abs(w))) if w.size else 0.0)
    skew = float(np.abs(G - G.conj().T).max()) if G.size else 0.0
    positive = bool((w.size == 0 or w.min() >= -tol * scale) and skew <= tol * scale)
    hermitian = bool(np.abs(A.star.T @ phi.values - np.conj(phi.values)).max() <= tol * max(1.0, np.abs(phi.values).max()))
    wmin = float(w.min()) if w.size else 0.0
    if not positive:
        if require_positive:
            raise NotPositive("functional is not positive", min_gram_eigenvalue=wmin)
        return FunctionalDiagnostics(False, hermitian, float("nan"), wmin)
    if A.unital:
        variation = float(phi(A.unit).real)
    else:
        J, _ = _quotient_map(G, tol)
        if J.shape[0] == 0:
            variation = 0.0 if np.abs(phi.values).max() <= tol else float("inf")
        else:
            c, res = _reproducing_vector(J, phi.values)
            ok = res <= max(tol, 1e-9) * max(1.0, np.abs(phi.values).max())
            variation = float(np.vdot(c, c).real) if ok else float("inf")
    return FunctionalDiagnostics(True, hermitian, variation, wmin)


def _quotient_map(G, tol):
    """``J`` (d x dim) with ``J^H J = G`` on the range, plus its right inverse."""
    Gh = 0.5 * (G + G.conj().T)
    w, V = np.linalg.eigh(Gh)
    lmax = float(w.max()) if w.size else 0.0
    if lmax <= 0:
        return np.zeros((0, G.shape[0]), dtype=complex), np.zeros((G.shape[0], 0), dtype=complex)
    keep = w > tol * lmax
    w, V = w[keep][::-1], V[:, keep][:, ::-1]
    J = (V * np.sqrt(w)).conj().T
    Jinv = V / np.sqrt(w)
    return J, Jinv


def _reproducing_vector(J, values):
    # phi(x) = <J x, c> = c^H J x  ->  J^H c = conj(phi)
    c, *_ = np.linalg.lstsq(J.conj().T, np.conj(values), rcond=None)
    res = float(np.linalg.norm(J.conj().T @ c - np.conj(values)))
    return c, res


@dataclass(frozen=True, eq=False)
class GnsResult:
    rep: Representation
    cyclic: np.ndarray
    gram: np.ndarray
    quotient_map: np.ndarray
    reproducing_residual: float = 0.0

    @property
    def quotient_dim(self):
        return self.rep.dim

    def vector(self, x):
        """The class of the algebra element ``x`` in the GNS space."""
        return self.quotient_map @ np.asarray(x, dtype=complex)


def gns_construct(A, phi, tol=DEFAULT_TOL):
    """GNS representation, cyclic (reproducing) vector and Gram matrix of ``phi``."""
    phi = phi if isinstance(phi, Functional) else Functional(A, phi)
    if np.abs(phi.values).max() == 0.0:
        raise ZeroFunctional("the zero functional has a zero GNS space")
    diag = functional_diagnostics(A, phi, tol)
    if not diag.positive:
        raise NotPositive("functional is not positive", min_gram_eigenvalue=diag.min_gram_eigenvalue)
    G = gram_matrix(A, phi)
    J, Jinv = _quotient_map(G, tol)
    if J.shape[0] == 0:
        raise ZeroFunctional("Gram matrix vanishes", min_gram_eigenvalue=diag.min_gram_eigenvalue)
    # left multiplication by b_i on A: L_i[k, j] = mult[i, j, k]
    L = np.transpose(A.mult, (0, 2, 1))
    mats = np.einsum("da,iab,be->ide", J, L, Jinv)
    if A.unital:
        c = J @ A.unit
        res = float(np.linalg.norm(J.conj().T @ c - np.conj(phi.values)))
    else:
        c, res = _reproducing_vector(J, phi.values)
    return GnsResult(
        rep=Representation(A, mats), cyclic=c, gram=G, quotient_map=J, reproducing_residual=res
    )


def vector_state(A, x):
    """``phi(a) = <a x, x>`` for an operator-tagged algebra."""
    if A.realization is None:
        raise InvalidInput("vector states need a matrix realization")
    x = np.asarray(x, dtype=complex)
    return Functional(A, np.einsum("i,kij,j->k", x.conj(), A.realization, x))


def trace_state(A):
    """Normalised trace ``tr(a)/n`` of an operator-tagged algebra on ``C^n``."""
    if A.realization is None:
        raise InvalidInput("the trace state needs a matrix realization")
    n = A.realization.shape[1]
    return Functional(A, np.trace(A.realization, axis1=1, axis2=2) / n)


def extend_to_unitisation(A, phi, gamma, tol=DEFAULT_TOL):
    """Extension of ``phi`` to the unitisation with ``phi(e) = gamma``."""
    if A.unital:
        raise InvalidInput("algebra is unital; nothing to extend")
    phi = phi if isinstance(phi, Functional) else Functional(A, phi)
    diag = functional_diagnostics(A, phi, tol)
    if not diag.positive:
        raise NotPositive("functional is not positive", min_gram_eigenvalue=diag.min_gram_eigenvalue)
    if not diag.hermitian:
        raise InvalidInput("functional is not Hermitian")
    v = diag.variation
    if not np.isfinite(v) or gamma < v - tol * max(1.0, v):
        raise GammaTooSmall(f"gamma = {gamma} is below the variation {v}", variation=v, gamma=float(gamma))
    At = staralg.unitise(A)
    ext = Functional(At, np.concatenate([phi.values, [gamma]]))
    if not functional_diagnostics(At, ext, max(tol, 1e-9)).positive:
        raise NotPositive("extension failed the Gram test")
    return ext


@dataclass(frozen=True, eq=False)
class UniversalRep:
    rep: Representation
    blocks: tuple = field(default=())
    cyclic_vectors: tuple = field(default=())


def universal_rep(A, states, tol=1e-9):
    """Direct sum of the GNS representations of a finite family of states."""
    parts = []
    for k, psi in enumerate(states):
        psi = psi if isinstance(psi, Functional) else Functional(A, psi)
        d = functional_diagnostics(A, psi, tol)
        if not d.positive or abs(d.variation - 1.0) > tol:
            raise NotAState(f"functional {k} is not a state", index=k, variation=d.variation, positive=d.positive)
        parts.append(gns_construct(A, psi))
    if not parts:
        return UniversalRep(Representation(A, np.zeros((A.dim, 0, 0), dtype=complex)))
    mats = np.array([scipy.linalg.block_diag(*[g.rep.mats[i] for g in parts]) for i in range(A.dim)])
    return UniversalRep(
        rep=Representation(A, mats),
        blocks=tuple(g.quotient_dim for g in parts),
        cyclic_vectors=tuple(g.cyclic for g in parts),
    )


def gn_seminorm(A, x, states):
    """``max_psi psi(x* x)^(1/2)`` over the family; 0 for an empty family."""
    x = np.asarray(x, dtype=complex)
    xx = staralg.multiply(A, staralg.star(A, x), x)
    best = 0.0
    for psi in states:
        psi = psi if isinstance(psi, Functional) else Functional(A, psi)
        best = max(best, float(max(psi(xx).real, 0.0)))
    return float(np.sqrt(best))


def universal_norm(A, x, states):
    """``|pi_u(x)|`` for the direct sum over the same family."""
    u = universal_rep(A, states)
    if u.rep.dim == 0:
        return 0.0
    return linops.op_norm(u.rep(x))


def canonical_states(A, x=None):
    """Vector states over a grid of unit vectors, plus the top eigenvector
    state of ``x* x`` when ``x`` is given.

    The grid holds the standard basis and the vectors
    ``(e_j + e_k)/sqrt 2`` and ``(e_j + i e_k)/sqrt 2``.  The eigenvector
    state makes the family attain the norm of ``x``.
    """
    if A.realization is None:
        raise InvalidInput("canonical states need a matrix realization")
    n = A.realization.shape[1]
    vecs = list(np.eye(n, dtype=complex))
    for j in range(n):
        for k in range(j + 1, n):
            for ph in (1.0, 1j):
                v = np.zeros(n, dtype=complex)
                v[j], v[k] = 1.0, ph
                vecs.append(v / np.sqrt(2))
    if x is not None:
        m = staralg.realize(A, x)
        w, V = np.linalg.eigh(m.conj().T @ m)
        vecs.append(V[:, -1])
    return [vector_state(A, v) for v in vecs]


@dataclass(frozen=True)
class Intertwiner:
    unitary: np.ndarray
    residual: float
    nullity: int


def intertwiner(rep1, c1, rep2, c2, tol=1e-9):
    """The unitary ``U`` with ``U pi1(a) c1 = pi2(a) c2`` for all ``a``.

    ``nullity`` is the dimension of the space of operators ``W`` with
    ``W pi1 = pi2 W`` and ``W c1 = 0``; it is 0 exactly when ``U`` is the
    only intertwiner sending ``c1`` to ``c2``.
    """
    X1 = np.stack([m @ c1 for m in rep1.mats], axis=1)
    X2 = np.stack([m @ c2 for m in rep2.mats], axis=1)
    U = X2 @ np.linalg.pinv(X1, rcond=tol)
    res = max(
        max(linops.op_norm(U @ a - b @ U) for a, b in zip(rep1.mats, rep2.mats)),
        float(np.linalg.norm(U @ c1 - c2)),
    )
    d1, d2 = rep1.dim, rep2.dim
    eye1, eye2 = np.eye(d1), np.eye(d2)
    # column-major vec: vec(W a) = (a^T kron I) vec W, vec(b W) = (I kron b) vec W
    rows = [np.kron(a.T, eye2) - np.kron(eye1, b) for a, b in zip(rep1.mats, rep2.mats)]
    rows.append(np.kron(c1.reshape(1, -1), eye2))
    system = np.vstack(rows)
    nullity = linops.nullspace(system, tol).shape[1]
    return Intertwiner(unitary=U, residual=res, nullity=nullity)
