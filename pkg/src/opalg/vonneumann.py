"""Commutants, bicommutants, cyclic and separating vectors, and the
diagonalisation of cyclic commutative representations.

Everything is exact linear algebra on ``M_n``.  A set of operators is
identified with its linear span; the commutant of ``{a_k}`` is the joint
kernel of ``X -> a_k X - X a_k``, solved once as a stacked
``(k n^2) x n^2`` system.  Bases are orthonormal in the trace inner
product ``<X, Y> = tr(Y^H X)``.
"""

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import gelfand, linops
from .errors import (
    InvalidShape,
    NoSeparatingVector,
    NotCommutative,
    NotCyclic,
    ZeroRepresentation,
    ZeroVector,
)
from .linops import DEFAULT_TOL

SEARCH_DRAWS = 64
DIAGONALISE_SEED = 20240607


@dataclass(frozen=True, eq=False)
class OperatorSet:
    carrier_dim: int
    mats: np.ndarray
    star_closed: bool = False

    def __post_init__(self):
        n = int(self.carrier_dim)
        m = np.asarray(self.mats, dtype=complex).reshape(-1, n, n) if n else np.zeros((0, 0, 0), complex)
        object.__setattr__(self, "carrier_dim", n)
        object.__setattr__(self, "mats", m)

    def __len__(self):
        return self.mats.shape[0]

    def __iter__(self):
        return iter(self.mats)


def as_operator_set(S, star_closed=False):
    """Accept an ``OperatorSet``, a representation (anything with ``mats``)
    or a sequence of square matrices of one size."""
    if isinstance(S, OperatorSet):
        return S
    mats = getattr(S, "mats", S)
    mats = [linops.as_cmat(m, square=True) for m in mats]
    if not mats:
        raise InvalidShape("cannot infer the carrier dimension of an empty set")
    n = mats[0].shape[0]
    if any(m.shape != (n, n) for m in mats):
        raise InvalidShape("operators act on spaces of different dimension")
    return OperatorSet(n, np.array(mats), star_closed)


def empty_set(n):
    return OperatorSet(n, np.zeros((0, n, n), dtype=complex))


def _with_adjoints(S):
    if not S.star_closed or len(S) == 0:
        return S.mats
    return np.concatenate([S.mats, S.mats.conj().transpose(0, 2, 1)])


def span_basis(mats, n, tol=DEFAULT_TOL):
    """Trace-orthonormal basis, shape ``(d, n, n)``, of the span of ``mats``."""
    mats = np.asarray(mats, dtype=complex).reshape(-1, n, n)
    if mats.shape[0] == 0:
        return np.zeros((0, n, n), dtype=complex)
    cols = linops.range_basis(mats.reshape(mats.shape[0], n * n).T, tol)
    return np.ascontiguousarray(cols.T.reshape(-1, n, n))


def commutant(S, tol=DEFAULT_TOL):
    """Basis of ``S'``.  Adjoints join the generators when ``S.star_closed``."""
    S = as_operator_set(S)
    n = S.carrier_dim
    gens = [a / linops.op_norm(a) for a in _with_adjoints(S) if linops.op_norm(a) > 0]
    if not gens:
        return OperatorSet(n, span_basis(np.eye(n * n), n), star_closed=True)
    eye = np.eye(n)
    # row-major vec: vec(a X) = (a kron I) vec X, vec(X a) = (I kron a^T) vec X
    system = np.vstack([np.kron(a, eye) - np.kron(eye, a.T) for a in gens])
    # generators have unit norm, so the system has scale at least ~1
    null = linops.nullspace(system, tol, floor=1.0)
    basis = null.T.reshape(-1, n, n)
    return OperatorSet(n, span_basis(basis, n), star_closed=S.star_closed)


def bicommutant(S, tol=DEFAULT_TOL):
    return commutant(commutant(S, tol), tol)


def generated_algebra(S, tol=1e-9, adjoints=True, unital=True):
    """Span of all words in the generators (and their adjoints, and ``1``)."""
    S = as_operator_set(S)
    n = S.carrier_dim
    gens = [a / linops.op_norm(a) for a in S.mats if linops.op_norm(a) > 0]
    if adjoints:
        gens = gens + [a.conj().T for a in gens]
    if unital:
        gens.append(np.eye(n, dtype=complex))
    B = span_basis(gens, n, tol)
    while True:
        words = [x @ g for x in B for g in gens]
        grown = span_basis(np.concatenate([B, np.array(words).reshape(-1, n, n)]), n, tol)
        if grown.shape[0] == B.shape[0]:
            return OperatorSet(n, B, star_closed=adjoints)
        B = grown


def span_angle(S1, S2):
    """Largest principal angle between two spans; ``pi/2`` if dimensions differ."""
    S1, S2 = as_operator_set(S1), as_operator_set(S2)
    n = S1.carrier_dim
    a = S1.mats.reshape(len(S1), n * n).T
    b = S2.mats.reshape(len(S2), n * n).T
    a = linops.range_basis(a) if a.size else a
    b = linops.range_basis(b) if b.size else b
    if a.shape[1] != b.shape[1]:
        return float(np.pi / 2)
    return linops.subspace_angle(a, b)


def same_span(S1, S2, tol=1e-8):
    return span_angle(S1, S2) <= tol


def span_distance(S, x):
    """Distance (Frobenius, relative to ``|x|``) from ``x`` to the span of ``S``."""
    S = as_operator_set(S)
    x = np.asarray(x, dtype=complex).ravel()
    B = span_basis(S.mats, S.carrier_dim).reshape(-1, x.size)
    resid = x - B.T @ (B.conj() @ x)
    return float(np.linalg.norm(resid) / max(np.linalg.norm(x), 1e-300))


def in_span(S, x, tol=1e-8):
    return span_distance(S, x) <= tol


def is_algebra(S, tol=1e-8):
    """Products of basis elements stay in the span."""
    S = as_operator_set(S)
    B = span_basis(S.mats, S.carrier_dim)
    return all(in_span(S, x @ y, tol) for x in B for y in B)


def commutes_pairwise(mats, tol=1e-9):
    """First non-commuting pair of indices, or ``None``."""
    for i, j in combinations(range(len(mats)), 2):
        a, b = mats[i], mats[j]
        scale = max(linops.op_norm(a) * linops.op_norm(b), 1e-300)
        if linops.op_norm(a @ b - b @ a) > tol * scale:
            return (i, j)
    return None


def irreducibility_report(pi, tol=DEFAULT_TOL):
    """Schur's test: irreducible iff the commutant is one-dimensional."""
    S = as_operator_set(pi, star_closed=True)
    if S.carrier_dim == 0 or len(S) == 0 or max(linops.op_norm(a) for a in S.mats) == 0.0:
        raise ZeroRepresentation("representation is zero")
    C = commutant(OperatorSet(S.carrier_dim, S.mats, star_closed=True), tol)
    return {
        "irreducible": len(C) == 1,
        "commutant_dim": len(C),
        "multiplicity_free": commutes_pairwise(C.mats, max(tol, 1e-9)) is None,
    }


def _orbit(S, x, tol, unital):
    B = span_basis(S.mats, S.carrier_dim, tol)
    if unital:
        B = span_basis(np.concatenate([B, np.eye(S.carrier_dim)[None]]), S.carrier_dim, tol)
    return B, np.array([b @ x for b in B]).reshape(len(B), -1).T


def vector_report(S, x, tol=1e-9, unital=False):
    """Cyclic: the orbit ``span(S) x`` is everything.  Separating: ``a x = 0``
    forces ``a = 0`` on the span.  With ``unital`` the identity joins ``S``."""
    S = as_operator_set(S)
    x = np.asarray(x, dtype=complex)
    nx = float(np.linalg.norm(x))
    if nx == 0.0:
        raise ZeroVector("vector is zero")
    x = x / nx
    B, orbit = _orbit(S, x, tol, unital)
    if len(B) == 0:
        return {"cyclic": False, "separating": True, "separation_margin": float("inf")}
    s = np.linalg.svd(orbit, compute_uv=False)
    cyclic = int(np.sum(s > tol)) == S.carrier_dim
    # the orbit map a -> a x on trace-normalised coordinates is injective
    margin = float(s[-1]) if len(B) <= S.carrier_dim else 0.0
    return {"cyclic": bool(cyclic), "separating": margin > tol, "separation_margin": margin}


def find_separating_vector(S, seed=0, tol=1e-9, draws=SEARCH_DRAWS):
    """Deterministic candidates first, then ``draws`` seeded random vectors.

    Returns ``(x, margin)``; ``margin`` is the smallest singular value of
    ``a -> a x`` over the trace-orthonormal basis, the certificate.
    """
    S = as_operator_set(S)
    n = S.carrier_dim
    cands = [np.ones(n, dtype=complex), np.arange(1, n + 1, dtype=complex)]
    rng = np.random.default_rng(seed)
    cands += [rng.standard_normal(n) + 1j * rng.standard_normal(n) for _ in range(draws)]
    for x in cands:
        x = x / np.linalg.norm(x)
        rep = vector_report(S, x, tol)
        if rep["separating"]:
            return x, rep["separation_margin"]
    raise NoSeparatingVector("no separating vector found", draws=draws, seed=seed)


@dataclass(frozen=True, eq=False)
class DiagonalisationResult:
    measure: list
    weights: np.ndarray
    unitary: np.ndarray
    characters: gelfand.CharacterTable
    projections: tuple
    intertwining_residual: float

    def multiplication(self, j):
        """``M(a_j^)``: diagonal multiplication operator of generator ``j``."""
        return np.diag(self.characters.characters[:, j])


def diagonalise_cyclic(pi, c, tol=1e-9, seed=DIAGONALISE_SEED):
    """Unitary ``U`` onto ``L^2(mu)`` with ``U pi(a) = M(a^) U``.

    The minimal projections ``P_i`` of the algebra generated by the range
    come from the spectral resolution of a random normal element of it.
    Row ``i`` of ``U`` is ``(P_i c)^H / |P_i c|``, so ``U pi(a) c`` has
    entries ``a^(i) sqrt(mu_i)`` in the orthonormal basis of ``L^2(mu)``.
    """
    from .specmeasure import spectral_resolution

    S = as_operator_set(pi)
    n = S.carrier_dim
    pair = commutes_pairwise(S.mats, tol)
    if pair is not None:
        raise NotCommutative("range of the representation is not commutative", pair=list(pair))
    c = np.asarray(c, dtype=complex)
    if np.linalg.norm(c) == 0.0:
        raise ZeroVector("vector is zero")
    c = c / np.linalg.norm(c)
    closure = generated_algebra(S, tol)
    if not vector_report(closure, c, tol)["cyclic"]:
        raise NotCyclic("vector is not cyclic")
    rng = np.random.default_rng(seed)
    coef = rng.standard_normal(len(closure)) + 1j * rng.standard_normal(len(closure))
    h = np.tensordot(coef, closure.mats, axes=1)
    P = spectral_resolution(h, tol=max(tol, 1e-10))
    projs, rows, weights = [], [], []
    for p in P.projections:
        pc = p @ c
        mu = float(np.vdot(pc, pc).real)
        if mu <= tol:
            continue
        projs.append(p)
        weights.append(mu)
        rows.append(pc.conj() / np.sqrt(mu))
    table = np.array([[np.trace(p @ a) / np.trace(p).real for a in S.mats] for p in projs])
    order = _atom_order(table, projs)
    table = table[order]
    projs = [projs[k] for k in order]
    weights = np.array([weights[k] for k in order])
    U = np.array([rows[k] for k in order])
    resid = max(
        (linops.op_norm(U @ a - np.diag(table[:, j]) @ U) for j, a in enumerate(S.mats)),
        default=0.0,
    )
    chars = gelfand.CharacterTable(characters=table, multiplicativity_residual=0.0)
    return DiagonalisationResult(
        measure=[(i, float(w)) for i, w in enumerate(weights)],
        weights=weights,
        unitary=U,
        characters=chars,
        projections=tuple(projs),
        intertwining_residual=float(resid),
    )


def _atom_order(table, projs):
    # atoms ordered by where they live in the carrier, then by character value
    keys = []
    for k in reversed(range(table.shape[1])):
        keys.append(np.round(table[:, k].imag, 9))
        keys.append(np.round(table[:, k].real, 9))
    keys.append(np.array([int(np.argmax(np.diag(p).real > 1e-6)) for p in projs]))
    return np.lexsort(keys)
