"""Atomic spectral measures on finite point sets.

A resolution of the identity is a list of points with pairwise orthogonal
projections summing to the identity.  Every subset of points is an event,
so integrals are finite sums and the measure-theoretic statements turn
into identities about these sums.
"""

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import linops
from .errors import InvalidInput, MissingPoint, NotNormal
from .linops import DEFAULT_TOL


@dataclass(frozen=True, eq=False)
class ResolutionOfIdentity:
    points: tuple
    projections: tuple

    def __post_init__(self):
        if len(self.points) != len(self.projections):
            raise InvalidInput("points and projections differ in number")
        object.__setattr__(self, "points", tuple(self.points))
        object.__setattr__(self, "projections", tuple(np.asarray(p, dtype=complex) for p in self.projections))

    @property
    def dim(self):
        return self.projections[0].shape[0] if self.projections else 0

    def __len__(self):
        return len(self.points)

    def ranks(self):
        return [int(round(np.trace(p).real)) for p in self.projections]

    def measure(self, subset):
        """``P(D)`` for a set of point indices."""
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for i in subset:
            out = out + self.projections[i]
        return out

    def scalar_measure(self, x, y=None):
        """Weights ``<P_i x, y>`` of the complex measure ``<P x, y>``."""
        x = np.asarray(x, dtype=complex)
        y = x if y is None else np.asarray(y, dtype=complex)
        return np.array([np.vdot(y, p @ x) for p in self.projections])


def resolution_defect(P):
    """Worst violation among self-adjointness, idempotence, orthogonality
    and completeness."""
    n = P.dim
    worst = 0.0
    for p in P.projections:
        worst = max(worst, linops.op_norm(p - p.conj().T), linops.op_norm(p @ p - p))
    for p, q in combinations(P.projections, 2):
        worst = max(worst, linops.op_norm(p @ q))
    worst = max(worst, linops.op_norm(P.measure(range(len(P))) - np.eye(n)))
    return worst


def _lookup(f, point):
    if callable(f):
        return complex(f(point))
    try:
        return complex(f[point])
    except KeyError:
        raise MissingPoint(f"function undefined at {point!r}", label=repr(point)) from None


def integrate(P, f):
    """``pi_P(f) = sum_i f(point_i) P_i``; ``f`` is a callable or a mapping."""
    out = np.zeros((P.dim, P.dim), dtype=complex)
    for pt, p in zip(P.points, P.projections):
        out = out + _lookup(f, pt) * p
    return out


def spectral_resolution(b, tol=DEFAULT_TOL):
    """Eigenprojections of a normal matrix, grouped into spectral points.

    Eigenvalues are clustered by single linkage with gap
    ``max(tol |b|, 1e-8)``; each cluster's eigenvectors are
    re-orthonormalised before forming its projection.
    """
    b = linops.as_cmat(b, square=True)
    nrm = linops.op_norm(b)
    defect = linops.normality_defect(b)
    if defect > tol * max(nrm**2, 1e-300):
        raise NotNormal("matrix is not normal", defect=defect)
    w, V = linops.eig(b, tol)
    gap = max(tol * nrm, 1e-8)
    points, projs = [], []
    for idx in linops.cluster_values(w, gap):
        Q, _ = np.linalg.qr(V[:, idx])
        projs.append(Q @ Q.conj().T)
        points.append(complex(w[idx].mean()))
    return ResolutionOfIdentity(tuple(points), tuple(projs))


def borel_function(b, f, tol=DEFAULT_TOL):
    """``f(b) = pi_P(f)`` over the spectral resolution of the normal ``b``."""
    return integrate(spectral_resolution(b, tol), f)


def image_measure(P, f, tol=1e-9):
    """The image of ``P`` under the point map ``f``: preimages are merged.

    Image points closer than ``tol`` (relative to their size) are merged.
    Exact labels are kept when ``f`` returns non-numeric values.
    """
    vals = [f(pt) for pt in P.points]
    groups = []
    for k, v in enumerate(vals):
        for g in groups:
            if _same_point(g[0], v, tol):
                g[1].append(k)
                break
        else:
            groups.append((v, [k]))
    points = tuple(g[0] for g in groups)
    projs = tuple(P.measure(g[1]) for g in groups)
    return ResolutionOfIdentity(points, projs)


def _same_point(a, b, tol):
    if isinstance(a, (int, float, complex, np.number)) and isinstance(b, (int, float, complex, np.number)):
        return abs(complex(a) - complex(b)) <= tol * max(1.0, abs(complex(a)))
    return a == b


@dataclass(frozen=True)
class EigenAtom:
    is_eigenvalue: bool
    eigenprojection: np.ndarray


def eigen_atoms(b, lam, tol=DEFAULT_TOL):
    """``P({lam})``: nonzero exactly when ``lam`` is an eigenvalue."""
    P = spectral_resolution(b, tol)
    gap = max(tol * linops.op_norm(b), 1e-8)
    hits = [i for i, pt in enumerate(P.points) if abs(pt - lam) <= gap]
    proj = P.measure(hits)
    return EigenAtom(is_eigenvalue=bool(hits), eigenprojection=proj)


def null_set(P, f, tol=DEFAULT_TOL):
    """Indices of points where ``f`` vanishes; ``pi_P(f) = 0`` iff every
    point with a nonzero projection is among them."""
    return [i for i, pt in enumerate(P.points) if abs(_lookup(f, pt)) <= tol]
