"""Dense complex matrix kernel.

Matrices are plain ``numpy`` complex arrays; everything here is a pure
function of its inputs.  The eigen-solvers are LAPACK (through numpy and
scipy): ``heev`` for Hermitian input, the complex Schur form for normal
input (so eigenvectors come out orthonormal even inside degenerate
clusters), and ``geev`` otherwise.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import InvalidShape, NoConvergence

DEFAULT_TOL = 1e-10


def as_cmat(m, square=False):
    """Coerce ``m`` to a 2-D complex array, checking the shape."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise InvalidShape("expected a 2-D matrix", shape=list(a.shape))
    if a.size == 0:
        raise InvalidShape("empty matrix", shape=list(a.shape))
    if square and a.shape[0] != a.shape[1]:
        raise InvalidShape("expected a square matrix", shape=list(a.shape))
    return a


def adjoint(m):
    return np.conj(np.asarray(m)).T


def identity(n):
    return np.eye(n, dtype=complex)


def op_norm(m):
    """Operator norm, i.e. the largest singular value."""
    a = as_cmat(m)
    return float(np.linalg.norm(a, 2))


def normality_defect(m):
    a = as_cmat(m, square=True)
    scale = float(np.max(np.abs(a))) if a.size else 0.0
    if scale == 0.0 or not np.isfinite(scale):
        return 0.0 if scale == 0.0 else float("inf")
    # work on a / scale so huge or tiny entries cannot overflow when squared
    b = a / scale
    return op_norm(b.conj().T @ b - b @ b.conj().T) * scale * scale


def is_normal(m, tol=DEFAULT_TOL):
    a = as_cmat(m, square=True)
    nrm = op_norm(a)
    return nrm == 0.0 or (normality_defect(a) / nrm) / nrm <= tol


def is_hermitian(m, tol=DEFAULT_TOL):
    a = as_cmat(m, square=True)
    return op_norm(a - a.conj().T) <= tol * max(op_norm(a), 1e-300)


def hermitian_part(m):
    a = np.asarray(m, dtype=complex)
    return 0.5 * (a + a.conj().T)


@dataclass(frozen=True)
class EigenDecomp:
    values: np.ndarray
    vectors: np.ndarray
    residual: float
    normal: bool

    def __iter__(self):
        yield self.values
        yield self.vectors


def sort_key_order(values, scale=1.0):
    """Indices ordering ``values`` lexicographically by (re, im).

    Real and imaginary parts are rounded at ``1e-9 * scale`` first, so that
    rounding noise does not reorder values that agree to that level.
    """
    values = np.asarray(values, dtype=complex)
    q = 1e-9 * max(scale, 1.0)
    re = np.round(values.real / q)
    im = np.round(values.imag / q)
    return np.lexsort((im, re))


def eig(m, tol=DEFAULT_TOL):
    """Eigen-decomposition with deterministic (re, im) ordering.

    ``residual`` is ``max_j |m v_j - l_j v_j| / |m|`` over unit eigenvectors.
    """
    a = as_cmat(m, square=True)
    if not np.all(np.isfinite(a)):
        raise NoConvergence("non-finite matrix entries")
    norm = op_norm(a)
    # compare defect / |a|^2 without forming |a|^2, which can overflow
    normal = norm == 0.0 or (normality_defect(a) / norm) / norm <= tol
    try:
        if op_norm(a - a.conj().T) <= tol * max(norm, 1e-300):
            w, v = np.linalg.eigh(hermitian_part(a))
            w = w.astype(complex)
        elif normal:
            t, v = scipy.linalg.schur(a, output="complex")
            w = np.diag(t).copy()
        else:
            w, v = np.linalg.eig(a)
            v = v / np.linalg.norm(v, axis=0, keepdims=True)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NoConvergence(str(exc)) from exc

    order = sort_key_order(w, norm)
    w = w[order]
    v = v[:, order]
    if norm == 0.0:
        residual = 0.0
    else:
        # residual of a / |a| so that huge entries cannot overflow
        residual = float(np.max(np.linalg.norm((a / norm) @ v - v * (w / norm), axis=0)))
    return EigenDecomp(values=w, vectors=v, residual=residual, normal=bool(normal))


def eigvals(m, tol=DEFAULT_TOL):
    return eig(m, tol).values


def singular_values(m):
    return np.linalg.svd(as_cmat(m), compute_uv=False)


def nullspace(m, tol=DEFAULT_TOL, floor=0.0):
    """Orthonormal basis (as columns) of the numerical kernel of ``m``.

    Singular values at or below ``tol * max(sigma_max, floor)`` count as
    zero; ``floor`` keeps a matrix made only of rounding noise from being
    read as full rank when its natural scale is known.
    """
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise InvalidShape("expected a 2-D matrix", shape=list(a.shape))
    rows, cols = a.shape
    if cols == 0:
        return np.zeros((0, 0), dtype=complex)
    if rows == 0:
        return identity(cols)
    _, s, vh = np.linalg.svd(a)
    smax = max(s[0] if s.size else 0.0, floor)
    if smax == 0.0:
        return identity(cols)
    rank = int(np.sum(s > tol * smax))
    return vh[rank:].conj().T.copy()


def rank(m, tol=DEFAULT_TOL):
    a = np.asarray(m, dtype=complex)
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.sum(s > tol * s[0]))


def range_basis(m, tol=DEFAULT_TOL):
    """Orthonormal basis (columns) of the column space of ``m``."""
    a = np.asarray(m, dtype=complex)
    if a.size == 0:
        return np.zeros((a.shape[0], 0), dtype=complex)
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    if s[0] == 0.0:
        return np.zeros((a.shape[0], 0), dtype=complex)
    return u[:, s > tol * s[0]].copy()


def cluster_values(values, gap):
    """Single-linkage clustering of complex numbers.

    Two values share a cluster when a chain of neighbours with pairwise
    distance ``<= gap`` connects them.  Returns a list of index arrays,
    ordered by the (re, im) order of each cluster's mean.
    """
    values = np.asarray(values, dtype=complex)
    n = values.size
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    dist = np.abs(values[:, None] - values[None, :])
    for i in range(n):
        for j in range(i + 1, n):
            if dist[i, j] <= gap:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    clusters = [np.array(g) for g in groups.values()]
    means = np.array([values[g].mean() for g in clusters])
    order = sort_key_order(means, float(np.max(np.abs(values))) if n else 1.0)
    return [clusters[k] for k in order]


def distinct_values(values, gap):
    """Cluster representatives (means) of ``values``, sorted."""
    values = np.asarray(values, dtype=complex)
    return np.array([values[g].mean() for g in cluster_values(values, gap)])


def matrix_power(m, k):
    return np.linalg.matrix_power(np.asarray(m, dtype=complex), k)


def subspace_angle(a, b):
    """Largest principal angle between the column spaces of ``a`` and ``b``."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape[1] == 0 and b.shape[1] == 0:
        return 0.0
    if a.shape[1] == 0 or b.shape[1] == 0:
        return float(np.pi / 2)
    return float(np.max(scipy.linalg.subspace_angles(a, b)))
