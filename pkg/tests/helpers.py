"""Random test objects shared by the suites."""

import numpy as np
import scipy.stats


def crandn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_unitary(rng, n):
    if n == 1:
        return np.exp(2j * np.pi * rng.uniform(size=(1, 1)))
    return scipy.stats.unitary_group.rvs(n, random_state=rng)


def random_hermitian(rng, n):
    a = crandn(rng, n, n)
    return 0.5 * (a + a.conj().T)


def random_normal(rng, n, values=None):
    q = random_unitary(rng, n)
    if values is None:
        values = crandn(rng, n)
    return (q * values) @ q.conj().T


def random_positive(rng, n):
    a = crandn(rng, n, n)
    return a.conj().T @ a


def random_density(rng, n):
    rho = random_positive(rng, n)
    return rho / np.trace(rho).real


def matrix_state_values(A, rho):
    """``phi(b_k) = tr(rho R_k)`` over the realization of ``A``."""
    return np.einsum("ij,kji->k", rho, A.realization)


def group_state_values(rng, n):
    """A random state on C[Z_n]: a convex combination of the characters
    ``tau_m(delta_k) = exp(2 pi i m k / n)``."""
    p = rng.dirichlet(np.ones(n))
    k = np.arange(n)
    chars = np.exp(2j * np.pi * np.outer(k, k) / n)
    return p @ chars


def dft_characters(n):
    k = np.arange(n)
    return np.exp(2j * np.pi * np.outer(k, k) / n)
