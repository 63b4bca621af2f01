"""Pure-Python kernels backed by LAPACK through numpy.

Same signatures as the compiled ``_jacobi`` module. The ``tol`` arguments
are accepted for compatibility and ignored.
"""

import numpy as np


def eigvalsh(h, tol=1e-14):
    """Ascending eigenvalues of one Hermitian matrix."""
    h = np.asarray(h, dtype=np.complex128)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError("matrix must be square")
    return np.linalg.eigvalsh(h)


def min_eigenvalues(mats, tol=1e-14):
    """Minimum eigenvalue of each matrix in a stack of shape (K, d, d)."""
    mats = np.asarray(mats, dtype=np.complex128)
    if mats.ndim != 3 or mats.shape[1] != mats.shape[2]:
        raise ValueError("matrices must be square")
    if mats.shape[0] == 0:
        return np.empty(0)
    return np.linalg.eigvalsh(mats)[:, 0]


def directional_min_eigenvalues(vectors, generators, tol=1e-14):
    """Minimum eigenvalue of ``sum_a v[a] * generators[a]`` for each row ``v``."""
    vectors = np.asarray(vectors, dtype=np.float64)
    generators = np.asarray(generators, dtype=np.complex128)
    if generators.shape[0] != vectors.shape[1] or generators.shape[1] != generators.shape[2]:
        raise ValueError("vectors and generators disagree in shape")
    mats = np.tensordot(vectors, generators, axes=(1, 0))
    return min_eigenvalues(mats)
