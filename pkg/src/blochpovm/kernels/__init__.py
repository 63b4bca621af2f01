"""Eigenvalue kernels with a compiled core and a pure-Python fallback.

The compiled Cython module is used when it imports; setting the environment
variable ``BLOCHPOVM_PURE_PYTHON=1`` forces the fallback. ``BACKEND`` names
the implementation in use.

Jacobi sweeps cost O(d^3) per matrix with a larger constant than LAPACK's
tridiagonal solver, so the compiled path only handles ``d <= JACOBI_MAX_DIM``
and larger matrices go to LAPACK (see ``benchmarks/bench_kernels.py``).
"""

import os

import numpy as np

from . import _fallback

try:
    from . import _jacobi
except ImportError:  # extension not built
    _jacobi = None

if _jacobi is not None and not os.environ.get("BLOCHPOVM_PURE_PYTHON"):
    _impl = _jacobi
    BACKEND = "cython"
else:
    _impl = _fallback
    BACKEND = "python"

JACOBI_MAX_DIM = 4


def _pick(d):
    return _impl if d <= JACOBI_MAX_DIM else _fallback


def eigvalsh(h):
    """Ascending eigenvalues of one Hermitian matrix."""
    return _pick(len(h)).eigvalsh(h)


def min_eigenvalues(mats):
    """Minimum eigenvalue of each matrix in a stack of shape (K, d, d)."""
    mats = np.asarray(mats)
    return _pick(mats.shape[-1]).min_eigenvalues(mats)


def directional_min_eigenvalues(vectors, generators):
    """Minimum eigenvalue of ``sum_a v[a] * generators[a]`` for each row ``v``."""
    return _pick(np.shape(generators)[-1]).directional_min_eigenvalues(vectors, generators)


def available_backends():
    """Map backend name to kernel module for every importable implementation."""
    found = {"python": _fallback}
    if _jacobi is not None:
        found["cython"] = _jacobi
    return found


__all__ = [
    "BACKEND",
    "JACOBI_MAX_DIM",
    "available_backends",
    "directional_min_eigenvalues",
    "eigvalsh",
    "min_eigenvalues",
]
