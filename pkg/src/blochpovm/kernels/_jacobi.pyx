# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled eigenvalue kernels for small dense Hermitian matrices.

Cyclic Jacobi: for each off-diagonal pivot ``a_pq = |a_pq| e^(i phi)`` the
column and row ``q`` are first rotated by the phase so the pivot becomes
real, then a real plane rotation annihilates it.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, hypot

cnp.import_array()

cdef int MAX_SWEEPS = 100


cdef int _jacobi_herm(double complex* m, Py_ssize_t n, double tol) noexcept nogil:
    """Diagonalise the row-major Hermitian n x n matrix in place.

    Returns the number of sweeps used. Stops once the off-diagonal
    Frobenius mass drops below ``tol`` times the matrix Frobenius norm.
    """
    # interleaved (re, im) view; entry (i, j) sits at 2 * (i * n + j)
    cdef double* a = <double*> m
    cdef Py_ssize_t p, q, k, ip, iq
    cdef int sweep
    cdef double off, total, apq, theta, t, c, s, thresh, re, im, cr, ci, xr, xi, yr, yi

    total = 0.0
    for k in range(2 * n * n):
        total += a[k] * a[k]
    if total == 0.0:
        return 0
    thresh = tol * tol * total

    for sweep in range(MAX_SWEEPS):
        off = 0.0
        for p in range(n):
            for q in range(p + 1, n):
                ip = 2 * (p * n + q)
                off += 2.0 * (a[ip] * a[ip] + a[ip + 1] * a[ip + 1])
        if off <= thresh:
            return sweep
        for p in range(n - 1):
            for q in range(p + 1, n):
                ip = 2 * (p * n + q)
                re = a[ip]
                im = a[ip + 1]
                if re == 0.0 and im == 0.0:
                    continue
                if im == 0.0:
                    # already real; keep the sign
                    apq = re
                else:
                    apq = hypot(re, im)
                    # make the pivot real: column q times e^(-i phi), row q times e^(i phi)
                    cr = re / apq
                    ci = im / apq
                    for k in range(n):
                        iq = 2 * (k * n + q)
                        xr = a[iq]
                        xi = a[iq + 1]
                        a[iq] = xr * cr + xi * ci
                        a[iq + 1] = xi * cr - xr * ci
                    for k in range(n):
                        iq = 2 * (q * n + k)
                        xr = a[iq]
                        xi = a[iq + 1]
                        a[iq] = xr * cr - xi * ci
                        a[iq + 1] = xi * cr + xr * ci
                theta = (a[2 * (q * n + q)] - a[2 * (p * n + p)]) / (2.0 * apq)
                if theta >= 0.0:
                    t = 1.0 / (theta + sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (-theta + sqrt(theta * theta + 1.0))
                c = 1.0 / sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    ip = 2 * (k * n + p)
                    iq = 2 * (k * n + q)
                    xr = a[ip]
                    xi = a[ip + 1]
                    yr = a[iq]
                    yi = a[iq + 1]
                    a[ip] = c * xr - s * yr
                    a[ip + 1] = c * xi - s * yi
                    a[iq] = s * xr + c * yr
                    a[iq + 1] = s * xi + c * yi
                for k in range(n):
                    ip = 2 * (p * n + k)
                    iq = 2 * (q * n + k)
                    xr = a[ip]
                    xi = a[ip + 1]
                    yr = a[iq]
                    yi = a[iq + 1]
                    a[ip] = c * xr - s * yr
                    a[ip + 1] = c * xi - s * yi
                    a[iq] = s * xr + c * yr
                    a[iq + 1] = s * xi + c * yi
                ip = 2 * (p * n + q)
                iq = 2 * (q * n + p)
                a[ip] = 0.0
                a[ip + 1] = 0.0
                a[iq] = 0.0
                a[iq + 1] = 0.0
    return MAX_SWEEPS


cdef double _min_diag(const double complex* a, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t k
    cdef double m = a[0].real
    for k in range(1, n):
        if a[k * n + k].real < m:
            m = a[k * n + k].real
    return m


def eigvalsh(h, double tol=1e-14):
    """Ascending eigenvalues of one Hermitian matrix."""
    cdef cnp.ndarray[cnp.complex128_t, ndim=2, mode="c"] work = np.array(h, dtype=np.complex128, order="C")
    cdef Py_ssize_t d = work.shape[0]
    if work.shape[1] != d:
        raise ValueError("matrix must be square")
    _jacobi_herm(<double complex*> work.data, d, tol)
    return np.sort(np.diagonal(work).real.copy())


def min_eigenvalues(mats, double tol=1e-14):
    """Minimum eigenvalue of each matrix in a stack of shape (K, d, d)."""
    cdef cnp.ndarray[cnp.complex128_t, ndim=3, mode="c"] work = np.array(mats, dtype=np.complex128, order="C")
    cdef Py_ssize_t K = work.shape[0], d = work.shape[1], i
    if work.shape[2] != d:
        raise ValueError("matrices must be square")
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(K)
    cdef double complex* base = <double complex*> work.data
    with nogil:
        for i in range(K):
            _jacobi_herm(base + i * d * d, d, tol)
            out[i] = _min_diag(base + i * d * d, d)
    return out


# read-only generator stacks -> nonzero pattern; the stored reference pins the id
_PATTERNS = {}


def _sparse_pattern(generators, Py_ssize_t m):
    key = id(generators)
    hit = _PATTERNS.get(key)
    if hit is not None and hit[0] is generators:
        return hit[1]
    g = np.asarray(generators, dtype=np.complex128)
    if g.ndim != 3 or g.shape[1] != g.shape[2] or g.shape[0] != m:
        raise ValueError("vectors and generators disagree in shape")
    d = g.shape[1]
    gen_idx, row, col = np.nonzero(g)
    vals = g[gen_idx, row, col]
    pattern = (
        np.ascontiguousarray(gen_idx, dtype=np.intp),
        np.ascontiguousarray(row * d + col, dtype=np.intp),
        np.ascontiguousarray(vals.real),
        np.ascontiguousarray(vals.imag),
        d,
    )
    if isinstance(generators, np.ndarray) and not generators.flags.writeable:
        if len(_PATTERNS) > 64:
            _PATTERNS.clear()
        _PATTERNS[key] = (generators, pattern)
    return pattern


def directional_min_eigenvalues(vectors, generators, double tol=1e-14):
    """Minimum eigenvalue of ``sum_a v[a] * generators[a]`` for each row ``v``.

    ``vectors`` has shape (N, m) and ``generators`` shape (m, d, d). The sum is
    assembled from the nonzero generator entries only.
    """
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] vc = np.ascontiguousarray(vectors, dtype=np.float64)
    nz_gen, nz_pos, nz_re, nz_im, dim = _sparse_pattern(generators, vc.shape[1])
    cdef Py_ssize_t N = vc.shape[0], m = vc.shape[1], d = dim
    cdef cnp.intp_t[::1] gen_v = nz_gen
    cdef cnp.intp_t[::1] pos_v = nz_pos
    cdef double[::1] re_v = nz_re
    cdef double[::1] im_v = nz_im
    cdef Py_ssize_t nnz = gen_v.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(N)
    cdef cnp.ndarray[cnp.complex128_t, ndim=2, mode="c"] hbuf = np.empty((d, d), dtype=np.complex128)
    cdef double* h = <double*> hbuf.data
    cdef double* v = <double*> vc.data
    cdef Py_ssize_t i, j, k, pos
    cdef double coef
    with nogil:
        for i in range(N):
            for k in range(2 * d * d):
                h[k] = 0.0
            for j in range(nnz):
                coef = v[i * m + gen_v[j]]
                pos = 2 * pos_v[j]
                h[pos] += coef * re_v[j]
                h[pos + 1] += coef * im_v[j]
            _jacobi_herm(<double complex*> h, d, tol)
            out[i] = _min_diag(<double complex*> h, d)
    return out
