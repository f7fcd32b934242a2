# cython: language_level=3
"""Compiled hot kernels: Sturm-sequence bisection and pair interaction sums.

Signatures and semantics match ``ltlab._pykernels``.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, pow, INFINITY
from libc.float cimport DBL_MIN

cnp.import_array()


cdef inline double _pivmin(const double[::1] off2) noexcept nogil:
    cdef Py_ssize_t i
    cdef double m = 0.0
    for i in range(off2.shape[0]):
        if off2[i] > m:
            m = off2[i]
    if m < 1.0:
        m = 1.0
    return DBL_MIN * m * 4.0


cdef Py_ssize_t _count(const double[::1] diag, const double[::1] off2,
                       double x, double pivmin) noexcept nogil:
    cdef Py_ssize_t i, n = diag.shape[0], c = 0
    cdef double q = diag[0] - x
    if fabs(q) < pivmin:
        q = -pivmin
    if q < 0:
        c += 1
    for i in range(1, n):
        q = (diag[i] - x) - off2[i - 1] / q
        if fabs(q) < pivmin:
            q = -pivmin
        if q < 0:
            c += 1
    return c


def pivot_floor(off2):
    cdef const double[::1] o = np.ascontiguousarray(off2, dtype=np.float64)
    return _pivmin(o)


def sturm_count(diag, off2, double x):
    cdef const double[::1] d = np.ascontiguousarray(diag, dtype=np.float64)
    cdef const double[::1] o = np.ascontiguousarray(off2, dtype=np.float64)
    return int(_count(d, o, x, _pivmin(o)))


def sturm_counts(diag, off2, xs):
    cdef const double[::1] d = np.ascontiguousarray(diag, dtype=np.float64)
    cdef const double[::1] o = np.ascontiguousarray(off2, dtype=np.float64)
    cdef const double[::1] x = np.ascontiguousarray(xs, dtype=np.float64).ravel()
    out = np.empty(x.shape[0], dtype=np.int64)
    cdef cnp.int64_t[::1] c = out
    cdef double pivmin = _pivmin(o)
    cdef Py_ssize_t k
    with nogil:
        for k in range(x.shape[0]):
            c[k] = _count(d, o, x[k], pivmin)
    return out.reshape(np.shape(xs))


def bisect_eigenvalues(diag, off2, Py_ssize_t k_first, Py_ssize_t k_last,
                       double lower, double upper, double rtol=4e-16, double atol=1e-300):
    cdef const double[::1] d = np.ascontiguousarray(diag, dtype=np.float64)
    cdef const double[::1] o = np.ascontiguousarray(off2, dtype=np.float64)
    cdef Py_ssize_t nk = k_last - k_first
    if nk < 0:
        nk = 0
    out = np.empty(nk, dtype=np.float64)
    cdef double[::1] ev = out
    cdef double pivmin = _pivmin(o)
    cdef Py_ssize_t j, k, it
    cdef double lo, hi, mid, tol, a
    with nogil:
        for j in range(nk):
            k = k_first + j
            lo = lower
            hi = upper
            for it in range(200):
                mid = 0.5 * (lo + hi)
                a = fabs(lo) if fabs(lo) > fabs(hi) else fabs(hi)
                tol = rtol * a
                if tol < atol:
                    tol = atol
                if hi - lo <= tol or mid <= lo or mid >= hi:
                    break
                if _count(d, o, mid, pivmin) > k:
                    hi = mid
                else:
                    lo = mid
            ev[j] = 0.5 * (lo + hi)
    return out


def pair_exclusion(points, cells, double s, double bound):
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None]
    cdef const double[:, ::1] p = np.ascontiguousarray(pts)
    cdef const cnp.int64_t[::1] c = np.ascontiguousarray(cells, dtype=np.int64)
    cdef Py_ssize_t n = p.shape[0], dim = p.shape[1], i, j, a
    cdef double lhs = 0.0, rhs = 0.0, slack = 0.0, r2, dx, t
    with nogil:
        for i in range(n):
            for j in range(i + 1, n):
                r2 = 0.0
                for a in range(dim):
                    dx = p[i, a] - p[j, a]
                    r2 += dx * dx
                if r2 > 0:
                    t = pow(r2, -s)
                else:
                    t = INFINITY
                lhs += t
                if c[i] == c[j]:
                    rhs += bound
                    slack += t - bound
                else:
                    slack += t
    return lhs, rhs, slack
