# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled float kernels for the objective and the subgradient method.

Same signatures and results as ``_kernels_py``; the subgradient selection
uses ``sgn(0) = 0`` so exact global minima are fixed points.
"""

import numpy as np

from libc.math cimport fabs, pow


cdef inline double _sgn(double r) noexcept nogil:
    if r > 0:
        return 1.0
    if r < 0:
        return -1.0
    return 0.0


cdef double _f(const double[::1] x, const double[::1] y, const double[:, ::1] M) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef double s = 0.0
    for i in range(x.shape[0]):
        for j in range(y.shape[0]):
            s += fabs(x[i] * y[j] - M[i, j])
    return s


def f_value(const double[::1] x, const double[::1] y, const double[:, ::1] M):
    return _f(x, y, M)


def fp_value(const double[::1] x, const double[::1] y, const double[:, ::1] M, double power):
    cdef Py_ssize_t i, j
    cdef double s = 0.0
    for i in range(x.shape[0]):
        for j in range(y.shape[0]):
            s += pow(fabs(x[i] * y[j] - M[i, j]), power)
    return s


cdef void _subgrad(const double[::1] x, const double[::1] y, const double[:, ::1] M,
                   double[::1] gx, double[::1] gy) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef double s
    gx[:] = 0.0
    gy[:] = 0.0
    for i in range(x.shape[0]):
        for j in range(y.shape[0]):
            s = _sgn(x[i] * y[j] - M[i, j])
            gx[i] += s * y[j]
            gy[j] += s * x[i]


def subgradient(const double[::1] x, const double[::1] y, const double[:, ::1] M):
    gx = np.zeros(x.shape[0])
    gy = np.zeros(y.shape[0])
    _subgrad(x, y, M, gx, gy)
    return gx, gy


def subgradient_path(const double[::1] x0, const double[::1] y0, const double[:, ::1] M,
                     double c, bint diminishing, Py_ssize_t iters):
    cdef Py_ssize_t m = x0.shape[0], n = y0.shape[0]
    cdef Py_ssize_t k, i, j
    cdef double step
    path_arr = np.empty((iters + 1, m + n))
    f_arr = np.empty(iters + 1)
    cdef double[:, ::1] path = path_arr
    cdef double[::1] fvals = f_arr
    cdef double[::1] x = np.array(x0, dtype=np.float64)
    cdef double[::1] y = np.array(y0, dtype=np.float64)
    cdef double[::1] gx = np.zeros(m)
    cdef double[::1] gy = np.zeros(n)
    with nogil:
        for k in range(iters + 1):
            for i in range(m):
                path[k, i] = x[i]
            for j in range(n):
                path[k, m + j] = y[j]
            fvals[k] = _f(x, y, M)
            if k == iters:
                break
            step = c / (k + 1) if diminishing else c
            _subgrad(x, y, M, gx, gy)
            for i in range(m):
                x[i] -= step * gx[i]
            for j in range(n):
                y[j] -= step * gy[j]
    return path_arr, f_arr


def grid_values(const double[:, ::1] pts, Py_ssize_t m, const double[:, ::1] M):
    cdef Py_ssize_t N = pts.shape[0], n = pts.shape[1] - m
    cdef Py_ssize_t p, i, j
    cdef double s
    out_arr = np.empty(N)
    cdef double[::1] out = out_arr
    with nogil:
        for p in range(N):
            s = 0.0
            for i in range(m):
                for j in range(n):
                    s += fabs(pts[p, i] * pts[p, m + j] - M[i, j])
            out[p] = s
    return out_arr
