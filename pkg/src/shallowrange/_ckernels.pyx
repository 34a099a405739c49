# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled point-classification kernels (hot inner loops).

Must stay semantically identical to shallowrange._pykernels.
"""

import numpy as np

cimport numpy as cnp  # noqa: E999

BACKEND = "cython"

cdef double CCW_ERRBOUND_A = (3.0 + 16.0 * 2.0**-53) * 2.0**-53


def orient_det(double ax, double ay, double bx, double by, px, py):
    cdef double[::1] xs = np.ascontiguousarray(px, dtype=np.float64)
    cdef double[::1] ys = np.ascontiguousarray(py, dtype=np.float64)
    cdef Py_ssize_t n = xs.shape[0]
    det_arr = np.empty(n, dtype=np.float64)
    err_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] det = det_arr
    cdef double[::1] err = err_arr
    cdef Py_ssize_t i
    cdef double dl, dr
    for i in range(n):
        dl = (bx - ax) * (ys[i] - ay)
        dr = (by - ay) * (xs[i] - ax)
        det[i] = dl - dr
        err[i] = CCW_ERRBOUND_A * (abs(dl) + abs(dr))
    return det_arr, err_arr


def halfplane_mask(px, py, double a, double b, double c, double eps):
    cdef double[::1] xs = np.ascontiguousarray(px, dtype=np.float64)
    cdef double[::1] ys = np.ascontiguousarray(py, dtype=np.float64)
    cdef Py_ssize_t n = xs.shape[0]
    out_arr = np.empty(n, dtype=np.bool_)
    cdef cnp.uint8_t[::1] out = out_arr.view(np.uint8)
    cdef Py_ssize_t i
    for i in range(n):
        out[i] = a * xs[i] + b * ys[i] - c >= -eps
    return out_arr


def disk_mask(px, py, double cx, double cy, double r, double eps):
    cdef double[::1] xs = np.ascontiguousarray(px, dtype=np.float64)
    cdef double[::1] ys = np.ascontiguousarray(py, dtype=np.float64)
    cdef Py_ssize_t n = xs.shape[0]
    out_arr = np.empty(n, dtype=np.bool_)
    cdef cnp.uint8_t[::1] out = out_arr.view(np.uint8)
    cdef double rr = r + eps
    cdef double dx, dy
    cdef Py_ssize_t i
    rr = rr * rr
    for i in range(n):
        dx = xs[i] - cx
        dy = ys[i] - cy
        out[i] = dx * dx + dy * dy <= rr
    return out_arr
