# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled evaluation kernels (drop-in for vemlab.kernels._fallback)."""

import numpy as np

cimport numpy as cnp

cnp.import_array()

def monomial_vandermonde(pts, center, double diameter, exps):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] p = np.ascontiguousarray(pts, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=2] e = np.ascontiguousarray(exps, dtype=np.int64)
    cdef double xc = center[0], yc = center[1]
    cdef Py_ssize_t n = p.shape[0], m = e.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((n, m))
    cdef double xp[33]
    cdef double yp[33]
    cdef Py_ssize_t i, j, d
    cdef int deg = 0
    for j in range(m):
        if e[j, 0] > deg:
            deg = <int> e[j, 0]
        if e[j, 1] > deg:
            deg = <int> e[j, 1]
    if deg > 32:
        raise ValueError("degree too large for compiled kernel")
    cdef double xi, eta
    for i in range(n):
        xi = (p[i, 0] - xc) / diameter
        eta = (p[i, 1] - yc) / diameter
        xp[0] = 1.0
        yp[0] = 1.0
        for d in range(1, deg + 1):
            xp[d] = xp[d - 1] * xi
            yp[d] = yp[d - 1] * eta
        for j in range(m):
            out[i, j] = xp[e[j, 0]] * yp[e[j, 1]]
    return out


def monomial_vandermonde_grad(pts, center, double diameter, exps):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] p = np.ascontiguousarray(pts, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=2] e = np.ascontiguousarray(exps, dtype=np.int64)
    cdef double xc = center[0], yc = center[1]
    cdef Py_ssize_t n = p.shape[0], m = e.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] gx = np.empty((n, m))
    cdef cnp.ndarray[cnp.float64_t, ndim=2] gy = np.empty((n, m))
    cdef double xp[33]
    cdef double yp[33]
    cdef Py_ssize_t i, j, d
    cdef int deg = 0
    for j in range(m):
        if e[j, 0] > deg:
            deg = <int> e[j, 0]
        if e[j, 1] > deg:
            deg = <int> e[j, 1]
    if deg > 32:
        raise ValueError("degree too large for compiled kernel")
    cdef double xi, eta
    cdef cnp.int64_t ax, ay
    for i in range(n):
        xi = (p[i, 0] - xc) / diameter
        eta = (p[i, 1] - yc) / diameter
        xp[0] = 1.0
        yp[0] = 1.0
        for d in range(1, deg + 1):
            xp[d] = xp[d - 1] * xi
            yp[d] = yp[d - 1] * eta
        for j in range(m):
            ax = e[j, 0]
            ay = e[j, 1]
            gx[i, j] = 0.0 if ax == 0 else ax * xp[ax - 1] * yp[ay] / diameter
            gy[i, j] = 0.0 if ay == 0 else ay * xp[ax] * yp[ay - 1] / diameter
    return gx, gy
