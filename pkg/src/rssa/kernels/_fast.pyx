# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled per-tick hot kernels; mirrors _numpy_backend exactly."""
import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()


def family_lie(cnp.ndarray[cnp.float64_t, ndim=2] samples,
               double cos_t2, double sin_t2,
               double td1, double td2, double v1, double v2,
               double k1, double base):
    cdef Py_ssize_t n = samples.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] lf = np.empty(n)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] lg = np.empty((n, 2))
    cdef Py_ssize_t i
    cdef double xi1, xi2, xi3, m11, m12, m22, det, w1, w2, h1, h2
    for i in range(n):
        xi1 = samples[i, 0]
        xi2 = samples[i, 1]
        xi3 = samples[i, 2]
        m11 = xi1 + 2.0 * xi3 * cos_t2
        m12 = xi2 + xi3 * cos_t2
        m22 = xi2
        det = m11 * m22 - m12 * m12
        w1 = k1 * (v1 * m22 - v2 * m12) / det
        w2 = k1 * (v2 * m11 - v1 * m12) / det
        h1 = xi3 * sin_t2 * (-2.0 * td1 * td2 - td2 * td2)
        h2 = xi3 * sin_t2 * td1 * td1
        lg[i, 0] = w1
        lg[i, 1] = w2
        lf[i] = base - (w1 * h1 + w2 * h2)
    return lf, lg


def solve_g_star(cnp.ndarray[cnp.float64_t, ndim=2] lg):
    cdef Py_ssize_t n = lg.shape[0]
    cdef Py_ssize_t i, j
    cdef double best_score = -1e308
    cdef Py_ssize_t best_idx = -1
    cdef double best_alpha = 0.0
    cdef double norm_i, dot, inner_min, score
    for i in range(n):
        norm_i = sqrt(lg[i, 0] * lg[i, 0] + lg[i, 1] * lg[i, 1])
        if norm_i == 0.0:
            continue
        inner_min = 1e308
        for j in range(n):
            dot = lg[i, 0] * lg[j, 0] + lg[i, 1] * lg[j, 1]
            if dot < inner_min:
                inner_min = dot
        score = inner_min / norm_i
        if score > best_score:
            best_score = score
            best_idx = i
            best_alpha = inner_min
    if best_idx < 0:
        raise ValueError("all family members have zero control authority")
    return best_idx, best_alpha


def feasibility_bounds(cnp.ndarray[cnp.float64_t, ndim=2] lg):
    cdef Py_ssize_t n = lg.shape[0]
    cdef Py_ssize_t i, j
    cdef double beta = 1e308
    cdef double alpha = 1.0
    cdef double ni, nj, dot, cosij
    for i in range(n):
        ni = sqrt(lg[i, 0] * lg[i, 0] + lg[i, 1] * lg[i, 1])
        if ni < beta:
            beta = ni
    if beta == 0.0:
        return -1.0, 0.0
    for i in range(n):
        ni = sqrt(lg[i, 0] * lg[i, 0] + lg[i, 1] * lg[i, 1])
        for j in range(i + 1, n):
            nj = sqrt(lg[j, 0] * lg[j, 0] + lg[j, 1] * lg[j, 1])
            dot = lg[i, 0] * lg[j, 0] + lg[i, 1] * lg[j, 1]
            cosij = dot / (ni * nj)
            if cosij < alpha:
                alpha = cosij
    if alpha > 1.0:
        alpha = 1.0
    return alpha, beta
