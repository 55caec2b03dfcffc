# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels; see ``_pykernels`` for the contracts."""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, pow, fmax, INFINITY

cnp.import_array()


def weighted_power_sum(stack, weights, double q):
    cdef double[:, ::1] s = np.ascontiguousarray(stack, dtype=np.float64)
    cdef double[::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef Py_ssize_t K = s.shape[0], P = s.shape[1], k, j
    out_arr = np.zeros(P)
    cdef double[::1] out = out_arr
    cdef double v
    if q == INFINITY:
        for j in range(P):
            out[j] = w[0] * s[0, j] if K > 0 else 0.0
        for k in range(1, K):
            v = w[k]
            for j in range(P):
                out[j] = fmax(out[j], v * s[k, j])
    elif q == 1.0:
        for k in range(K):
            for j in range(P):
                out[j] += w[k] * s[k, j]
    elif q == 2.0:
        for k in range(K):
            for j in range(P):
                out[j] += w[k] * s[k, j] * s[k, j]
    else:
        for k in range(K):
            for j in range(P):
                out[j] += w[k] * pow(s[k, j], q)
    return out_arr


def duhamel_trapezoid(decay, source, double h):
    cdef double[::1] E = np.ascontiguousarray(decay, dtype=np.float64)
    cdef double complex[:, ::1] N = np.ascontiguousarray(source, dtype=np.complex128)
    cdef Py_ssize_t M1 = N.shape[0], P = N.shape[1], i, j
    out_arr = np.empty((M1, P), dtype=np.complex128)
    cdef double complex[:, ::1] out = out_arr
    acc_arr = np.empty(P, dtype=np.complex128)
    cdef double complex[::1] acc = acc_arr
    for j in range(P):
        acc[j] = 0.5 * N[0, j]
        out[0, j] = 0.0
    for i in range(1, M1):
        for j in range(P):
            acc[j] = E[j] * acc[j] + N[i, j]
            out[i, j] = h * (acc[j] - 0.5 * N[i, j])
    return out_arr


def smooth_transition(r, double a, double b):
    r_arr = np.asarray(r, dtype=np.float64)
    flat = np.ascontiguousarray(r_arr.ravel())
    cdef double[::1] x = flat
    cdef Py_ssize_t P = x.shape[0], j
    out_arr = np.empty(P)
    cdef double[::1] out = out_arr
    cdef double u, left, right
    for j in range(P):
        u = (x[j] - a) / (b - a)
        if u <= 0.0:
            out[j] = 1.0
        elif u >= 1.0:
            out[j] = 0.0
        else:
            left = exp(-1.0 / (1.0 - u))
            right = exp(-1.0 / u)
            out[j] = left / (left + right)
    return out_arr.reshape(r_arr.shape)
