# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled recurrences used by the series inverse."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


def forward_recurrence(A, b):
    """``out[0] = b[0]``, ``out[i] = b[i] + A[i-1] @ out[i-1]``."""
    cdef const double[:, :, ::1] Am = np.ascontiguousarray(A, dtype=np.float64)
    cdef const double[:, ::1] bm = np.ascontiguousarray(b, dtype=np.float64)
    cdef Py_ssize_t M = bm.shape[0], n = bm.shape[1]
    out = np.empty((M, n), dtype=np.float64)
    cdef double[:, ::1] o = out
    cdef Py_ssize_t i, r, c
    cdef double s
    if M == 0:
        return out
    for r in range(n):
        o[0, r] = bm[0, r]
    for i in range(1, M):
        for r in range(n):
            s = bm[i, r]
            for c in range(n):
                s += Am[i - 1, r, c] * o[i - 1, c]
            o[i, r] = s
    return out


def backward_recurrence(B, c):
    """``out[M-1] = 0``, ``out[i] = B[i] @ (c[i+1] + out[i+1])``."""
    cdef const double[:, :, ::1] Bm = np.ascontiguousarray(B, dtype=np.float64)
    cdef const double[:, ::1] cm = np.ascontiguousarray(c, dtype=np.float64)
    cdef Py_ssize_t M = cm.shape[0], n = cm.shape[1]
    out = np.empty((M, n), dtype=np.float64)
    cdef double[:, ::1] o = out
    cdef double[::1] tmp = np.empty(n, dtype=np.float64)
    cdef Py_ssize_t i, r, q
    cdef double s
    if M == 0:
        return out
    for r in range(n):
        o[M - 1, r] = 0.0
    for i in range(M - 2, -1, -1):
        for q in range(n):
            tmp[q] = cm[i + 1, q] + o[i + 1, q]
        for r in range(n):
            s = 0.0
            for q in range(n):
                s += Bm[i, r, q] * tmp[q]
            o[i, r] = s
    return out
