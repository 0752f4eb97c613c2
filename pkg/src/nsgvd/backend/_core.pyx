# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot kernels: pairwise squared distances by direct summation."""

import numpy as np


def pairwise_sqdist(a, b):
    """Squared euclidean distances between rows of `a` (n,k) and `b` (m,k)."""
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    cdef double[:, ::1] av = a
    cdef double[:, ::1] bv = b
    cdef Py_ssize_t n = av.shape[0]
    cdef Py_ssize_t m = bv.shape[0]
    cdef Py_ssize_t k = av.shape[1]
    out = np.empty((n, m), dtype=np.float64)
    cdef double[:, ::1] ov = out
    cdef Py_ssize_t i, j, l
    cdef double s, d
    for i in range(n):
        for j in range(m):
            s = 0.0
            for l in range(k):
                d = av[i, l] - bv[j, l]
                s += d * d
            ov[i, j] = s
    return out


def pairwise_sqdist_self(a):
    """Symmetric variant: computes each unordered pair once, zero diagonal."""
    a = np.ascontiguousarray(a, dtype=np.float64)
    cdef double[:, ::1] av = a
    cdef Py_ssize_t n = av.shape[0]
    cdef Py_ssize_t k = av.shape[1]
    out = np.zeros((n, n), dtype=np.float64)
    cdef double[:, ::1] ov = out
    cdef Py_ssize_t i, j, l
    cdef double s, d
    for i in range(n):
        for j in range(i + 1, n):
            s = 0.0
            for l in range(k):
                d = av[i, l] - av[j, l]
                s += d * d
            ov[i, j] = s
            ov[j, i] = s
    return out
