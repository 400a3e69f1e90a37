# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels for batch SOM training.

Only the inner loops live here; everything above (neighborhood weighting,
radius schedule, granule extraction) stays in NumPy. A pure-NumPy twin of
this module is `sonfis._somcore_py`; `sonfis.kernels` picks one at import.
"""

import numpy as np

from libc.math cimport INFINITY

BACKEND = "cython"


def assign_bmus(double[:, ::1] data, double[:, ::1] protos):
    """Index of the best-matching prototype for every row of `data`.

    Squared Euclidean distance; ties broken toward the lowest index.
    """
    cdef Py_ssize_t n = data.shape[0]
    cdef Py_ssize_t d = data.shape[1]
    cdef Py_ssize_t m = protos.shape[0]
    out = np.empty(n, dtype=np.int64)
    cdef long long[::1] o = out
    cdef Py_ssize_t i, j, k, best
    cdef double dist, diff, bestd
    for i in range(n):
        best = 0
        bestd = INFINITY
        for k in range(m):
            dist = 0.0
            for j in range(d):
                diff = data[i, j] - protos[k, j]
                dist += diff * diff
            if dist < bestd:
                bestd = dist
                best = k
        o[i] = best
    return out


def accumulate_by_bmu(double[:, ::1] data, long long[::1] bmus, Py_ssize_t m):
    """Per-neuron sum of assigned rows and assignment counts."""
    cdef Py_ssize_t n = data.shape[0]
    cdef Py_ssize_t d = data.shape[1]
    sums = np.zeros((m, d), dtype=np.float64)
    counts = np.zeros(m, dtype=np.float64)
    cdef double[:, ::1] s = sums
    cdef double[::1] c = counts
    cdef Py_ssize_t i, j, k
    for i in range(n):
        k = bmus[i]
        c[k] += 1.0
        for j in range(d):
            s[k, j] += data[i, j]
    return sums, counts
