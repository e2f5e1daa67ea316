# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Lindley recursion and FCFS delay scan."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


def lindley(double a, const double[::1] service):
    cdef Py_ssize_t n = service.shape[0], i
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.zeros(n + 1, dtype=np.float64)
    cdef double[::1] q = out
    cdef double x
    for i in range(n):
        x = q[i] + a - service[i]
        q[i + 1] = x if x > 0.0 else 0.0
    return out


def fcfs_delays(double a, const double[::1] queue):
    cdef Py_ssize_t n = queue.shape[0] - 1, l, j = 0
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out = np.empty(n, dtype=np.int64)
    cdef long long[::1] d = out
    for l in range(n):
        if j < l:
            j = l
        while j < n and queue[j + 1] > (j - l) * a:
            j += 1
        d[l] = j - l if j < n else -1
    return out
