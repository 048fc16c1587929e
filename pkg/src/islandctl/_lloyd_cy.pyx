# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled Lloyd-iteration kernels; semantics mirror ``_lloyd_np``."""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "cython"


def assign_labels(double[:, ::1] points, double[:, ::1] centers,
                  cnp.intp_t[::1] labels, double[::1] dists):
    """Nearest center per point (squared Euclidean, ties to lowest index)."""
    cdef Py_ssize_t n = points.shape[0]
    cdef Py_ssize_t d = points.shape[1]
    cdef Py_ssize_t k = centers.shape[0]
    cdef Py_ssize_t i, c, j
    cdef double best, dist, diff
    cdef Py_ssize_t best_c
    for i in range(n):
        best = -1.0
        best_c = 0
        for c in range(k):
            dist = 0.0
            for j in range(d):
                diff = points[i, j] - centers[c, j]
                dist += diff * diff
            if best < 0.0 or dist < best:
                best = dist
                best_c = c
        labels[i] = best_c
        dists[i] = best


def update_centers(double[:, ::1] points, cnp.intp_t[::1] labels, Py_ssize_t k,
                   double[:, ::1] centers, cnp.intp_t[::1] counts):
    """Cluster means; empty clusters keep their previous center."""
    cdef Py_ssize_t n = points.shape[0]
    cdef Py_ssize_t d = points.shape[1]
    cdef Py_ssize_t i, c, j
    sums_arr = np.zeros((k, d), dtype=np.float64)
    cdef double[:, ::1] sums = sums_arr
    for c in range(k):
        counts[c] = 0
    for i in range(n):
        c = labels[i]
        counts[c] += 1
        for j in range(d):
            sums[c, j] += points[i, j]
    for c in range(k):
        if counts[c] > 0:
            for j in range(d):
                centers[c, j] = sums[c, j] / counts[c]


def objective(double[:, ::1] points, double[:, ::1] centers,
              cnp.intp_t[::1] labels) -> float:
    """WGSS at the given assignment and centers."""
    cdef Py_ssize_t n = points.shape[0]
    cdef Py_ssize_t d = points.shape[1]
    cdef Py_ssize_t i, j
    cdef double total = 0.0, diff
    for i in range(n):
        for j in range(d):
            diff = points[i, j] - centers[labels[i], j]
            total += diff * diff
    return total
