# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled counting kernels: per-row counting sort + early-exit compare."""

from libc.stdlib cimport free, malloc
from libc.string cimport memset


def count_sorted_within(object z_obj, object e_obj, long tau):
    """Rows of z whose sorted version is within Hamming distance tau of e."""
    import numpy as np
    cdef long long[:, ::1] z = np.ascontiguousarray(z_obj, dtype=np.int64)
    cdef long long[::1] e = np.ascontiguousarray(e_obj, dtype=np.int64)
    cdef Py_ssize_t rows = z.shape[0]
    cdef Py_ssize_t n = z.shape[1]
    if e.shape[0] != n:
        raise ValueError("row length mismatch")

    cdef long long maxv = 0
    cdef Py_ssize_t i, j
    for i in range(rows):
        for j in range(n):
            if z[i, j] < 0:
                raise ValueError("negative coordinate")
            if z[i, j] > maxv:
                maxv = z[i, j]
    for j in range(n):
        if e[j] > maxv:
            maxv = e[j]

    cdef Py_ssize_t span = <Py_ssize_t> maxv + 1
    cdef int* counts = <int*> malloc(span * sizeof(int))
    if counts == NULL:
        raise MemoryError()

    cdef long hits = 0
    cdef long diffs
    cdef Py_ssize_t pos
    cdef long long v
    cdef int c
    try:
        for i in range(rows):
            memset(counts, 0, span * sizeof(int))
            for j in range(n):
                counts[z[i, j]] += 1
            # walk values in sorted order, comparing against e as we go
            diffs = 0
            pos = 0
            v = 0
            while pos < n and diffs <= tau:
                c = counts[v]
                while c > 0:
                    if e[pos] != v:
                        diffs += 1
                    pos += 1
                    c -= 1
                v += 1
            if diffs <= tau:
                hits += 1
    finally:
        free(counts)
    return hits


def count_within(object z_obj, object e_obj, long tau):
    """Rows of z within Hamming distance tau of e (no sorting)."""
    import numpy as np
    cdef long long[:, ::1] z = np.ascontiguousarray(z_obj, dtype=np.int64)
    cdef long long[::1] e = np.ascontiguousarray(e_obj, dtype=np.int64)
    cdef Py_ssize_t rows = z.shape[0]
    cdef Py_ssize_t n = z.shape[1]
    if e.shape[0] != n:
        raise ValueError("row length mismatch")
    cdef long hits = 0
    cdef long diffs
    cdef Py_ssize_t i, j
    for i in range(rows):
        diffs = 0
        for j in range(n):
            if z[i, j] != e[j]:
                diffs += 1
                if diffs > tau:
                    break
        if diffs <= tau:
            hits += 1
    return hits
