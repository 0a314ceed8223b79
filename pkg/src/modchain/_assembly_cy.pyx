# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled XXZ assembly kernel; see _assembly_py for the reference version."""

import numpy as np

cimport numpy as cnp

cnp.import_array()


cdef inline Py_ssize_t _bisect(const cnp.int64_t* states, Py_ssize_t n,
                               cnp.int64_t target) nogil:
    cdef Py_ssize_t lo = 0, hi = n, mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if states[mid] < target:
            lo = mid + 1
        else:
            hi = mid
    return lo


def csr_matvec_complex(cnp.int32_t[::1] indptr,
                       cnp.int32_t[::1] indices,
                       cnp.float64_t[::1] data,
                       double complex[::1] x):
    """y = A @ x for real CSR A and complex x, fused real/imag pass."""
    cdef Py_ssize_t n = indptr.shape[0] - 1
    y_np = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] y = y_np
    cdef Py_ssize_t i, k
    cdef double re, im, a
    cdef Py_ssize_t col
    with nogil:
        for i in range(n):
            re = 0.0
            im = 0.0
            for k in range(indptr[i], indptr[i + 1]):
                a = data[k]
                col = indices[k]
                re += a * x[col].real
                im += a * x[col].imag
            y[i].real = re
            y[i].imag = im
    return y_np


def xxz_triplets(cnp.int64_t[::1] states,
                 cnp.int64_t[::1] sites_i,
                 cnp.int64_t[::1] sites_j,
                 cnp.float64_t[::1] strengths,
                 double delta):
    cdef Py_ssize_t n = states.shape[0]
    cdef Py_ssize_t nb = sites_i.shape[0]
    cdef Py_ssize_t cap = n * nb  # one hop per (state, bond) upper bound
    rows_np = np.empty(cap, dtype=np.int64)
    cols_np = np.empty(cap, dtype=np.int64)
    vals_np = np.empty(cap, dtype=np.float64)
    diag_np = np.zeros(n, dtype=np.float64)
    cdef cnp.int64_t[::1] rows = rows_np
    cdef cnp.int64_t[::1] cols = cols_np
    cdef cnp.float64_t[::1] vals = vals_np
    cdef cnp.float64_t[::1] diag = diag_np
    cdef Py_ssize_t k = 0, b, s
    cdef cnp.int64_t mask, conf, flipped
    cdef int bi, bj
    cdef double w
    with nogil:
        for b in range(nb):
            w = strengths[b]
            mask = (<cnp.int64_t>1 << sites_i[b]) | (<cnp.int64_t>1 << sites_j[b])
            for s in range(n):
                conf = states[s]
                bi = (conf >> sites_i[b]) & 1
                bj = (conf >> sites_j[b]) & 1
                if bi != bj:
                    diag[s] -= delta * w
                    flipped = conf ^ mask
                    rows[k] = s
                    cols[k] = _bisect(&states[0], n, flipped)
                    vals[k] = 2.0 * w
                    k += 1
                else:
                    diag[s] += delta * w
    return rows_np[:k], cols_np[:k], vals_np[:k], diag_np
