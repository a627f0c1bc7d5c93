# cython: language_level=3
"""Compiled determinant-excitation kernels.

Mirrors :mod:`respkern._kernels_py` entry for entry; the two are checked
against each other in the test suite.
"""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int64_t

cnp.import_array()

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil


cdef inline double _sign_below(uint64_t det, int p) noexcept nogil:
    cdef uint64_t mask = ((<uint64_t>1) << p) - 1
    return -1.0 if (__builtin_popcountll(det & mask) & 1) else 1.0


cdef inline Py_ssize_t _lookup(const uint64_t[::1] dets, uint64_t key) noexcept nogil:
    cdef Py_ssize_t lo = 0
    cdef Py_ssize_t hi = dets.shape[0] - 1
    cdef Py_ssize_t mid
    while lo <= hi:
        mid = (lo + hi) >> 1
        if dets[mid] < key:
            lo = mid + 1
        elif dets[mid] > key:
            hi = mid - 1
        else:
            return mid
    return -1


def one_body_table(const uint64_t[::1] dets, int n_orb):
    """Nonzero entries of a^+_p a_q over a sorted determinant list.

    Returns ``(rows, cols, create, annihilate, signs)`` such that
    ``<dets[row]| a^+_create a_annihilate |dets[col]> = sign``.
    """
    cdef Py_ssize_t dim = dets.shape[0]
    if dim == 0:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty.copy(), empty.copy(), empty.copy(), np.zeros(0)
    cdef int n_el = __builtin_popcountll(dets[0])
    cdef Py_ssize_t n_entries = dim * n_el * (n_orb - n_el + 1)

    rows_a = np.empty(n_entries, dtype=np.int64)
    cols_a = np.empty(n_entries, dtype=np.int64)
    cre_a = np.empty(n_entries, dtype=np.int64)
    ann_a = np.empty(n_entries, dtype=np.int64)
    sgn_a = np.empty(n_entries, dtype=np.float64)
    cdef int64_t[::1] rows = rows_a
    cdef int64_t[::1] cols = cols_a
    cdef int64_t[::1] cre = cre_a
    cdef int64_t[::1] ann = ann_a
    cdef double[::1] sgn = sgn_a

    cdef Py_ssize_t col, k = 0
    cdef int p, q
    cdef uint64_t det, d1, bit_q, bit_p
    cdef double s1
    with nogil:
        for col in range(dim):
            det = dets[col]
            for q in range(n_orb):
                bit_q = (<uint64_t>1) << q
                if not (det & bit_q):
                    continue
                s1 = _sign_below(det, q)
                d1 = det ^ bit_q
                for p in range(n_orb):
                    bit_p = (<uint64_t>1) << p
                    if d1 & bit_p:
                        continue
                    rows[k] = _lookup(dets, d1 | bit_p)
                    cols[k] = col
                    cre[k] = p
                    ann[k] = q
                    sgn[k] = s1 * _sign_below(d1, p)
                    k += 1
    return rows_a[:k], cols_a[:k], cre_a[:k], ann_a[:k], sgn_a[:k]


def two_body_matrix(const uint64_t[::1] dets, int n_orb, const double complex[:, :, :, ::1] w):
    """Dense matrix of 1/2 sum_pqrs w[p,q,r,s] a^+_p a^+_q a_s a_r."""
    cdef Py_ssize_t dim = dets.shape[0]
    out_a = np.zeros((dim, dim), dtype=np.complex128)
    cdef double complex[:, ::1] out = out_a
    # only the nonzero, Pauli-allowed index quadruples are visited
    idx_a = np.argwhere(np.asarray(w) != 0).astype(np.int32)
    idx_a = np.ascontiguousarray(idx_a[(idx_a[:, 0] != idx_a[:, 1]) & (idx_a[:, 2] != idx_a[:, 3])])
    cdef const int[:, ::1] idx = idx_a
    cdef Py_ssize_t n_terms = idx_a.shape[0]
    cdef Py_ssize_t col, row, t
    cdef int p, q, r, s
    cdef uint64_t det, d
    cdef double sign
    cdef double complex val
    with nogil:
        for t in range(n_terms):
            p = idx[t, 0]
            q = idx[t, 1]
            r = idx[t, 2]
            s = idx[t, 3]
            val = 0.5 * w[p, q, r, s]
            for col in range(dim):
                det = dets[col]
                if not (det >> r) & 1:
                    continue
                sign = _sign_below(det, r)
                d = det ^ ((<uint64_t>1) << r)
                if not (d >> s) & 1:
                    continue
                sign = sign * _sign_below(d, s)
                d = d ^ ((<uint64_t>1) << s)
                if (d >> q) & 1:
                    continue
                sign = sign * _sign_below(d, q)
                d = d | ((<uint64_t>1) << q)
                if (d >> p) & 1:
                    continue
                sign = sign * _sign_below(d, p)
                d = d | ((<uint64_t>1) << p)
                row = _lookup(dets, d)
                out[row, col] = out[row, col] + sign * val
    return out_a
