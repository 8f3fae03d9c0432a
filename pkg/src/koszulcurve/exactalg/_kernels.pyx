# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Gaussian elimination over F_p on dense int64 arrays.

Requires p < 2**31 so that products of two residues fit in int64.
"""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t

cnp.import_array()


cdef inline int64_t _inv(int64_t a, int64_t p):
    cdef int64_t t = 0, newt = 1, r = p, newr = a, q, tmp
    while newr != 0:
        q = r // newr
        tmp = t - q * newt
        t = newt
        newt = tmp
        tmp = r - q * newr
        r = newr
        newr = tmp
    if t < 0:
        t += p
    return t


cdef Py_ssize_t _eliminate(int64_t[:, ::1] A, int64_t p, bint full, Py_ssize_t[::1] pivots):
    cdef Py_ssize_t m = A.shape[0], n = A.shape[1]
    cdef Py_ssize_t r = 0, c, i, j, k, nnz, start
    cdef int64_t f, inv, v
    cdef Py_ssize_t[::1] nzcols = np.empty(n, dtype=np.intp)
    for c in range(n):
        if r == m:
            break
        i = r
        while i < m and A[i, c] == 0:
            i += 1
        if i == m:
            continue
        if i != r:
            for j in range(c, n):
                v = A[i, j]
                A[i, j] = A[r, j]
                A[r, j] = v
        inv = _inv(A[r, c], p)
        nnz = 0
        for j in range(c, n):
            if A[r, j] != 0:
                A[r, j] = A[r, j] * inv % p
                nzcols[nnz] = j
                nnz += 1
        start = 0 if full else r + 1
        for i in range(start, m):
            if i == r:
                continue
            f = A[i, c]
            if f == 0:
                continue
            for k in range(nnz):
                j = nzcols[k]
                v = (A[i, j] - f * A[r, j]) % p
                if v < 0:
                    v += p
                A[i, j] = v
        pivots[r] = c
        r += 1
    return r


def rank_modp(A, long long p):
    """Rank of the integer array ``A`` reduced mod p."""
    cdef int64_t[:, ::1] M = np.ascontiguousarray(np.mod(A, p), dtype=np.int64).copy()
    if M.shape[0] == 0 or M.shape[1] == 0:
        return 0
    cdef Py_ssize_t[::1] piv = np.empty(min(M.shape[0], M.shape[1]), dtype=np.intp)
    return int(_eliminate(M, p, False, piv))


def rref_modp(A, long long p):
    """Reduced row echelon form mod p: returns (R, pivot_columns)."""
    R = np.ascontiguousarray(np.mod(A, p), dtype=np.int64).copy()
    if R.shape[0] == 0 or R.shape[1] == 0:
        return R[:0], []
    cdef int64_t[:, ::1] M = R
    cdef Py_ssize_t[::1] piv = np.empty(min(R.shape[0], R.shape[1]), dtype=np.intp)
    cdef Py_ssize_t r = _eliminate(M, p, True, piv)
    return R[:r].copy(), [int(piv[i]) for i in range(r)]
