# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled backtracking solver for naturality constraints.

Same contract as ``_natcore_py.solve``.
"""
import numpy as np
cimport cython


def solve(domains, cptr, csrc, ctgt, coff, tables, long long max_solutions):
    cdef int[::1] dom = np.ascontiguousarray(domains, dtype=np.int32)
    cdef int[::1] ptr = np.ascontiguousarray(cptr, dtype=np.int32)
    cdef int[::1] src = np.ascontiguousarray(csrc, dtype=np.int32)
    cdef int[::1] tgt = np.ascontiguousarray(ctgt, dtype=np.int32)
    cdef int[::1] off = np.ascontiguousarray(coff, dtype=np.int32)
    cdef int[::1] tab = np.ascontiguousarray(tables, dtype=np.int32)
    cdef Py_ssize_t n = dom.shape[0]
    if n == 0:
        return np.zeros((1, 0), dtype=np.int32)

    cdef int[::1] val = np.full(n, -1, dtype=np.int32)
    cdef Py_ssize_t cap = 64
    out_arr = np.empty((cap, n), dtype=np.int32)
    cdef int[:, ::1] out = out_arr
    cdef Py_ssize_t count = 0
    cdef Py_ssize_t v = 0
    cdef Py_ssize_t last = n - 1
    cdef Py_ssize_t c, i
    cdef bint ok

    while v >= 0:
        val[v] += 1
        if val[v] >= dom[v]:
            val[v] = -1
            v -= 1
            continue
        ok = True
        for c in range(ptr[v], ptr[v + 1]):
            if val[tgt[c]] != tab[off[c] + val[src[c]]]:
                ok = False
                break
        if not ok:
            continue
        if v == last:
            if count == cap:
                cap *= 2
                grown = np.empty((cap, n), dtype=np.int32)
                grown[:count] = out_arr[:count]
                out_arr = grown
                out = out_arr
            for i in range(n):
                out[count, i] = val[i]
            count += 1
            if count > max_solutions:
                break
        else:
            v += 1
    return out_arr[:count].copy()
