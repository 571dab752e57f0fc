# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled enumeration kernels; see ``_kernels_py`` for the conventions."""

import numpy as np
cimport numpy as cnp

cnp.import_array()

UNMATCHED = 1 << 20


cdef int _rec(int k, int[::1] eu, int[::1] ev, unsigned char[::1] used,
              int[::1] stack, int depth, list out, long cap) except -1:
    cdef int u, v, i
    if k < 0:
        if len(out) >= cap:
            raise OverflowError(cap)
        # stack holds edges in decreasing index order
        out.append(tuple([stack[depth - 1 - i] for i in range(depth)]))
        return 0
    _rec(k - 1, eu, ev, used, stack, depth, out, cap)
    u = eu[k]
    v = ev[k]
    if not used[u] and not used[v]:
        used[u] = 1
        used[v] = 1
        stack[depth] = k
        _rec(k - 1, eu, ev, used, stack, depth + 1, out, cap)
        used[u] = 0
        used[v] = 0
    return 0


def enumerate_matchings(int n, eu, ev, long cap):
    cdef int[::1] eu_ = np.ascontiguousarray(eu, dtype=np.int32)
    cdef int[::1] ev_ = np.ascontiguousarray(ev, dtype=np.int32)
    cdef unsigned char[::1] used = np.zeros(max(n, 1), dtype=np.uint8)
    cdef int[::1] stack = np.zeros(max(len(eu_), 1), dtype=np.int32)
    cdef list out = []
    _rec(len(eu_) - 1, eu_, ev_, used, stack, 0, out, cap)
    return out


def rank_table(int n, eu, ev, ru, rv, list matchings):
    cdef int[::1] eu_ = np.ascontiguousarray(eu, dtype=np.int32)
    cdef int[::1] ev_ = np.ascontiguousarray(ev, dtype=np.int32)
    cdef int[::1] ru_ = np.ascontiguousarray(ru, dtype=np.int32)
    cdef int[::1] rv_ = np.ascontiguousarray(rv, dtype=np.int32)
    out = np.full((len(matchings), n), UNMATCHED, dtype=np.int32)
    cdef int[:, ::1] t = out
    cdef Py_ssize_t i
    cdef int k
    for i in range(len(matchings)):
        for k in matchings[i]:
            t[i, eu_[k]] = ru_[k]
            t[i, ev_[k]] = rv_[k]
    return out


def popular_flags(table, sizes):
    cdef int[:, ::1] t = np.ascontiguousarray(table, dtype=np.int32)
    cdef int[::1] sz = np.ascontiguousarray(sizes, dtype=np.int32)
    cdef Py_ssize_t k = t.shape[0]
    cdef Py_ssize_t n = t.shape[1]
    popular = np.zeros(k, dtype=np.uint8)
    dominant = np.zeros(k, dtype=np.uint8)
    cdef unsigned char[::1] pop = popular
    cdef unsigned char[::1] dom = dominant
    cdef Py_ssize_t i, j, v
    cdef int fw, bw, ok, undefeated
    for i in range(k):
        ok = 1
        undefeated = 1
        for j in range(k):
            if j == i:
                continue
            fw = 0
            bw = 0
            for v in range(n):
                if t[j, v] < t[i, v]:
                    fw += 1
                elif t[i, v] < t[j, v]:
                    bw += 1
            if fw > bw:
                ok = 0
                break
            if fw == bw and sz[j] > sz[i]:
                undefeated = 0
        if ok:
            pop[i] = 1
            dom[i] = undefeated
    return popular, dominant


def stable_flags(table, eu, ev, ru, rv):
    cdef int[:, ::1] t = np.ascontiguousarray(table, dtype=np.int32)
    cdef int[::1] eu_ = np.ascontiguousarray(eu, dtype=np.int32)
    cdef int[::1] ev_ = np.ascontiguousarray(ev, dtype=np.int32)
    cdef int[::1] ru_ = np.ascontiguousarray(ru, dtype=np.int32)
    cdef int[::1] rv_ = np.ascontiguousarray(rv, dtype=np.int32)
    cdef Py_ssize_t k = t.shape[0]
    cdef Py_ssize_t m = eu_.shape[0]
    out = np.ones(k, dtype=np.uint8)
    cdef unsigned char[::1] o = out
    cdef Py_ssize_t i, e
    for i in range(k):
        for e in range(m):
            if ru_[e] < t[i, eu_[e]] and rv_[e] < t[i, ev_[e]]:
                o[i] = 0
                break
    return out
