# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels over uint64 bitset rows.

Mirrors ``_purepy`` decision for decision; see that module for the
algorithm descriptions.
"""
from libc.stdint cimport uint64_t
from libc.stdlib cimport free, malloc, realloc

import numpy as np

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil
    int __builtin_ctzll(unsigned long long) nogil


def min_weight(const uint64_t[:, ::1] basis):
    cdef Py_ssize_t k = basis.shape[0]
    cdef Py_ssize_t W = basis.shape[1]
    cdef Py_ssize_t w, j
    cdef uint64_t i, stop, mask = 0, best_mask = 0
    cdef long best = -1, wt
    if k == 0:
        return -1, 0
    if k > 62:
        raise OverflowError("too many basis rows for the Gray-code walk")
    cdef uint64_t* word = <uint64_t*> malloc(W * sizeof(uint64_t))
    if word == NULL:
        raise MemoryError()
    for w in range(W):
        word[w] = 0
    stop = (<uint64_t> 1) << k
    with nogil:
        i = 1
        while i < stop:
            j = __builtin_ctzll(i)
            wt = 0
            for w in range(W):
                word[w] ^= basis[j, w]
                wt += __builtin_popcountll(word[w])
            mask ^= (<uint64_t> 1) << j
            if best < 0 or wt < best:
                best = wt
                best_mask = mask
                if wt == 1:
                    break
            i += 1
    free(word)
    return best, best_mask


cdef inline bint _has(const uint64_t* s, Py_ssize_t v) nogil:
    return (s[v >> 6] >> (v & 63)) & 1


cdef struct Buf:
    uint64_t* data
    Py_ssize_t cap


cdef int _reserve(Buf* b, Py_ssize_t n) nogil:
    cdef Py_ssize_t cap = b.cap
    cdef uint64_t* p
    if n <= cap:
        return 0
    if cap == 0:
        cap = 64
    while cap < n:
        cap *= 2
    p = <uint64_t*> realloc(b.data, cap * sizeof(uint64_t))
    if p == NULL:
        return -1
    b.data = p
    b.cap = cap
    return 0


cdef long _cover_count(const uint64_t* P, const uint64_t[:, ::1] adj,
                       Py_ssize_t W, long limit, Buf* cls) nogil:
    cdef long ncls = 0, c
    cdef Py_ssize_t w, v, j
    cdef uint64_t bits
    cdef uint64_t* cand
    cdef bint placed
    for w in range(W):
        bits = P[w]
        while bits:
            v = (w << 6) + __builtin_ctzll(bits)
            bits &= bits - 1
            placed = False
            for c in range(ncls):
                cand = cls.data + c * W
                if _has(cand, v):
                    for j in range(W):
                        cand[j] &= adj[v, j]
                    placed = True
                    break
            if not placed:
                if ncls == limit + 1:
                    return limit + 1
                if _reserve(cls, (ncls + 1) * W) != 0:
                    return -1
                cand = cls.data + ncls * W
                for j in range(W):
                    cand[j] = adj[v, j] & P[j]
                ncls += 1
    return ncls


def max_independent_set(const uint64_t[:, ::1] adj):
    cdef Py_ssize_t V = adj.shape[0]
    cdef Py_ssize_t W = adj.shape[1]
    cdef Py_ssize_t top, w, v, bv, j
    cdef long best = 0, s, limit, bd, d, cnt, total
    cdef uint64_t bits
    cdef uint64_t* P
    cdef uint64_t* S
    cdef uint64_t* Pn
    cdef uint64_t* Sn
    cdef Buf pst, sst, sizes, cls
    cdef bint empty
    cdef int err = 0
    best_set = np.zeros(W, dtype=np.uint64)
    cdef uint64_t[::1] bs = best_set

    pst.data = NULL; pst.cap = 0
    sst.data = NULL; sst.cap = 0
    sizes.data = NULL; sizes.cap = 0
    cls.data = NULL; cls.cap = 0
    if (_reserve(&pst, W) or _reserve(&sst, W) or _reserve(&sizes, 1)):
        raise MemoryError()

    with nogil:
        for w in range(W):
            pst.data[w] = 0
            sst.data[w] = 0
        for v in range(V):
            pst.data[v >> 6] |= (<uint64_t> 1) << (v & 63)
        sizes.data[0] = 0
        top = 1
        while top > 0:
            top -= 1
            P = pst.data + top * W
            S = sst.data + top * W
            s = <long> sizes.data[top]

            empty = True
            for w in range(W):
                if P[w]:
                    empty = False
                    break
            if empty:
                if s > best:
                    best = s
                    for w in range(W):
                        bs[w] = S[w]
                continue

            limit = best - s
            if limit >= 0:
                cnt = _cover_count(P, adj, W, limit, &cls)
                if cnt < 0:
                    err = 1
                    break
                if cnt <= limit:
                    continue

            bv = -1
            bd = -1
            for w in range(W):
                bits = P[w]
                while bits:
                    v = (w << 6) + __builtin_ctzll(bits)
                    bits &= bits - 1
                    d = 0
                    for j in range(W):
                        d += __builtin_popcountll(adj[v, j] & P[j])
                    if d > bd:
                        bd = d
                        bv = v

            if bd == 0:
                total = s
                for w in range(W):
                    total += __builtin_popcountll(P[w])
                if total > best:
                    best = total
                    for w in range(W):
                        bs[w] = S[w] | P[w]
                continue

            if (_reserve(&pst, (top + 2) * W) or _reserve(&sst, (top + 2) * W)
                    or _reserve(&sizes, top + 2)):
                err = 1
                break
            # P and S may have moved after realloc.
            P = pst.data + top * W
            S = sst.data + top * W
            Pn = pst.data + (top + 1) * W
            Sn = sst.data + (top + 1) * W
            # exclude branch stays in slot top, include branch goes above it
            for w in range(W):
                Pn[w] = P[w] & ~adj[bv, w]
                Sn[w] = S[w]
            Pn[bv >> 6] &= ~((<uint64_t> 1) << (bv & 63))
            Sn[bv >> 6] |= (<uint64_t> 1) << (bv & 63)
            P[bv >> 6] &= ~((<uint64_t> 1) << (bv & 63))
            sizes.data[top + 1] = <uint64_t> (s + 1)
            top += 2

    free(pst.data)
    free(sst.data)
    free(sizes.data)
    free(cls.data)
    if err:
        raise MemoryError()
    return best, best_set
