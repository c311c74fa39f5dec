# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the genome operators and the reachability closure.

Working forward/backward lists live in one C buffer (flat ``int[n*n]`` per
direction plus per-node lengths) and are handed back as Python lists, so the
caller gets a ready index without a rebuild.
"""

import numpy as np
cimport numpy as cnp
from libc.stdlib cimport calloc, free

cnp.import_array()


cdef struct Lists:
    int n
    int *fwd
    int *flen
    int *bwd
    int *blen


cdef int _alloc(Lists *L, int n) except -1:
    cdef int nn = n * n
    L.n = n
    L.fwd = <int *> calloc(2 * nn + 2 * n + 1, sizeof(int))
    if L.fwd == NULL:
        raise MemoryError()
    L.bwd = L.fwd + nn
    L.flen = L.bwd + nn
    L.blen = L.flen + n
    return 0


cdef inline void _link(Lists *L, int a, int b) noexcept nogil:
    cdef int n = L.n
    L.fwd[a * n + L.flen[a]] = b
    L.flen[a] += 1
    L.bwd[b * n + L.blen[b]] = a
    L.blen[b] += 1


cdef inline void _drop(int *lists, int *lens, int n, int v, int x) noexcept nogil:
    cdef int k
    for k in range(lens[v]):
        if lists[v * n + k] == x:
            lists[v * n + k] = lists[v * n + lens[v] - 1]
            lens[v] -= 1
            return


cdef bint _reaches(Lists *L, int start, int target, int *stack,
                   unsigned char *seen) noexcept nogil:
    # walk backward lists from start; True if target is an ancestor
    cdef int n = L.n
    cdef int i, v, w, k, top
    for i in range(n):
        seen[i] = 0
    stack[0] = start
    seen[start] = 1
    top = 1
    while top > 0:
        top -= 1
        v = stack[top]
        for k in range(L.blen[v]):
            w = L.bwd[v * n + k]
            if w == target:
                return True
            if not seen[w]:
                seen[w] = 1
                stack[top] = w
                top += 1
    return False


cdef list _as_lists(int *lists, int *lens, int n):
    cdef list out = []
    cdef list row
    cdef int v, k
    for v in range(n):
        row = []
        for k in range(lens[v]):
            row.append(lists[v * n + k])
        out.append(row)
    return out


cdef tuple _pack(bits, Lists *L):
    return (bits, _as_lists(L.fwd, L.flen, L.n), _as_lists(L.bwd, L.blen, L.n))


def crossover_bits(const unsigned char[::1] p1, const unsigned char[::1] p2,
                   int n, int point, bint swapped=False):
    cdef int nn = n * n
    cdef int i, a, b
    cdef Lists L1, L2
    c1_arr = np.zeros(nn, dtype=np.uint8)
    c2_arr = np.zeros(nn, dtype=np.uint8)
    cdef unsigned char[::1] c1 = c1_arr, c2 = c2_arr
    _alloc(&L1, n)
    try:
        _alloc(&L2, n)
    except MemoryError:
        free(L1.fwd)
        raise
    cdef int *stack = <int *> calloc(n + 1, sizeof(int))
    cdef unsigned char *seen = <unsigned char *> calloc(n + 1, 1)
    try:
        if stack == NULL or seen == NULL:
            raise MemoryError()
        with nogil:
            for i in range(nn):
                if i < point or p1[i] == p2[i]:
                    a = i // n
                    b = i % n
                    if p1[i]:
                        c1[i] = 1
                        _link(&L1, a, b)
                    if p2[i]:
                        c2[i] = 1
                        _link(&L2, a, b)
            for i in range(point, nn):
                if p1[i] == p2[i]:
                    continue
                a = i // n
                b = i % n
                if a == b:
                    continue
                if (p2[i] == 0) != swapped:
                    if not _reaches(&L2, a, b, stack, seen):
                        c2[i] = 1
                        _link(&L2, a, b)
                else:
                    if not _reaches(&L1, a, b, stack, seen):
                        c1[i] = 1
                        _link(&L1, a, b)
        return _pack(c1_arr, &L1), _pack(c2_arr, &L2)
    finally:
        free(L1.fwd)
        free(L2.fwd)
        free(stack)
        free(seen)


def mutate_bits(const unsigned char[::1] bits, int n, const unsigned char[::1] selected):
    cdef int nn = n * n
    cdef int i, a, b, flipped = 0
    cdef Lists L
    out_arr = np.array(bits, dtype=np.uint8, copy=True)
    cdef unsigned char[::1] out = out_arr
    _alloc(&L, n)
    cdef int *stack = <int *> calloc(n + 1, sizeof(int))
    cdef unsigned char *seen = <unsigned char *> calloc(n + 1, 1)
    try:
        if stack == NULL or seen == NULL:
            raise MemoryError()
        with nogil:
            for i in range(nn):
                if out[i]:
                    _link(&L, i // n, i % n)
            for i in range(nn):
                if not selected[i]:
                    continue
                a = i // n
                b = i % n
                if a == b:
                    continue
                if out[i]:
                    out[i] = 0
                    _drop(L.fwd, L.flen, n, a, b)
                    _drop(L.bwd, L.blen, n, b, a)
                    flipped += 1
                elif not _reaches(&L, a, b, stack, seen):
                    out[i] = 1
                    _link(&L, a, b)
                    flipped += 1
        return _pack(out_arr, &L), flipped
    finally:
        free(L.fwd)
        free(stack)
        free(seen)


def reach_matrix(adj):
    cdef cnp.uint8_t[:, ::1] a = np.ascontiguousarray(adj, dtype=np.uint8)
    cdef int n = a.shape[0]
    reach_arr = np.zeros((n, n), dtype=bool)
    cdef cnp.uint8_t[:, ::1] reach = reach_arr.view(np.uint8)
    cdef int *stack = <int *> calloc(n + 1, sizeof(int))
    cdef int s, v, w, top
    if stack == NULL:
        raise MemoryError()
    with nogil:
        for s in range(n):
            reach[s, s] = 1
            stack[0] = s
            top = 1
            while top > 0:
                top -= 1
                v = stack[top]
                for w in range(n):
                    if a[v, w] and not reach[s, w]:
                        reach[s, w] = 1
                        stack[top] = w
                        top += 1
    free(stack)
    return reach_arr
