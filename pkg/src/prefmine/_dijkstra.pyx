# cython: language_level=3
"""Compiled shortest-path kernel.

Mirror of ``_dijkstra_py.shortest_path_raw``: preference-weighted Dijkstra
over CSR arrays with the (cost, hops, lexicographic edge-id sequence)
tie-break. Must stay arithmetic-identical to the Python fallback: both sum
weights left to right along paths and compare with plain float equality.
"""

import numpy as np

cimport numpy as cnp
from libc.stdlib cimport free, malloc, realloc

cnp.import_array()

BACKEND = "cython"

cdef struct Heap:
    double *dist
    long long *hops
    int *node
    int size
    int cap


cdef inline bint _lt(double d1, long long h1, int n1,
                     double d2, long long h2, int n2) noexcept:
    if d1 != d2:
        return d1 < d2
    if h1 != h2:
        return h1 < h2
    return n1 < n2


cdef inline void _swap(Heap *hp, int i, int j) noexcept:
    cdef double td = hp.dist[i]
    cdef long long th = hp.hops[i]
    cdef int tn = hp.node[i]
    hp.dist[i] = hp.dist[j]; hp.hops[i] = hp.hops[j]; hp.node[i] = hp.node[j]
    hp.dist[j] = td; hp.hops[j] = th; hp.node[j] = tn


cdef int _heap_push(Heap *hp, double d, long long h, int node) except -1:
    cdef int i, parent
    if hp.size == hp.cap:
        hp.cap *= 2
        hp.dist = <double *> realloc(hp.dist, hp.cap * sizeof(double))
        hp.hops = <long long *> realloc(hp.hops, hp.cap * sizeof(long long))
        hp.node = <int *> realloc(hp.node, hp.cap * sizeof(int))
        if hp.dist == NULL or hp.hops == NULL or hp.node == NULL:
            raise MemoryError()
    i = hp.size
    hp.dist[i] = d
    hp.hops[i] = h
    hp.node[i] = node
    hp.size += 1
    while i > 0:
        parent = (i - 1) >> 1
        if _lt(hp.dist[i], hp.hops[i], hp.node[i],
               hp.dist[parent], hp.hops[parent], hp.node[parent]):
            _swap(hp, i, parent)
            i = parent
        else:
            break
    return 0


cdef void _heap_pop(Heap *hp, double *d, long long *h, int *node) noexcept:
    cdef int i = 0, child
    d[0] = hp.dist[0]
    h[0] = hp.hops[0]
    node[0] = hp.node[0]
    hp.size -= 1
    hp.dist[0] = hp.dist[hp.size]
    hp.hops[0] = hp.hops[hp.size]
    hp.node[0] = hp.node[hp.size]
    while True:
        child = 2 * i + 1
        if child >= hp.size:
            break
        if child + 1 < hp.size and _lt(hp.dist[child + 1], hp.hops[child + 1],
                                       hp.node[child + 1], hp.dist[child],
                                       hp.hops[child], hp.node[child]):
            child += 1
        if _lt(hp.dist[child], hp.hops[child], hp.node[child],
               hp.dist[i], hp.hops[i], hp.node[i]):
            _swap(hp, i, child)
            i = child
        else:
            break


def shortest_path_raw(const int[:] indptr, const int[:] head,
                      const double[:] weight, const int[:] rev_indptr,
                      const int[:] rev_src, const int[:] rev_pos,
                      int source, int target, bint need_path=True):
    """See ``_dijkstra_py.shortest_path_raw`` for the contract."""
    cdef int n = indptr.shape[0] - 1
    cdef double INF = float("inf")
    cdef double *dist = <double *> malloc(n * sizeof(double))
    cdef long long *hops = <long long *> malloc(n * sizeof(long long))
    cdef char *popped = <char *> malloc(n * sizeof(char))
    cdef char *marked = <char *> malloc(n * sizeof(char))
    cdef int *stack = <int *> malloc(n * sizeof(int))
    cdef Heap hp
    hp.cap = 64
    hp.size = 0
    hp.dist = <double *> malloc(hp.cap * sizeof(double))
    hp.hops = <long long *> malloc(hp.cap * sizeof(long long))
    hp.node = <int *> malloc(hp.cap * sizeof(int))

    cdef int i, u, v, p, q, k, stack_top
    cdef double d, nd, du, dv
    cdef long long h, nh, hu, hv
    cdef bint found = False
    cdef bint advanced
    cdef double total = 0.0
    cdef long long total_hops = 0
    cdef int[:] positions

    try:
        if (dist == NULL or hops == NULL or popped == NULL or marked == NULL
                or stack == NULL or hp.dist == NULL or hp.hops == NULL
                or hp.node == NULL):
            raise MemoryError()
        for i in range(n):
            dist[i] = INF
            hops[i] = 0
            popped[i] = 0
            marked[i] = 0

        dist[source] = 0.0
        _heap_push(&hp, 0.0, 0, source)
        while hp.size > 0:
            _heap_pop(&hp, &d, &h, &u)
            if popped[u] or d != dist[u] or h != hops[u]:
                continue
            popped[u] = 1
            if u == target:
                found = True
                break
            for p in range(indptr[u], indptr[u + 1]):
                v = head[p]
                if popped[v]:
                    continue
                nd = d + weight[p]
                nh = h + 1
                if nd < dist[v] or (nd == dist[v] and nh < hops[v]):
                    dist[v] = nd
                    hops[v] = nh
                    _heap_push(&hp, nd, nh, v)

        if not found:
            return None
        total = dist[target]
        total_hops = hops[target]
        if not need_path:
            return total, int(total_hops), None

        # Reverse sweep over tight edges; tight predecessors always have a
        # strictly smaller (dist, hops) key than the target, so their labels
        # are final despite the early break above.
        marked[target] = 1
        stack[0] = target
        stack_top = 1
        while stack_top > 0:
            stack_top -= 1
            v = stack[stack_top]
            dv = dist[v]
            hv = hops[v]
            for q in range(rev_indptr[v], rev_indptr[v + 1]):
                u = rev_src[q]
                if marked[u]:
                    continue
                p = rev_pos[q]
                if hops[u] + 1 == hv and dist[u] + weight[p] == dv:
                    marked[u] = 1
                    stack[stack_top] = u
                    stack_top += 1

        out = np.empty(int(total_hops), dtype=np.int32)
        positions = out
        u = source
        for k in range(total_hops):
            du = dist[u]
            hu = hops[u]
            advanced = False
            for p in range(indptr[u], indptr[u + 1]):
                v = head[p]
                if marked[v] and hu + 1 == hops[v] and du + weight[p] == dist[v]:
                    positions[k] = p
                    u = v
                    advanced = True
                    break
            if not advanced:
                raise AssertionError("tight walk failed to advance")
        if u != target:
            raise AssertionError("tight walk missed the target")
        return total, int(total_hops), out
    finally:
        free(dist)
        free(hops)
        free(popped)
        free(marked)
        free(stack)
        free(hp.dist)
        free(hp.hops)
        free(hp.node)
