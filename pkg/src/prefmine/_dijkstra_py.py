"""Pure-Python shortest-path kernel (fallback for the compiled extension).

Implements preference-weighted Dijkstra over CSR arrays with the
deterministic tie-break contract: minimize weighted cost, then hop count,
then the lexicographic order of the edge-id sequence. CSR slots within a
node are pre-sorted by edge id, so "first tight out-slot" is the
lexicographic choice.

The path is reconstructed in two passes over the tight subgraph (edges on
some (cost, hops)-optimal path): a reverse sweep marks nodes that can reach
the target through tight edges, then a forward greedy walk takes the first
tight marked slot at each step.
"""

from __future__ import annotations

import heapq
import math

import numpy as np

BACKEND = "python"


def shortest_path_raw(
    indptr,
    head,
    weight,
    rev_indptr,
    rev_src,
    rev_pos,
    source: int,
    target: int,
    need_path: bool = True,
):
    """Dijkstra from ``source`` to ``target`` over CSR arrays.

    Returns (cost, hops, csr_positions) where csr_positions lists the CSR
    slots of the chosen path's edges (None when need_path is False), or
    None when the target is unreachable. Weights must be nonnegative.
    """
    n = len(indptr) - 1
    indptr = list(indptr)
    head_l = list(head)
    weight_l = list(weight)

    INF = math.inf
    dist = [INF] * n
    hops = [0] * n
    popped = bytearray(n)

    dist[source] = 0.0
    heap = [(0.0, 0, source)]
    found = False
    while heap:
        d, h, u = heapq.heappop(heap)
        if popped[u] or d != dist[u] or h != hops[u]:
            continue
        popped[u] = 1
        if u == target:
            found = True
            break
        for p in range(indptr[u], indptr[u + 1]):
            v = head_l[p]
            if popped[v]:
                continue
            nd = d + weight_l[p]
            nh = h + 1
            if nd < dist[v] or (nd == dist[v] and nh < hops[v]):
                dist[v] = nd
                hops[v] = nh
                heapq.heappush(heap, (nd, nh, v))

    if not found:
        return None
    total, total_hops = dist[target], hops[target]
    if not need_path:
        return total, total_hops, None

    # Reverse sweep: mark nodes that reach the target via tight edges. Every
    # tight predecessor has a strictly smaller (dist, hops) key than the
    # target, so its labels are final even though the loop stopped early.
    rev_indptr_l = list(rev_indptr)
    rev_src_l = list(rev_src)
    rev_pos_l = list(rev_pos)
    marked = bytearray(n)
    marked[target] = 1
    stack = [target]
    while stack:
        v = stack.pop()
        dv, hv = dist[v], hops[v]
        for q in range(rev_indptr_l[v], rev_indptr_l[v + 1]):
            u = rev_src_l[q]
            if marked[u]:
                continue
            p = rev_pos_l[q]
            if hops[u] + 1 == hv and dist[u] + weight_l[p] == dv:
                marked[u] = 1
                stack.append(u)

    # Forward walk: at each node take the first tight marked slot; slots are
    # sorted by edge id, so this yields the lexicographically smallest
    # edge-id sequence among (cost, hops)-minimal paths.
    positions = np.empty(total_hops, dtype=np.int32)
    u = source
    for k in range(total_hops):
        du, hu = dist[u], hops[u]
        for p in range(indptr[u], indptr[u + 1]):
            v = head_l[p]
            if marked[v] and hu + 1 == hops[v] and du + weight_l[p] == dist[v]:
                positions[k] = p
                u = v
                break
        else:  # pragma: no cover - violated tight-subgraph invariant
            raise AssertionError("tight walk failed to advance")
    assert u == target
    return total, total_hops, positions
