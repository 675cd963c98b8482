"""Brute-force oracles for differential testing on small graphs.

Everything here enumerates simple s-t paths outright and is exponential in
the worst case; callers keep graphs to a handful of nodes. Simple paths
suffice as LP constraints because dropping a nonnegative-cost cycle never
increases any cost component, so every walk's constraint is implied by its
simple reduction.
"""

from __future__ import annotations

import numpy as np

from . import lp as lpmod
from . import routing
from .errors import TooLargeError
from .graph import RoadNetwork
from .routing import Path

MAX_PATHS = 200_000


def iter_simple_edge_paths(network: RoadNetwork, s: int, t: int):
    """Yield every simple path (edge-id tuple) from s to t, DFS order.

    A simple path repeats no node. For s == t only the empty path is
    yielded (cycles are dominated by staying put under nonnegative costs).
    """
    if s == t:
        yield ()
        return
    out_edges = {nid: network.out_edge_ids(nid) for nid in network.node_ids}
    path: list[int] = []
    visited = {s}

    def walk(u: int):
        for eid in out_edges[u]:
            e = network.edge(eid)
            v = e.target
            if v in visited:
                continue
            path.append(eid)
            if v == t:
                yield tuple(path)
            else:
                visited.add(v)
                yield from walk(v)
                visited.remove(v)
            path.pop()

    yield from walk(s)


def all_path_cost_vectors(
    network: RoadNetwork, s: int, t: int, max_paths: int = MAX_PATHS
) -> list[tuple[tuple[int, ...], np.ndarray]]:
    out = []
    for edges in iter_simple_edge_paths(network, s, t):
        out.append((edges, routing.path_cost_vector(edges, network)))
        if len(out) > max_paths:
            raise TooLargeError(f"more than {max_paths} simple paths")
    return out


def feasible_by_enumeration(
    network: RoadNetwork, path: Path
) -> np.ndarray | None:
    """Feasibility of the full (all simple paths) program; None if empty."""
    d = network.cost_dim
    c_traj = routing.path_cost_vector(path, network)
    program = lpmod.minimize((0.0,) * d)
    program = lpmod.add_constraint(program, (1.0,) * d, lpmod.EQUAL, 1.0)
    for _, c_alt in all_path_cost_vectors(network, path.source, path.target):
        program = lpmod.add_constraint(
            program, c_traj - c_alt, lpmod.LESS_EQUAL, 0.0
        )
    solution = lpmod.solve(program)
    if solution.status is lpmod.LpStatus.INFEASIBLE:
        return None
    return solution.values


def mine_by_enumeration(
    network: RoadNetwork, path: Path
) -> tuple[float, np.ndarray]:
    """Optimal slack and a minimizing preference from the full program."""
    d = network.cost_dim
    c_traj = routing.path_cost_vector(path, network)
    program = lpmod.minimize((0.0,) * d + (1.0,))
    program = lpmod.add_constraint(program, (1.0,) * d + (0.0,), lpmod.EQUAL, 1.0)
    for _, c_alt in all_path_cost_vectors(network, path.source, path.target):
        program = lpmod.add_constraint(
            program, tuple(c_traj - c_alt) + (-1.0,), lpmod.LESS_EQUAL, 0.0
        )
    solution = lpmod.solve(program)
    assert solution.status is lpmod.LpStatus.OPTIMAL
    return max(0.0, float(solution.values[d])), solution.values[:d]


def shortest_by_enumeration(
    network: RoadNetwork, s: int, t: int, pref
) -> tuple[float, int, tuple[int, ...]] | None:
    """Reference shortest path under the full tie-break contract.

    Reproduces the kernel's arithmetic exactly: per-edge weights come from
    the same CSR matvec and are summed left to right along each path, then
    paths compare by (cost, hops, edge-id sequence).
    """
    w = routing.validate_preference(pref, network.cost_dim)
    weights_csr = routing.edge_weights(network, w)
    weight_by_eid = {
        network.edge_id_at_csr(p): float(weights_csr[p])
        for p in range(network.num_edges)
    }
    best = None
    for edges in iter_simple_edge_paths(network, s, t):
        total = 0.0
        for eid in edges:
            total = total + weight_by_eid[eid]
        key = (total, len(edges), edges)
        if best is None or key < best:
            best = key
    return best
