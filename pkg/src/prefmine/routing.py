"""Personalized-cost shortest paths and path cost accounting.

A preference vector holds d nonnegative weights summing to one; the
personalized cost of a path is the dot product of the path's summed cost
vector with the preference. The summation order is part of the contract:
sum the edge cost vectors first, dot with the preference last, so that
``personalized_cost(path) == pref @ path_cost_vector(path)`` exactly.

Tie-break among equal-cost paths: fewer hops first, then the
lexicographically smallest edge-id sequence. This makes every query
deterministic and reproducible across runs and worker counts.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernel
from .errors import DimensionMismatchError, NoPathError, ValidationError
from .graph import RoadNetwork

PREF_SUM_TOL = 1e-9


@dataclass(frozen=True)
class Path:
    """An edge sequence between two nodes; empty only when source == target."""

    edges: tuple[int, ...]
    source: int
    target: int

    def __len__(self) -> int:
        return len(self.edges)

    @property
    def is_empty(self) -> bool:
        return not self.edges


def empty_path(node: int) -> Path:
    return Path(edges=(), source=node, target=node)


def path_from_edges(network: RoadNetwork, edges: Sequence[int]) -> Path:
    """Build a Path from edge ids, validating connectivity."""
    edges = tuple(int(e) for e in edges)
    if not edges:
        raise ValidationError("a path needs at least one edge (or a node)")
    first = network.edge(edges[0])
    prev_target = first.target
    for eid in edges[1:]:
        e = network.edge(eid)
        if e.source != prev_target:
            raise ValidationError(
                f"edges {eid} is not incident to the previous edge's target"
            )
        prev_target = e.target
    return Path(edges=edges, source=first.source, target=prev_target)


def validate_preference(pref, cost_dim: int) -> np.ndarray:
    """Check simplex membership (weights >= 0, sum == 1 within 1e-9)."""
    w = np.asarray(pref, dtype=np.float64)
    if w.shape != (cost_dim,):
        raise DimensionMismatchError(
            f"preference has {w.size} weights, network cost dimension is {cost_dim}"
        )
    if not np.all(np.isfinite(w)):
        raise ValidationError("preference weights must be finite")
    if np.any(w < 0.0):
        raise ValidationError("preference weights must be nonnegative")
    if abs(float(w.sum()) - 1.0) > PREF_SUM_TOL:
        raise ValidationError(f"preference weights sum to {w.sum()!r}, expected 1")
    return w


def path_cost_vector(path: Path | Sequence[int], network: RoadNetwork) -> np.ndarray:
    """Componentwise sum of the path's edge cost vectors (zeros when empty)."""
    edges = path.edges if isinstance(path, Path) else tuple(path)
    if not edges:
        return np.zeros(network.cost_dim)
    return network.edge_costs_by_ids(edges).sum(axis=0)


def personalized_cost(costs_or_path, pref, network: RoadNetwork | None = None) -> float:
    """Dot product of a cost vector (or a path's summed costs) with ``pref``."""
    if isinstance(costs_or_path, Path):
        if network is None:
            raise ValidationError("personalized_cost of a Path needs the network")
        vec = path_cost_vector(costs_or_path, network)
    else:
        vec = np.asarray(costs_or_path, dtype=np.float64)
    w = np.asarray(pref, dtype=np.float64)
    if w.shape != vec.shape:
        raise DimensionMismatchError(
            f"preference dimension {w.shape} != cost dimension {vec.shape}"
        )
    return float(w @ vec)


def edge_weights(network: RoadNetwork, pref: np.ndarray) -> np.ndarray:
    """Per-edge scalar weights in CSR slot order for the given preference."""
    return network.csr_costs @ pref


def shortest_path(
    network: RoadNetwork, s: int, t: int, pref, *, validate: bool = True
) -> Path:
    """Deterministic preference-weighted shortest path from s to t.

    Raises NoPathError when t is unreachable. Returns the empty path when
    s == t (staying put always costs 0 under nonnegative costs).
    """
    w = validate_preference(pref, network.cost_dim) if validate else np.asarray(pref)
    si, ti = network.node_index(s), network.node_index(t)
    if si == ti:
        return empty_path(s)
    weights = edge_weights(network, w)
    res = _kernel.shortest_path_raw(
        network.csr_indptr,
        network.csr_head,
        weights,
        network.rev_indptr,
        network.rev_src,
        network.rev_pos,
        si,
        ti,
        True,
    )
    if res is None:
        raise NoPathError(f"no path from {s} to {t}")
    _, _, positions = res
    edges = tuple(network.edge_id_at_csr(int(p)) for p in positions)
    return Path(edges=edges, source=s, target=t)


def shortest_path_cost(
    network: RoadNetwork, s: int, t: int, pref, *, validate: bool = True
) -> float:
    """Cost of the shortest path only (skips path reconstruction).

    The returned value is the kernel's left-to-right traversal sum, which may
    differ from the summed-vector contract by a few ulps; callers comparing
    against personalized_cost must allow for that.
    """
    w = validate_preference(pref, network.cost_dim) if validate else np.asarray(pref)
    si, ti = network.node_index(s), network.node_index(t)
    if si == ti:
        return 0.0
    weights = edge_weights(network, w)
    res = _kernel.shortest_path_raw(
        network.csr_indptr,
        network.csr_head,
        weights,
        network.rev_indptr,
        network.rev_src,
        network.rev_pos,
        si,
        ti,
        False,
    )
    if res is None:
        raise NoPathError(f"no path from {s} to {t}")
    return float(res[0])
