"""Greedy longest-prefix trajectory segmentation under a monotone criterion.

Two criteria are supported: an optimal-path criterion (the segment must be
a shortest path under one fixed cost type) and a personalized-path
criterion (some preference on the simplex must make the segment a shortest
path). Both are monotone — every contiguous sub-segment of a satisfying
segment satisfies too, because subpaths of shortest paths are shortest —
so repeatedly taking the longest feasible prefix yields a minimum-size
segmentation.

The longest prefix is located with galloping followed by binary search,
spending O(log k) criterion tests per segment; a linear scan is kept
behind a flag as a differential-testing reference.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import preference as prefmod
from . import routing
from .errors import (
    TooLargeError,
    UnsegmentableEdgeError,
    UnsegmentableError,
    ValidationError,
)
from .graph import RoadNetwork
from .routing import Path
from .trajectory import Trajectory, strip_self_loops, validate_trajectory

__all__ = [
    "Criterion",
    "Segmentation",
    "Trajectory",
    "strip_self_loops",
    "validate_trajectory",
    "satisfies",
    "longest_feasible_prefix",
    "segment",
    "brute_force_min_segmentation",
]

BRUTE_FORCE_CAP = 12

OPTIMAL = "optimal"
PERSONALIZED = "personalized"


@dataclass(frozen=True)
class Criterion:
    """Segment acceptance test: one fixed cost type, or any preference."""

    kind: str
    cost_index: int | None = None

    @staticmethod
    def optimal_path(cost_index: int) -> "Criterion":
        return Criterion(kind=OPTIMAL, cost_index=int(cost_index))

    @staticmethod
    def personalized_path() -> "Criterion":
        return Criterion(kind=PERSONALIZED)

    def describe(self) -> str:
        if self.kind == OPTIMAL:
            return f"optimal[{self.cost_index}]"
        return "personalized"


@dataclass(frozen=True)
class Segmentation:
    """Interior boundaries plus the segments they induce."""

    boundaries: tuple[int, ...]
    segments: tuple[tuple[int, ...], ...]
    preferences: tuple[np.ndarray, ...] | None = None

    @property
    def num_segments(self) -> int:
        return len(self.segments)

    @property
    def segmentation_points(self) -> frozenset[int]:
        return frozenset(self.boundaries)


def _check_segment(
    criterion: Criterion,
    network: RoadNetwork,
    edges: tuple[int, ...],
    eps: float,
) -> tuple[bool, np.ndarray | None]:
    """Criterion test on an edge run; returns (ok, certifying preference)."""
    path = routing.path_from_edges(network, edges)
    if criterion.kind == OPTIMAL:
        i = criterion.cost_index
        if not 0 <= i < network.cost_dim:
            raise ValidationError(
                f"cost index {i} out of range for d={network.cost_dim}"
            )
        pref = np.zeros(network.cost_dim)
        pref[i] = 1.0
        seg_cost = routing.personalized_cost(path, pref, network)
        best_cost = routing.shortest_path_cost(
            network, path.source, path.target, pref, validate=False
        )
        return (seg_cost - best_cost <= eps, pref)
    alpha = prefmod.is_personalized_path(network, path, eps=eps)
    return (alpha is not None, alpha)


def satisfies(
    criterion: Criterion,
    network: RoadNetwork,
    segment_edges,
    *,
    eps: float | None = None,
) -> bool:
    """Whether the (nonempty, connected) edge run meets the criterion."""
    eps = prefmod.oracle_eps() if eps is None else eps
    edges = tuple(
        segment_edges.edges if isinstance(segment_edges, (Trajectory, Path))
        else segment_edges
    )
    if not edges:
        raise ValidationError("criterion test needs a nonempty segment")
    ok, _ = _check_segment(criterion, network, edges, eps)
    return ok


def _longest_prefix(
    criterion: Criterion,
    network: RoadNetwork,
    edges: tuple[int, ...],
    start: int,
    eps: float,
    linear_scan: bool,
) -> tuple[int, np.ndarray | None]:
    """Maximal end position p with edges[start:p] feasible, plus its witness."""
    k = len(edges)
    cache: dict[int, tuple[bool, np.ndarray | None]] = {}

    def test(p: int) -> bool:
        if p not in cache:
            cache[p] = _check_segment(criterion, network, edges[start:p], eps)
        return cache[p][0]

    if not test(start + 1):
        raise UnsegmentableEdgeError(
            f"single edge {edges[start]} fails criterion {criterion.describe()}"
        )
    if linear_scan:
        good = start + 1
        while good < k and test(good + 1):
            good += 1
        return good, cache[good][1]

    # Gallop to the first failing probe, then binary search the boundary.
    good = start + 1
    step = 1
    bad = None
    while good + step <= k:
        probe = good + step
        if test(probe):
            good = probe
            step *= 2
        else:
            bad = probe
            break
    if bad is None:
        if good < k and test(k):
            good = k
        elif good < k:
            bad = k
    while bad is not None and bad - good > 1:
        mid = (good + bad) // 2
        if test(mid):
            good = mid
        else:
            bad = mid
    return good, cache[good][1]


def longest_feasible_prefix(
    criterion: Criterion,
    network: RoadNetwork,
    traj: Trajectory,
    start: int,
    *,
    eps: float | None = None,
    linear_scan: bool = False,
) -> int:
    """Maximal node position p such that edges[start:p] meets the criterion."""
    eps = prefmod.oracle_eps() if eps is None else eps
    if not 0 <= start < len(traj.edges):
        raise ValidationError(f"start position {start} out of range")
    pos, _ = _longest_prefix(
        criterion, network, traj.edges, start, eps, linear_scan
    )
    return pos


def segment(
    criterion: Criterion,
    network: RoadNetwork,
    traj: Trajectory,
    *,
    eps: float | None = None,
    linear_scan: bool = False,
) -> Segmentation:
    """Greedy left-to-right minimum segmentation.

    Requires self-loops to have been stripped (a self-loop can never be a
    shortest path, so it would make every trajectory containing one
    unsegmentable).
    """
    eps = prefmod.oracle_eps() if eps is None else eps
    validate_trajectory(network, traj)
    if any(network.edge(e).is_self_loop for e in traj.edges):
        raise ValidationError(
            f"trajectory {traj.id} contains self-loops; strip them first"
        )
    edges = traj.edges
    k = len(edges)
    boundaries: list[int] = []
    segments: list[tuple[int, ...]] = []
    prefs: list[np.ndarray | None] = []
    start = 0
    try:
        while start < k:
            pos, alpha = _longest_prefix(
                criterion, network, edges, start, eps, linear_scan
            )
            segments.append(edges[start:pos])
            prefs.append(alpha)
            if pos < k:
                boundaries.append(pos)
            start = pos
    except UnsegmentableEdgeError as exc:
        raise UnsegmentableError(str(exc)) from exc
    return Segmentation(
        boundaries=tuple(boundaries),
        segments=tuple(segments),
        preferences=tuple(prefs) if criterion.kind == PERSONALIZED else None,
    )


def brute_force_min_segmentation(
    criterion: Criterion,
    network: RoadNetwork,
    traj: Trajectory,
    *,
    cap: int = BRUTE_FORCE_CAP,
    eps: float | None = None,
) -> Segmentation:
    """Exact minimum-segment partition by dynamic programming (test oracle).

    best[i] is the minimum number of segments covering edges[i:]; ties are
    reconstructed preferring the longest first segment for determinism.
    """
    eps = prefmod.oracle_eps() if eps is None else eps
    validate_trajectory(network, traj)
    edges = traj.edges
    k = len(edges)
    if k > cap:
        raise TooLargeError(f"{k} edges exceeds brute-force cap {cap}")

    sat: dict[tuple[int, int], bool] = {}

    def ok(i: int, j: int) -> bool:
        if (i, j) not in sat:
            sat[(i, j)], _ = _check_segment(criterion, network, edges[i:j], eps)
        return sat[(i, j)]

    INF = k + 1
    best = [INF] * (k + 1)
    best[k] = 0
    for i in range(k - 1, -1, -1):
        for j in range(i + 1, k + 1):
            if best[j] < INF and ok(i, j):
                best[i] = min(best[i], 1 + best[j])
    if best[0] > k:
        raise UnsegmentableError(
            f"some single edge fails criterion {criterion.describe()}"
        )

    boundaries: list[int] = []
    segments: list[tuple[int, ...]] = []
    i = 0
    while i < k:
        j = max(
            jj
            for jj in range(i + 1, k + 1)
            if best[jj] < INF and ok(i, jj) and 1 + best[jj] == best[i]
        )
        segments.append(edges[i:j])
        if j < k:
            boundaries.append(j)
        i = j
    return Segmentation(boundaries=tuple(boundaries), segments=tuple(segments))
