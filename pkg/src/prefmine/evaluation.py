"""Scores for segmentation quality and mined-preference quality.

Segmentation is judged against known break points: the break recovery rate
(recovered breaks over breaks), the segmentation rate (segmentation points
per break, a noise measure), and their ratio as a combined quality score.
Mined preferences are judged by how much of the trajectory the recovered
route reproduces (edge overlap) and by the cost ratio between the recovered
route and the trajectory under the mined preference.

Baselines: the travel-time-only preference, and best-of-five random
preferences evaluated against a chosen score.
"""

from __future__ import annotations

import hashlib
import math
from typing import Callable, Iterable, Sequence

import numpy as np

from . import preference as prefmod
from . import routing
from .errors import NoBreakPointsError, ValidationError
from .graph import RoadNetwork
from .routing import Path
from .trajectory import Trajectory

BRP_CANDIDATES = 5


def brr(break_points: Iterable[int], seg_points: Iterable[int]) -> float:
    """Fraction of break points hit exactly by a segmentation point."""
    bp = set(break_points)
    if not bp:
        raise NoBreakPointsError("break recovery rate needs break points")
    return len(bp & set(seg_points)) / len(bp)


def sr(break_points: Iterable[int], seg_points: Iterable[int]) -> float:
    """Segmentation points per break point."""
    bp = set(break_points)
    if not bp:
        raise NoBreakPointsError("segmentation rate needs break points")
    return len(set(seg_points)) / len(bp)


def sq(break_points: Iterable[int], seg_points: Iterable[int]) -> float:
    """Recovered break points per segmentation point (0 when no points)."""
    rate = sr(break_points, seg_points)
    if rate == 0.0:
        return 0.0
    return brr(break_points, seg_points) / rate


def s_score(segmentable_flags: Sequence[bool]) -> float:
    """Percentage of trajectories that are segmentable."""
    flags = list(segmentable_flags)
    if not flags:
        return 0.0
    return 100.0 * sum(bool(f) for f in flags) / len(flags)


def distance_to_next_sp(
    break_points: Iterable[int], seg_points: Iterable[int]
) -> list[float]:
    """Hop distance from each break point to the nearest segmentation point.

    Breaks in trajectories without any segmentation point get infinity.
    """
    sp = sorted(set(seg_points))
    out = []
    for b in sorted(set(break_points)):
        if not sp:
            out.append(math.inf)
        else:
            out.append(float(min(abs(b - p) for p in sp)))
    return out


def distance_cdf(
    distances: Iterable[float], max_hops: int = 10
) -> list[tuple[str, float]]:
    """Cumulative share of breaks within 0..max_hops hops (and 'inf')."""
    dists = list(distances)
    total = len(dists)
    rows: list[tuple[str, float]] = []
    if total == 0:
        return rows
    for h in range(max_hops + 1):
        rows.append((str(h), sum(d <= h for d in dists) / total))
    rows.append(("inf", 1.0))
    return rows


def rrro(traj_edges: Iterable[int], recovered_edges: Iterable[int]) -> float:
    """Share of the trajectory's edge set covered by the recovered route."""
    t = set(traj_edges)
    if not t:
        raise ValidationError("relative route overlap needs a nonempty trajectory")
    return len(t & set(recovered_edges)) / len(t)


def rcrs(
    network: RoadNetwork,
    traj: Trajectory | Path,
    recovered: Path,
    alpha,
    *,
    eps: float | None = None,
) -> float:
    """Cost ratio recovered/trajectory under ``alpha``; in (0, 1].

    The recovered route is a shortest path under alpha, so its cost can
    exceed the trajectory's only by roundoff; that is asserted here.
    """
    eps = prefmod.oracle_eps() if eps is None else eps
    w = routing.validate_preference(alpha, network.cost_dim)
    p_traj = routing.personalized_cost(
        routing.path_cost_vector(traj.edges, network), w
    )
    p_rec = routing.personalized_cost(
        routing.path_cost_vector(recovered.edges, network), w
    )
    if p_traj <= 0:
        raise ValidationError("trajectory has zero personalized cost")
    if p_rec > p_traj + eps:
        raise ValidationError(
            f"recovered route costs {p_rec} > trajectory {p_traj}; "
            "it is supposed to be a shortest path"
        )
    return p_rec / p_traj


def ttp_preference(cost_dim: int, travel_time_index: int) -> np.ndarray:
    """Weight one on travel time, zero elsewhere."""
    if not 0 <= travel_time_index < cost_dim:
        raise ValidationError(
            f"travel time index {travel_time_index} out of range for d={cost_dim}"
        )
    pref = np.zeros(cost_dim)
    pref[travel_time_index] = 1.0
    return pref


def sample_simplex(rng: np.random.Generator, d: int, count: int) -> np.ndarray:
    """Uniform samples from the simplex via normalized exponentials."""
    raw = rng.exponential(1.0, size=(count, d))
    return raw / raw.sum(axis=1, keepdims=True)


def stable_seed(*parts) -> np.random.SeedSequence:
    """Deterministic seed from arbitrary tokens, independent of the process."""
    digest = hashlib.blake2b(
        "\x1f".join(str(p) for p in parts).encode(), digest_size=16
    ).digest()
    return np.random.SeedSequence(int.from_bytes(digest, "little"))


EvalFn = Callable[[RoadNetwork, Trajectory, np.ndarray], float]


def rrro_objective(network: RoadNetwork, traj: Trajectory, alpha) -> float:
    path = traj.to_path(network)
    route = routing.shortest_path(network, path.source, path.target, alpha)
    return rrro(traj.edges, route.edges)


def rcrs_objective(network: RoadNetwork, traj: Trajectory, alpha) -> float:
    path = traj.to_path(network)
    route = routing.shortest_path(network, path.source, path.target, alpha)
    if path.source == path.target:
        return 0.0
    return rcrs(network, traj, route, alpha)


def brp_preference(
    network: RoadNetwork,
    traj: Trajectory,
    eval_fn: EvalFn,
    rng_seed,
    *,
    candidates: int = BRP_CANDIDATES,
) -> np.ndarray:
    """Best of ``candidates`` random preferences under ``eval_fn``.

    Deterministic per seed; ties resolve to the earliest sampled candidate.
    """
    rng = np.random.default_rng(rng_seed)
    sampled = sample_simplex(rng, network.cost_dim, candidates)
    scores = [eval_fn(network, traj, alpha) for alpha in sampled]
    return sampled[int(np.argmax(scores))]
