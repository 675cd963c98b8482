"""Synthetic grid networks and trajectories with planted ground truth.

Grid topology keeps path multiplicity rich while staying small enough for
exhaustive checks. Edge costs are i.i.d. uniform per dimension with an
optional unit dimension (constant 1, preserved by normalization since its
mean is already 1). Trajectories are planted as shortest paths under known
preferences; stitched corpora chain such legs through via points sampled
off the direct route, so each via point is a recoverable break.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import routing
from .errors import ValidationError
from .graph import RoadNetwork, normalize_costs
from .stitching import TimedTrajectory
from .trajectory import Trajectory

DEFAULT_RANGES = ((10.0, 100.0), (0.05, 1.0), (1.0, 50.0))
DEFAULT_NAMES = ("travel_time", "congestion", "crowdedness")
UNIT_NAME = "unit"

# None of these lean on a single dimension, so single-cost baselines stay
# honestly beatable on planted corpora.
DEFAULT_PREFERENCE_POOL = (
    (0.55, 0.25, 0.1, 0.1),
    (0.25, 0.5, 0.15, 0.1),
    (0.15, 0.2, 0.55, 0.1),
    (0.3, 0.3, 0.3, 0.1),
)


@dataclass(frozen=True)
class SynthConfig:
    """Knobs for the generator; identical configs give identical outputs."""

    grid_w: int = 10
    grid_h: int = 10
    cost_dim: int = 4
    include_unit_dim: bool = True
    cost_ranges: tuple[tuple[float, float], ...] = DEFAULT_RANGES
    rng_seed: int = 7
    num_trajectories: int = 100
    via_min: int = 0
    via_max: int = 0
    off_path_prob: float = 1.0
    preference_pool: tuple[tuple[float, ...], ...] = DEFAULT_PREFERENCE_POOL
    noise: float = 0.0
    adversarial_edges: int = 0
    gap_s: float = 600.0
    min_separation: int = 3

    def __post_init__(self):
        if self.grid_w < 2 or self.grid_h < 2:
            raise ValidationError("grid must be at least 2x2")
        if self.include_unit_dim and self.cost_dim < 2:
            raise ValidationError("unit dimension needs cost_dim >= 2")
        informative = self.cost_dim - (1 if self.include_unit_dim else 0)
        if informative < 1:
            raise ValidationError("need at least one informative dimension")
        if len(self.cost_ranges) < informative:
            raise ValidationError("not enough cost ranges for cost_dim")

    @property
    def informative_dims(self) -> int:
        return self.cost_dim - (1 if self.include_unit_dim else 0)

    @property
    def cost_names(self) -> tuple[str, ...]:
        names = DEFAULT_NAMES + tuple(
            f"cost_{i}" for i in range(len(DEFAULT_NAMES), self.informative_dims)
        )
        names = names[: self.informative_dims]
        return names + ((UNIT_NAME,) if self.include_unit_dim else ())


def _node_id(cfg: SynthConfig, row: int, col: int) -> int:
    return row * cfg.grid_w + col


def _raw_grid_network(cfg: SynthConfig) -> RoadNetwork:
    rng = np.random.default_rng(cfg.rng_seed)
    nodes = list(range(cfg.grid_w * cfg.grid_h))
    links: list[tuple[int, int]] = []
    for r in range(cfg.grid_h):
        for c in range(cfg.grid_w):
            if c + 1 < cfg.grid_w:
                links.append((_node_id(cfg, r, c), _node_id(cfg, r, c + 1)))
            if r + 1 < cfg.grid_h:
                links.append((_node_id(cfg, r, c), _node_id(cfg, r + 1, c)))
    arcs: list[tuple[int, int]] = []
    for u, v in links:
        arcs.append((u, v))
        arcs.append((v, u))

    m = len(arcs)
    kinf = cfg.informative_dims
    costs = np.empty((m, cfg.cost_dim))
    for j in range(kinf):
        lo, hi = cfg.cost_ranges[j]
        costs[:, j] = rng.uniform(lo, hi, size=m)
    if cfg.include_unit_dim:
        costs[:, kinf] = 1.0

    edges = [(i, u, v, costs[i]) for i, (u, v) in enumerate(arcs)]
    return RoadNetwork(nodes, edges, cfg.cost_names)


def generate_grid_network(cfg: SynthConfig) -> RoadNetwork:
    """Bidirected grid with i.i.d. costs, optional unit dim, normalized."""
    return normalize_costs(_raw_grid_network(cfg))


def generate_adversarial_network(
    cfg: SynthConfig,
) -> tuple[RoadNetwork, tuple[int, ...]]:
    """Grid with dominated edges planted before normalization.

    Per-dimension normalization scaling preserves componentwise dominance,
    so the planted edges stay dominated in the returned network.
    """
    if cfg.adversarial_edges < 1:
        raise ValidationError("adversarial_edges must be >= 1")
    rng = np.random.default_rng(cfg.rng_seed + 3)
    network, planted = plant_dominated_edges(
        _raw_grid_network(cfg),
        cfg.adversarial_edges,
        rng,
        unit_dim=cfg.include_unit_dim,
    )
    return normalize_costs(network), planted


def plant_dominated_edges(
    network: RoadNetwork,
    count: int,
    rng: np.random.Generator,
    *,
    unit_dim: bool,
    margin: float = 0.25,
) -> tuple[RoadNetwork, tuple[int, ...]]:
    """Make ``count`` edges strictly costlier than a two-edge bypass.

    A dominated edge can never be a shortest path on its own under any
    preference over the informative dimensions, so trajectories crossing it
    defeat the personalized-path criterion unless a unit dimension rescues
    them. The unit dimension (if present) is left at 1 so it keeps meaning
    hop count; domination is arranged on the informative dimensions only.
    """
    matrix = np.array(network.cost_matrix)
    d = network.cost_dim
    informative = d - 1 if unit_dim else d
    out_by_node: dict[int, list[int]] = {}
    for eid in network.edge_ids:
        e = network.edge(eid)
        out_by_node.setdefault(e.source, []).append(eid)

    def find_bypass(e):
        # alternative simple route of 2 or 3 edges (grids are triangle-free,
        # so the 3-edge square detour is the common case)
        for first in out_by_node.get(e.source, ()):
            if first == e.id:
                continue
            mid1 = network.edge(first).target
            if mid1 in (e.source, e.target):
                continue
            for second in out_by_node.get(mid1, ()):
                mid2 = network.edge(second).target
                if mid2 == e.target:
                    return (first, second)
                if mid2 in (e.source, e.target, mid1):
                    continue
                for third in out_by_node.get(mid2, ()):
                    if network.edge(third).target == e.target:
                        return (first, second, third)
        return None

    candidates = list(network.edge_ids)
    rng.shuffle(candidates)
    planted: list[int] = []
    # bypass members must keep their costs, or earlier dominations could
    # silently break when a member is raised later
    frozen: set[int] = set()
    for eid in candidates:
        if len(planted) >= count:
            break
        e = network.edge(eid)
        if e.is_self_loop or eid in frozen or eid in planted:
            continue
        bypass = find_bypass(e)
        if bypass is None or any(b in planted for b in bypass):
            continue
        i = network.edge_dense_index(eid)
        total = np.zeros(informative)
        for b in bypass:
            total += matrix[network.edge_dense_index(b), :informative]
        matrix[i, :informative] = (1.0 + margin) * total
        planted.append(eid)
        frozen.update(bypass)
    if len(planted) < count:
        raise ValidationError(
            f"could only plant {len(planted)} of {count} dominated edges"
        )
    return network.with_cost_matrix(matrix), tuple(planted)


def add_cost_noise(
    network: RoadNetwork,
    noise: float,
    rng: np.random.Generator,
    *,
    skip_dims: tuple[int, ...] = (),
) -> RoadNetwork:
    """Multiplicative uniform noise in [1-noise, 1+noise], then renormalize.

    Dimensions in ``skip_dims`` (typically the unit dimension) keep their
    exact values.
    """
    if noise < 0:
        raise ValidationError("noise must be nonnegative")
    matrix = np.array(network.cost_matrix)
    factors = rng.uniform(1.0 - noise, 1.0 + noise, size=matrix.shape)
    for dim in skip_dims:
        factors[:, dim] = 1.0
    return normalize_costs(network.with_cost_matrix(matrix * factors))


def generate_personalized_trajectory(
    network: RoadNetwork, alpha, s: int, t: int, *, traj_id: str = "t0"
) -> Trajectory:
    """The alpha-shortest path from s to t as a trajectory (ground truth)."""
    if s == t:
        raise ValidationError("planted trajectories need distinct endpoints")
    path = routing.shortest_path(network, s, t, alpha)
    return Trajectory(id=traj_id, edges=path.edges)


def generate_stitched_trajectory(
    network: RoadNetwork,
    via_points: list[int],
    alphas: list,
    *,
    vehicle_id: str = "v0",
    id_prefix: str = "leg",
    start_time: float = 0.0,
    gap_s: float = 600.0,
    speed_s_per_edge: float = 30.0,
) -> tuple[list[TimedTrajectory], tuple[int, ...]]:
    """Per-leg shortest paths through via points, plus true break positions.

    ``via_points`` lists source, via nodes, and target in order; leg i runs
    under alphas[i]. Legs share endpoints, so stitching them inserts no
    connector edges and the true break positions are the cumulative edge
    counts at each interior via point.
    """
    if len(via_points) < 2:
        raise ValidationError("need at least a source and a target")
    if len(alphas) != len(via_points) - 1:
        raise ValidationError("need one preference per leg")
    legs: list[TimedTrajectory] = []
    breaks: list[int] = []
    clock = start_time
    total_edges = 0
    for i, (a, b) in enumerate(zip(via_points, via_points[1:])):
        if a == b:
            raise ValidationError("consecutive via points must differ")
        traj = generate_personalized_trajectory(
            network, alphas[i], a, b, traj_id=f"{id_prefix}_{i}"
        )
        duration = speed_s_per_edge * len(traj.edges)
        legs.append(
            TimedTrajectory(
                trajectory=traj,
                vehicle_id=vehicle_id,
                start_time=clock,
                end_time=clock + duration,
            )
        )
        clock += duration + gap_s
        total_edges += len(traj.edges)
        if i < len(via_points) - 2:
            breaks.append(total_edges)
    return legs, tuple(breaks)


# ----------------------------------------------------------------------
# Corpora
# ----------------------------------------------------------------------


def _sample_endpoints(
    cfg: SynthConfig, network: RoadNetwork, rng: np.random.Generator
) -> tuple[int, int]:
    n = network.num_nodes
    while True:
        s, t = int(rng.integers(n)), int(rng.integers(n))
        if s == t:
            continue
        dr = abs(s // cfg.grid_w - t // cfg.grid_w)
        dc = abs(s % cfg.grid_w - t % cfg.grid_w)
        if dr + dc >= cfg.min_separation:
            return s, t


def _pool_alphas(cfg: SynthConfig) -> list[np.ndarray]:
    out = []
    for raw in cfg.preference_pool:
        w = np.asarray(raw, dtype=np.float64)
        if w.shape != (cfg.cost_dim,):
            if cfg.preference_pool is not DEFAULT_PREFERENCE_POOL:
                raise ValidationError(
                    f"preference pool entry has {w.size} weights, "
                    f"expected {cfg.cost_dim}"
                )
            # adapt the built-in pool: truncate or pad with light weights
            if w.size > cfg.cost_dim:
                w = w[: cfg.cost_dim]
            else:
                w = np.concatenate([w, np.full(cfg.cost_dim - w.size, 0.1)])
        out.append(w / w.sum())
    return out


def single_leg_corpus(
    cfg: SynthConfig, network: RoadNetwork
) -> list[tuple[Trajectory, np.ndarray]]:
    """Planted single-preference trajectories with their true preferences."""
    rng = np.random.default_rng(cfg.rng_seed + 1)
    pool = _pool_alphas(cfg)
    out = []
    for i in range(cfg.num_trajectories):
        s, t = _sample_endpoints(cfg, network, rng)
        alpha = pool[int(rng.integers(len(pool)))]
        traj = generate_personalized_trajectory(
            network, alpha, s, t, traj_id=f"p{i}"
        )
        out.append((traj, alpha))
    return out


def _sample_via(
    network: RoadNetwork,
    rng: np.random.Generator,
    cur: int,
    t: int,
    alpha,
    off_path_prob: float,
) -> int:
    direct = routing.shortest_path(network, cur, t, alpha)
    on_path = {cur, t}
    for eid in direct.edges:
        e = network.edge(eid)
        on_path.add(e.source)
        on_path.add(e.target)
    force_off = rng.random() < off_path_prob
    nodes = network.node_ids
    while True:
        v = int(nodes[int(rng.integers(len(nodes)))])
        if v == cur or v == t:
            continue
        if force_off and v in on_path:
            continue
        return v


def adversarial_corpus(
    cfg: SynthConfig,
    network: RoadNetwork,
    dominated: tuple[int, ...],
    *,
    dominated_share: float = 0.5,
) -> list[Trajectory]:
    """Trajectories, a share of which are routed across a dominated edge.

    A path through a dominated edge always admits a componentwise cheaper
    alternative (swap in the bypass), so no segment containing that edge can
    satisfy a shortest-path criterion on the informative dimensions.
    """
    rng = np.random.default_rng(cfg.rng_seed + 5)
    pool = _pool_alphas(cfg)
    out: list[Trajectory] = []
    for i in range(cfg.num_trajectories):
        alpha = pool[int(rng.integers(len(pool)))]
        if rng.random() < dominated_share:
            eid = int(dominated[int(rng.integers(len(dominated)))])
            e = network.edge(eid)
            s, t = _sample_endpoints(cfg, network, rng)
            head = () if s == e.source else routing.shortest_path(
                network, s, e.source, alpha
            ).edges
            tail = () if e.target == t else routing.shortest_path(
                network, e.target, t, alpha
            ).edges
            out.append(Trajectory(id=f"a{i}", edges=head + (eid,) + tail))
        else:
            s, t = _sample_endpoints(cfg, network, rng)
            out.append(
                generate_personalized_trajectory(
                    network, alpha, s, t, traj_id=f"a{i}"
                )
            )
    return out


def noisy_planted_assets(
    cfg: SynthConfig,
) -> tuple[RoadNetwork, RoadNetwork, list[tuple[Trajectory, np.ndarray]]]:
    """Clean network, noisy twin for mining, and trajectories planted clean."""
    clean = generate_grid_network(cfg)
    corpus = single_leg_corpus(cfg, clean)
    skip = (cfg.informative_dims,) if cfg.include_unit_dim else ()
    noisy = add_cost_noise(
        clean, cfg.noise, np.random.default_rng(cfg.rng_seed + 4), skip_dims=skip
    )
    return clean, noisy, corpus


def stitched_corpus(
    cfg: SynthConfig, network: RoadNetwork
) -> list[tuple[list[TimedTrajectory], tuple[int, ...]]]:
    """Leg groups with ground-truth break positions, one group per journey."""
    rng = np.random.default_rng(cfg.rng_seed + 2)
    pool = _pool_alphas(cfg)
    out = []
    for i in range(cfg.num_trajectories):
        s, t = _sample_endpoints(cfg, network, rng)
        n_via = int(rng.integers(cfg.via_min, cfg.via_max + 1))
        points = [s]
        for _ in range(n_via):
            leg_alpha = pool[int(rng.integers(len(pool)))]
            via = _sample_via(
                network, rng, points[-1], t, leg_alpha, cfg.off_path_prob
            )
            points.append(via)
        points.append(t)
        alphas = [pool[int(rng.integers(len(pool)))] for _ in range(len(points) - 1)]
        legs, breaks = generate_stitched_trajectory(
            network,
            points,
            alphas,
            vehicle_id=f"veh{i}",
            id_prefix=f"j{i}",
            start_time=1_600_000_000.0 + 86_400.0 * i,
            gap_s=cfg.gap_s,
        )
        out.append((legs, breaks))
    return out
