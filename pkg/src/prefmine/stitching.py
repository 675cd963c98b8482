"""Stitch temporally consecutive per-vehicle trajectories into longer ones.

Two consecutive trajectories merge when the temporal gap between them is at
most the threshold and they are pseudo-connected: the length-shortest route
from the end of the first to the start of the second has at most one edge
or is shorter than the length threshold. Each stitch inserts that connector
route and records a break point at the node position where the second
trajectory resumes.

Lengths come from a designated cost dimension (named ``length_m`` by
default) holding meters; stitch on raw, unnormalized networks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import routing
from .errors import NoPathError, UnsortedInputError, ValidationError
from .graph import RoadNetwork
from .routing import Path
from .trajectory import Trajectory

DEFAULT_GAP_MAX_S = 30.0 * 60.0
DEFAULT_LEN_MAX_M = 200.0
LENGTH_DIM_NAME = "length_m"


@dataclass(frozen=True)
class TimedTrajectory:
    """One original trajectory with its vehicle and time span."""

    trajectory: Trajectory
    vehicle_id: str
    start_time: float
    end_time: float

    def __post_init__(self):
        if self.start_time > self.end_time:
            raise ValidationError(
                f"trajectory {self.trajectory.id}: start time after end time"
            )


@dataclass(frozen=True)
class StitchedTrajectory:
    """A maximal run of stitched trajectories for one vehicle."""

    trajectory: Trajectory
    stitch_edges: tuple[int, ...]
    vehicle_id: str
    start_time: float
    end_time: float
    source_ids: tuple[str, ...]

    @property
    def break_points(self) -> tuple[int, ...]:
        return self.trajectory.break_points


def _resolve_length_dim(network: RoadNetwork, length_dim) -> int:
    if length_dim is None:
        return network.cost_name_index(LENGTH_DIM_NAME)
    if isinstance(length_dim, str):
        return network.cost_name_index(length_dim)
    i = int(length_dim)
    if not 0 <= i < network.cost_dim:
        raise ValidationError(f"length dimension {i} out of range")
    return i


def pseudo_connected(
    network: RoadNetwork,
    t1: Trajectory,
    t2: Trajectory,
    *,
    len_max_m: float = DEFAULT_LEN_MAX_M,
    length_dim=None,
) -> Path | None:
    """Connector route from the end of t1 to the start of t2, if short enough.

    Returns the length-shortest route when it has at most one edge or is
    shorter than ``len_max_m`` (an empty route when the endpoints
    coincide); None otherwise.
    """
    end = network.edge(t1.edges[-1]).target
    start = network.edge(t2.edges[0]).source
    if end == start:
        return routing.empty_path(end)
    dim = _resolve_length_dim(network, length_dim)
    pref = np.zeros(network.cost_dim)
    pref[dim] = 1.0
    try:
        route = routing.shortest_path(network, end, start, pref, validate=False)
    except NoPathError:
        return None
    if len(route) <= 1:
        return route
    length = routing.personalized_cost(route, pref, network)
    if length < len_max_m:
        return route
    return None


def stitch_all(
    network: RoadNetwork,
    timed: list[TimedTrajectory],
    *,
    gap_max_s: float = DEFAULT_GAP_MAX_S,
    len_max_m: float = DEFAULT_LEN_MAX_M,
    length_dim=None,
) -> list[StitchedTrajectory]:
    """Fold each vehicle's temporally ordered trajectories into stitched ones.

    The running end time always tracks the last stitched piece. Output
    order: vehicles in first-appearance order, temporal order within a
    vehicle. Every input either starts an output or contributes exactly
    one break point, so len(outputs) + total break points == len(inputs).
    """
    by_vehicle: dict[str, list[TimedTrajectory]] = {}
    for tt in timed:
        by_vehicle.setdefault(tt.vehicle_id, []).append(tt)

    out: list[StitchedTrajectory] = []
    for vehicle, items in by_vehicle.items():
        for a, b in zip(items, items[1:]):
            if b.start_time < a.start_time:
                raise UnsortedInputError(
                    f"vehicle {vehicle}: trajectories not sorted by start time"
                )
        out.extend(
            _stitch_vehicle(
                network, vehicle, items, gap_max_s, len_max_m, length_dim
            )
        )
    return out


def _stitch_vehicle(
    network: RoadNetwork,
    vehicle: str,
    items: list[TimedTrajectory],
    gap_max_s: float,
    len_max_m: float,
    length_dim,
) -> list[StitchedTrajectory]:
    results: list[StitchedTrajectory] = []
    cur_edges = list(items[0].trajectory.edges)
    cur_bps: list[int] = []
    cur_stitch: list[int] = []
    cur_sources = [items[0].trajectory.id]
    cur_start = items[0].start_time
    cur_end = items[0].end_time
    cur_first = items[0].trajectory

    def flush():
        results.append(
            StitchedTrajectory(
                trajectory=Trajectory(
                    id=f"{vehicle}_{len(results)}",
                    edges=tuple(cur_edges),
                    break_points=tuple(cur_bps),
                ),
                stitch_edges=tuple(cur_stitch),
                vehicle_id=vehicle,
                start_time=cur_start,
                end_time=cur_end,
                source_ids=tuple(cur_sources),
            )
        )

    for nxt in items[1:]:
        connector = None
        if nxt.start_time - cur_end <= gap_max_s:
            # The connector query only needs the tail edge of the current
            # run, so a one-edge stand-in trajectory suffices.
            tail = Trajectory(id="_cur", edges=(cur_edges[-1],))
            connector = pseudo_connected(
                network,
                tail,
                nxt.trajectory,
                len_max_m=len_max_m,
                length_dim=length_dim,
            )
        if connector is not None:
            cur_stitch.extend(
                range(len(cur_edges), len(cur_edges) + len(connector.edges))
            )
            cur_edges.extend(connector.edges)
            cur_bps.append(len(cur_edges))
            cur_edges.extend(nxt.trajectory.edges)
            cur_sources.append(nxt.trajectory.id)
            cur_end = nxt.end_time
        else:
            flush()
            cur_edges = list(nxt.trajectory.edges)
            cur_bps = []
            cur_stitch = []
            cur_sources = [nxt.trajectory.id]
            cur_start = nxt.start_time
            cur_end = nxt.end_time
            cur_first = nxt.trajectory
    flush()
    return results
