"""Trajectories: connected edge sequences, optionally timed, with break points.

Node positions index the trajectory's node sequence v_0 .. v_k (k = number
of edges), so break points and segmentation boundaries are integers in
[0, k]. Interior positions are the meaningful ones.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import ValidationError
from .graph import RoadNetwork
from .routing import Path


@dataclass(frozen=True)
class Trajectory:
    """A driven, map-matched edge sequence."""

    id: str
    edges: tuple[int, ...]
    break_points: tuple[int, ...] = ()
    timestamps: tuple[float, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(int(e) for e in self.edges))
        object.__setattr__(
            self, "break_points", tuple(sorted(int(b) for b in self.break_points))
        )
        if self.timestamps is not None:
            object.__setattr__(
                self, "timestamps", tuple(float(t) for t in self.timestamps)
            )

    def __len__(self) -> int:
        return len(self.edges)

    def to_path(self, network: RoadNetwork) -> Path:
        first = network.edge(self.edges[0])
        last = network.edge(self.edges[-1])
        return Path(edges=self.edges, source=first.source, target=last.target)

    def node_sequence(self, network: RoadNetwork) -> tuple[int, ...]:
        nodes = [network.edge(self.edges[0]).source]
        for eid in self.edges:
            nodes.append(network.edge(eid).target)
        return tuple(nodes)


def validate_trajectory(network: RoadNetwork, traj: Trajectory) -> None:
    """Connectivity, break-point range, and timestamp monotonicity."""
    if not traj.edges:
        raise ValidationError(f"trajectory {traj.id}: empty edge sequence")
    prev_target = None
    for eid in traj.edges:
        e = network.edge(eid)
        if prev_target is not None and e.source != prev_target:
            raise ValidationError(
                f"trajectory {traj.id}: edge {eid} not incident to predecessor"
            )
        prev_target = e.target
    k = len(traj.edges)
    for b in traj.break_points:
        if not 0 <= b <= k:
            raise ValidationError(
                f"trajectory {traj.id}: break position {b} outside [0, {k}]"
            )
    if traj.timestamps is not None:
        if len(traj.timestamps) != k:
            raise ValidationError(
                f"trajectory {traj.id}: {len(traj.timestamps)} timestamps "
                f"for {k} edges"
            )
        if any(
            a > b for a, b in zip(traj.timestamps, traj.timestamps[1:])
        ):
            raise ValidationError(
                f"trajectory {traj.id}: timestamps must be non-decreasing"
            )


def strip_self_loops(network: RoadNetwork, traj: Trajectory) -> Trajectory:
    """Drop self-loop edges, remapping break points onto merged positions.

    A self-loop's two node positions collapse into one; a break point at
    either lands on the merged position. Removing a self-loop cannot break
    connectivity.
    """
    keep = [not network.edge(eid).is_self_loop for eid in traj.edges]
    if all(keep):
        return traj
    # offset[p] = number of removed edges strictly before node position p
    offsets = [0]
    removed = 0
    for flag in keep:
        if not flag:
            removed += 1
        offsets.append(removed)
    new_edges = tuple(e for e, f in zip(traj.edges, keep) if f)
    new_bps = tuple(sorted({b - offsets[b] for b in traj.break_points}))
    new_ts = None
    if traj.timestamps is not None:
        new_ts = tuple(t for t, f in zip(traj.timestamps, keep) if f)
    return replace(traj, edges=new_edges, break_points=new_bps, timestamps=new_ts)
