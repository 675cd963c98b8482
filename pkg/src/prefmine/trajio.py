"""Trajectory file format.

Line-oriented records, one trajectory per ``traj`` line plus optional
side records referencing it by id:

    traj <id> <edge_id> ...
    bp   <id> <node_position> ...
    ts   <id> <t_1> ... <t_k>          (one per edge)
    meta <id> <vehicle_id> <start_unix_s> <end_unix_s>

Comments start with ``#``. Output order follows input order, and floats
use shortest round-trip repr, so write -> read -> write is byte stable.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

from .errors import ParseError
from .trajectory import Trajectory


@dataclass(frozen=True)
class TrajectoryMeta:
    vehicle_id: str
    start_time: float
    end_time: float


def read_trajectories(source) -> tuple[list[Trajectory], dict[str, TrajectoryMeta]]:
    if isinstance(source, str) and "\n" in source:
        lines = source.splitlines()
    elif hasattr(source, "read"):
        lines = source.read().splitlines()
    else:
        with open(source, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()

    order: list[str] = []
    edges: dict[str, tuple[int, ...]] = {}
    bps: dict[str, tuple[int, ...]] = {}
    tss: dict[str, tuple[float, ...]] = {}
    metas: dict[str, TrajectoryMeta] = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        tag, rest = tokens[0], tokens[1:]
        where = f"line {lineno}"
        if not rest:
            raise ParseError(f"{where}: record without an id")
        tid = rest[0]
        try:
            if tag == "traj":
                if tid in edges:
                    raise ParseError(f"{where}: duplicate trajectory id {tid}")
                if len(rest) < 2:
                    raise ParseError(f"{where}: trajectory without edges")
                edges[tid] = tuple(int(tok) for tok in rest[1:])
                order.append(tid)
            elif tag == "bp":
                bps[tid] = tuple(int(tok) for tok in rest[1:])
            elif tag == "ts":
                tss[tid] = tuple(float(tok) for tok in rest[1:])
            elif tag == "meta":
                if len(rest) != 4:
                    raise ParseError(f"{where}: meta needs vehicle, start, end")
                metas[tid] = TrajectoryMeta(rest[1], float(rest[2]), float(rest[3]))
            else:
                raise ParseError(f"{where}: unknown record tag {tag!r}")
        except ValueError as exc:
            raise ParseError(f"{where}: {exc}") from None

    known = set(edges)
    for name, mapping in (("bp", bps), ("ts", tss), ("meta", metas)):
        unknown = set(mapping) - known
        if unknown:
            raise ParseError(
                f"{name} record(s) for unknown trajectory id(s): {sorted(unknown)}"
            )

    trajectories = [
        Trajectory(
            id=tid,
            edges=edges[tid],
            break_points=bps.get(tid, ()),
            timestamps=tss.get(tid),
        )
        for tid in order
    ]
    return trajectories, metas


def write_trajectories(
    target,
    trajectories,
    metas: dict[str, TrajectoryMeta] | None = None,
) -> str | None:
    buf = io.StringIO()
    metas = metas or {}
    for traj in trajectories:
        buf.write("traj %s %s\n" % (traj.id, " ".join(str(e) for e in traj.edges)))
        if traj.break_points:
            buf.write(
                "bp %s %s\n" % (traj.id, " ".join(str(b) for b in traj.break_points))
            )
        if traj.timestamps is not None:
            buf.write(
                "ts %s %s\n"
                % (traj.id, " ".join(repr(float(t)) for t in traj.timestamps))
            )
        meta = metas.get(traj.id)
        if meta is not None:
            buf.write(
                "meta %s %s %s %s\n"
                % (
                    traj.id,
                    meta.vehicle_id,
                    repr(float(meta.start_time)),
                    repr(float(meta.end_time)),
                )
            )
    text = buf.getvalue()
    if target is None:
        return text
    if hasattr(target, "write"):
        target.write(text)
        return None
    with open(target, "w", encoding="utf-8") as fh:
        fh.write(text)
    return None
