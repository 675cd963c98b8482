"""Parallel batch execution over trajectories.

One coordinator dispatches trajectories to a fork-based worker pool; the
network and run options live in a module-level context that children
inherit, so nothing heavy is pickled per task. Results return in input
order, which keeps output files byte-identical for any worker count.
Timing (wall and CPU per trajectory) is measured inside the worker and
reported separately from the deterministic records.
"""

from __future__ import annotations

import multiprocessing as mp
import time
from typing import Any, Callable

import numpy as np

from . import evaluation, preference, routing, segmentation
from .errors import UnsegmentableError
from .evaluation import stable_seed
from .graph import RoadNetwork
from .trajectory import Trajectory, strip_self_loops

_CTX: dict[str, Any] = {}

ALGO_RDP = "rdp"
ALGO_TTP = "ttp"
ALGO_BRP = "brp"
ALGO_PPTS = "ppts"


def parse_segment_algo(algo: str, network: RoadNetwork) -> segmentation.Criterion:
    """``ppts`` or ``opts:<cost_name>``."""
    if algo == ALGO_PPTS:
        return segmentation.Criterion.personalized_path()
    if algo.startswith("opts:"):
        name = algo.split(":", 1)[1]
        return segmentation.Criterion.optimal_path(network.cost_name_index(name))
    raise ValueError(f"unknown segmentation algorithm {algo!r}")


def run_batch(
    worker: Callable[[Trajectory], dict],
    trajectories: list[Trajectory],
    workers: int,
    context: dict[str, Any],
) -> list[dict]:
    """Run ``worker`` over all trajectories, preserving input order."""
    _CTX.clear()
    _CTX.update(context)
    if workers <= 1 or len(trajectories) <= 1:
        return [worker(t) for t in trajectories]
    ctx = mp.get_context("fork")
    chunk = max(1, len(trajectories) // (workers * 4))
    with ctx.Pool(processes=workers) as pool:
        return list(pool.imap(worker, trajectories, chunksize=chunk))


def _with_timing(fn: Callable[[Trajectory], dict], traj: Trajectory) -> dict:
    wall0 = time.perf_counter()
    cpu0 = time.process_time()
    record = fn(traj)
    record["_wall_ms"] = (time.perf_counter() - wall0) * 1e3
    record["_cpu_ms"] = (time.process_time() - cpu0) * 1e3
    return record


def pop_timing(records: list[dict]) -> list[dict]:
    """Strip in-place the timing fields; returns id/wall/cpu rows."""
    timing = []
    for rec in records:
        timing.append(
            {
                "id": rec["id"],
                "wall_ms": rec.pop("_wall_ms"),
                "cpu_ms": rec.pop("_cpu_ms"),
            }
        )
    return timing


# ----------------------------------------------------------------------
# Segmentation worker
# ----------------------------------------------------------------------


def segment_worker(traj: Trajectory) -> dict:
    return _with_timing(_segment_one, traj)


def _segment_one(traj: Trajectory) -> dict:
    network: RoadNetwork = _CTX["network"]
    criterion: segmentation.Criterion = _CTX["criterion"]
    eps: float = _CTX["eps"]
    algo: str = _CTX["algo"]

    stripped = strip_self_loops(network, traj)
    record: dict[str, Any] = {
        "id": stripped.id,
        "algorithm": algo,
        "num_edges": len(stripped.edges),
        "breaks": list(stripped.break_points),
    }
    try:
        seg = segmentation.segment(criterion, network, stripped, eps=eps)
    except UnsegmentableError:
        record.update(
            segmentable=False,
            boundaries=[],
            num_segments=0,
            alphas=None,
            brr=None,
            sr=None,
            sq=None,
            bp_distances=(
                [None] * len(stripped.break_points)
                if stripped.break_points
                else []
            ),
        )
        return record

    boundaries = list(seg.boundaries)
    record.update(
        segmentable=True,
        boundaries=boundaries,
        num_segments=seg.num_segments,
        alphas=(
            [[float(x) for x in a] for a in seg.preferences]
            if seg.preferences is not None
            else None
        ),
    )
    if stripped.break_points:
        bp = stripped.break_points
        record["brr"] = evaluation.brr(bp, boundaries)
        record["sr"] = evaluation.sr(bp, boundaries)
        record["sq"] = evaluation.sq(bp, boundaries)
        record["bp_distances"] = [
            None if d == float("inf") else d
            for d in evaluation.distance_to_next_sp(bp, boundaries)
        ]
    else:
        record.update(brr=None, sr=None, sq=None, bp_distances=[])
    return record


# ----------------------------------------------------------------------
# Mining worker
# ----------------------------------------------------------------------


def mine_worker(traj: Trajectory) -> dict:
    return _with_timing(_mine_one, traj)


def _mine_one(traj: Trajectory) -> dict:
    network: RoadNetwork = _CTX["network"]
    algo: str = _CTX["algo"]
    eps: float = _CTX["eps"]

    path = traj.to_path(network)
    round_trip = path.source == path.target
    iterations = 0
    constraints = 0
    if algo == ALGO_RDP:
        result = preference.recover_preference(network, path, eps=eps)
        alpha = result.alpha
        route = result.recovered_route
        delta = result.delta
        iterations = result.iterations
        constraints = result.constraints_added
    elif algo == ALGO_TTP:
        alpha = evaluation.ttp_preference(network.cost_dim, _CTX["tt_index"])
        route = routing.shortest_path(network, path.source, path.target, alpha)
        delta = _gap(network, path, route, alpha)
    elif algo == ALGO_BRP:
        eval_fn = (
            evaluation.rrro_objective
            if _CTX["brp_eval"] == "rrro"
            else evaluation.rcrs_objective
        )
        seed = stable_seed("brp", _CTX["seed"], traj.id)
        alpha = evaluation.brp_preference(network, traj, eval_fn, seed)
        route = routing.shortest_path(network, path.source, path.target, alpha)
        delta = _gap(network, path, route, alpha)
    else:
        raise ValueError(f"unknown mining algorithm {algo!r}")

    if round_trip:
        rrro_v, rcrs_v = 0.0, 0.0
    else:
        rrro_v = evaluation.rrro(traj.edges, route.edges)
        rcrs_v = evaluation.rcrs(network, traj, route, alpha, eps=eps)
    return {
        "id": traj.id,
        "algorithm": algo,
        "alpha": [float(x) for x in alpha],
        "delta": float(delta),
        "iterations": iterations,
        "constraints": constraints,
        "round_trip": round_trip,
        "rrro": rrro_v,
        "rcrs": rcrs_v,
        "recovered_len": len(route.edges),
        "num_edges": len(traj.edges),
    }


def _gap(network, path, route, alpha) -> float:
    p_traj = routing.personalized_cost(
        routing.path_cost_vector(path, network), alpha
    )
    p_route = routing.personalized_cost(
        routing.path_cost_vector(route, network), alpha
    )
    return max(0.0, p_traj - p_route)


# ----------------------------------------------------------------------
# Aggregation
# ----------------------------------------------------------------------


def _mean(values) -> float | None:
    vals = [v for v in values if v is not None]
    return float(np.mean(vals)) if vals else None


def summarize_segmentation(records: list[dict]) -> dict:
    """Whole-corpus view: segmentability plus break recovery over all rows."""
    flags = [r["segmentable"] for r in records]
    with_bp = [r for r in records if r["breaks"]]
    return {
        "count": len(records),
        "s_score": evaluation.s_score(flags) if records else None,
        "mean_brr_all": _mean(
            [r["brr"] if r["segmentable"] else 0.0 for r in with_bp]
        ),
        "mean_segments": _mean(
            [r["num_segments"] for r in records if r["segmentable"]]
        ),
    }


def summarize_mining(records: list[dict]) -> dict:
    return {
        "count": len(records),
        "mean_rrro": _mean([r["rrro"] for r in records]),
        "mean_rcrs": _mean([r["rcrs"] for r in records]),
        "mean_delta": _mean([r["delta"] for r in records]),
        "zero_delta_share": (
            float(np.mean([r["delta"] == 0.0 for r in records]))
            if records
            else None
        ),
    }


def commonly_segmentable_table(per_algo: dict[str, list[dict]]) -> dict:
    """Break metrics on the trajectories every algorithm can segment.

    Unsegmentable trajectories dominate the all-rows break recovery of weak
    algorithms, so the like-for-like comparison restricts to the common
    subset before averaging.
    """
    ids = None
    for records in per_algo.values():
        ok = {r["id"] for r in records if r["segmentable"] and r["breaks"]}
        ids = ok if ids is None else ids & ok
    ids = ids or set()
    table = {"count": len(ids), "algorithms": {}}
    for algo, records in per_algo.items():
        rows = [r for r in records if r["id"] in ids]
        table["algorithms"][algo] = {
            "mean_brr": _mean([r["brr"] for r in rows]),
            "mean_sr": _mean([r["sr"] for r in rows]),
            "mean_sq": _mean([r["sq"] for r in rows]),
        }
    return table
