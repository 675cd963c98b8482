"""Batch command line: synth -> stitch -> segment -> mine -> eval -> bench.

Exit codes: 0 success, 1 usage error, 2 data error (parse/validation/bad
references), 3 internal error (LP failure, oracle divergence). Outputs are
deterministic for a fixed seed and identical for any worker count; per-
trajectory wall/CPU times go to a separate ``<out>.timing.csv`` sidecar so
the result files stay byte-comparable.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time
from pathlib import Path as FsPath

import numpy as np

from . import _kernel, batch, evaluation, preference, stitching, synth, trajio
from .errors import (
    NoPathError,
    NumericalFailure,
    OracleDivergence,
    ParseError,
    PrefmineError,
    UnsortedInputError,
    ValidationError,
)
from .graph import dump_network, load_network, normalize_costs

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3

SEGMENT_CSV_COLUMNS = [
    "id", "algorithm", "segmentable", "num_edges", "num_segments",
    "boundaries", "breaks", "brr", "sr", "sq", "bp_distances", "alphas",
]
MINE_CSV_COLUMNS = [
    "id", "algorithm", "round_trip", "alpha", "delta", "iterations",
    "constraints", "rrro", "rcrs", "recovered_len", "num_edges",
]
EVAL_CSV_COLUMNS = [
    "id", "algorithm", "brr", "sr", "sq", "segmentable", "rrro", "rcrs",
    "delta", "iterations", "wall_ms",
]


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fmt_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return ";".join(_fmt_cell(v) for v in value)
    return str(value)


def write_records(path, records: list[dict], columns: list[str], fmt: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        if fmt == "jsonl":
            for rec in records:
                fh.write(json.dumps(rec, sort_keys=True) + "\n")
        else:
            writer = csv.writer(fh)
            writer.writerow(columns)
            for rec in records:
                writer.writerow([_fmt_cell(rec.get(col)) for col in columns])


def read_records(path) -> list[dict]:
    """Read back a JSONL record file written by segment/mine."""
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if not line.startswith("{"):
                raise ParseError(
                    f"{path}: eval consumes JSONL record files "
                    "(rerun segment/mine with --format jsonl)"
                )
            records.append(json.loads(line))
    return records


def write_timing(out_path, timing: list[dict]) -> None:
    side = str(out_path) + ".timing.csv"
    with open(side, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "wall_ms", "cpu_ms"])
        for row in timing:
            writer.writerow([row["id"], f"{row['wall_ms']:.3f}", f"{row['cpu_ms']:.3f}"])


def read_timing(record_path) -> dict[str, float]:
    side = FsPath(str(record_path) + ".timing.csv")
    if not side.exists():
        return {}
    out = {}
    with open(side, "r", encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            out[row["id"]] = float(row["wall_ms"])
    return out


def _write_json(path, payload) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ----------------------------------------------------------------------
# synth
# ----------------------------------------------------------------------


def cmd_synth(args) -> int:
    cfg = synth.SynthConfig(
        grid_w=args.grid_w,
        grid_h=args.grid_h,
        cost_dim=args.dim,
        include_unit_dim=not args.no_unit_dim,
        rng_seed=args.seed,
        num_trajectories=args.trajectories,
        via_min=args.via_min,
        via_max=args.via_max,
        off_path_prob=args.off_path_prob,
        noise=args.noise,
        adversarial_edges=args.adversarial,
        gap_s=args.gap_min * 60.0,
    )
    out_dir = FsPath(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    truth: dict = {"config": {"seed": cfg.rng_seed, "grid": [cfg.grid_w, cfg.grid_h]}}

    if cfg.adversarial_edges:
        network, dominated = synth.generate_adversarial_network(cfg)
        corpus = synth.adversarial_corpus(cfg, network, dominated)
        dump_network(network, out_dir / "network.txt")
        trajio.write_trajectories(out_dir / "trajectories.txt", corpus)
        truth["dominated_edges"] = list(dominated)
    elif cfg.via_max > 0:
        network = synth.generate_grid_network(cfg)
        dump_network(network, out_dir / "network.txt")
        groups = synth.stitched_corpus(cfg, network)
        legs = [leg for group, _ in groups for leg in group]
        metas = {
            leg.trajectory.id: trajio.TrajectoryMeta(
                leg.vehicle_id, leg.start_time, leg.end_time
            )
            for leg in legs
        }
        trajio.write_trajectories(
            out_dir / "legs.txt", [leg.trajectory for leg in legs], metas
        )
        truth["journeys"] = [
            {
                "legs": [leg.trajectory.id for leg in group],
                "breaks": list(breaks),
                "vehicle": group[0].vehicle_id,
            }
            for group, breaks in groups
        ]
    else:
        if cfg.noise > 0:
            clean, network, corpus = synth.noisy_planted_assets(cfg)
            dump_network(clean, out_dir / "network_clean.txt")
        else:
            network = synth.generate_grid_network(cfg)
            corpus = synth.single_leg_corpus(cfg, network)
        dump_network(network, out_dir / "network.txt")
        trajio.write_trajectories(out_dir / "trajectories.txt", [t for t, _ in corpus])
        truth["alphas"] = {t.id: [float(x) for x in a] for t, a in corpus}

    _write_json(out_dir / "truth.json", truth)
    print(f"synth: wrote {out_dir} (network: {network.num_nodes} nodes, "
          f"{network.num_edges} edges)")
    return EXIT_OK


# ----------------------------------------------------------------------
# stitch
# ----------------------------------------------------------------------


def cmd_stitch(args) -> int:
    network = load_network(args.network)
    trajectories, metas = trajio.read_trajectories(args.trajectories)
    timed = []
    for traj in trajectories:
        meta = metas.get(traj.id)
        if meta is None:
            raise ValidationError(f"trajectory {traj.id} lacks a meta record")
        timed.append(
            stitching.TimedTrajectory(
                trajectory=traj,
                vehicle_id=meta.vehicle_id,
                start_time=meta.start_time,
                end_time=meta.end_time,
            )
        )
    stitched = stitching.stitch_all(
        network,
        timed,
        gap_max_s=args.gap_max_min * 60.0,
        len_max_m=args.stitch_len_m,
    )
    out_metas = {
        st.trajectory.id: trajio.TrajectoryMeta(
            st.vehicle_id, st.start_time, st.end_time
        )
        for st in stitched
    }
    trajio.write_trajectories(
        args.out, [st.trajectory for st in stitched], out_metas
    )
    n_breaks = sum(len(st.break_points) for st in stitched)
    print(
        f"stitch: {len(timed)} inputs -> {len(stitched)} outputs, "
        f"{n_breaks} break points"
    )
    return EXIT_OK


# ----------------------------------------------------------------------
# segment / mine
# ----------------------------------------------------------------------


def _load_inputs(args):
    network = normalize_costs(load_network(args.network))
    trajectories, _ = trajio.read_trajectories(args.trajectories)
    return network, trajectories


def cmd_segment(args) -> int:
    network, trajectories = _load_inputs(args)
    criterion = batch.parse_segment_algo(args.algo, network)
    context = {
        "network": network,
        "criterion": criterion,
        "algo": args.algo,
        "eps": args.eps,
    }
    records = batch.run_batch(
        batch.segment_worker, trajectories, args.workers, context
    )
    timing = batch.pop_timing(records)
    write_records(args.out, records, SEGMENT_CSV_COLUMNS, args.format)
    write_timing(args.out, timing)
    _write_json(
        str(args.out) + ".summary.json",
        {args.algo: batch.summarize_segmentation(records)},
    )
    summary = batch.summarize_segmentation(records)
    score = summary["s_score"]
    print(
        f"segment[{args.algo}]: {len(records)} trajectories"
        + (f", s_score={score:.1f}%" if score is not None else "")
    )
    return EXIT_OK


def cmd_mine(args) -> int:
    network, trajectories = _load_inputs(args)
    context = {
        "network": network,
        "algo": args.algo,
        "eps": args.eps,
        "seed": args.seed,
        "tt_index": network.cost_name_index(args.travel_time_name)
        if args.algo == batch.ALGO_TTP
        else None,
        "brp_eval": args.brp_eval,
    }
    records = batch.run_batch(batch.mine_worker, trajectories, args.workers, context)
    timing = batch.pop_timing(records)
    write_records(args.out, records, MINE_CSV_COLUMNS, args.format)
    write_timing(args.out, timing)
    _write_json(
        str(args.out) + ".summary.json",
        {args.algo: batch.summarize_mining(records)},
    )
    summary = batch.summarize_mining(records)
    tail = ""
    if summary["mean_rcrs"] is not None:
        tail = (
            f", mean_rcrs={summary['mean_rcrs']:.4f}"
            f" mean_rrro={summary['mean_rrro']:.4f}"
        )
    print(f"mine[{args.algo}]: {len(records)} trajectories{tail}")
    return EXIT_OK


# ----------------------------------------------------------------------
# eval
# ----------------------------------------------------------------------


def cmd_eval(args) -> int:
    per_algo: dict[str, list[dict]] = {}
    wall_by_id: dict[tuple[str, str], float] = {}
    for path in args.inputs:
        records = read_records(path)
        if not records:
            continue
        walls = read_timing(path)
        algo = records[0]["algorithm"]
        per_algo.setdefault(algo, []).extend(records)
        for rec in records:
            if rec["id"] in walls:
                wall_by_id[(algo, rec["id"])] = walls[rec["id"]]

    rows = []
    for algo, records in per_algo.items():
        for rec in records:
            rows.append(
                {
                    "id": rec["id"],
                    "algorithm": algo,
                    "brr": rec.get("brr"),
                    "sr": rec.get("sr"),
                    "sq": rec.get("sq"),
                    "segmentable": rec.get("segmentable"),
                    "rrro": rec.get("rrro"),
                    "rcrs": rec.get("rcrs"),
                    "delta": rec.get("delta"),
                    "iterations": rec.get("iterations"),
                    "wall_ms": wall_by_id.get((algo, rec["id"])),
                }
            )
    write_records(args.out, rows, EVAL_CSV_COLUMNS, "csv")

    summary: dict = {}
    seg_algos = {
        a: recs for a, recs in per_algo.items() if "segmentable" in recs[0]
    }
    mine_algos = {a: recs for a, recs in per_algo.items() if "rcrs" in recs[0]}
    if seg_algos:
        summary["segmentation"] = {
            "all": {
                a: batch.summarize_segmentation(r) for a, r in seg_algos.items()
            },
            "commonly_segmentable": batch.commonly_segmentable_table(seg_algos),
        }
        cdf_rows = []
        for algo, recs in seg_algos.items():
            dists = []
            for rec in recs:
                for dist in rec.get("bp_distances") or []:
                    dists.append(math.inf if dist is None else dist)
            for hops, share in evaluation.distance_cdf(dists):
                cdf_rows.append(
                    {"algorithm": algo, "hops": hops, "share": share}
                )
        with open(
            str(args.out) + ".distcdf.csv", "w", encoding="utf-8", newline=""
        ) as fh:
            writer = csv.writer(fh)
            writer.writerow(["algorithm", "hops", "share"])
            for row in cdf_rows:
                writer.writerow([row["algorithm"], row["hops"], repr(row["share"])])
    if mine_algos:
        summary["mining"] = {
            a: batch.summarize_mining(r) for a, r in mine_algos.items()
        }
    _write_json(str(args.out) + ".summary.json", summary)
    print(f"eval: {sum(len(r) for r in per_algo.values())} rows -> {args.out}")
    return EXIT_OK


# ----------------------------------------------------------------------
# bench
# ----------------------------------------------------------------------


def _timing_stats(timing: list[dict], key: str) -> dict:
    values = np.array([row[key] for row in timing])
    return {
        "mean_ms": float(values.mean()),
        "median_ms": float(np.median(values)),
        "p99_ms": float(np.percentile(values, 99)),
        "max_ms": float(values.max()),
    }


def cmd_bench(args) -> int:
    network, trajectories = _load_inputs(args)
    kernels = (
        list(_kernel.available_backends())
        if args.kernel == "both"
        else [args.kernel]
    )
    report = {
        "network": {
            "nodes": network.num_nodes,
            "edges": network.num_edges,
            "cost_dim": network.cost_dim,
        },
        "trajectories": len(trajectories),
        "workers": args.workers,
        "algo": args.algo,
        "kernels": {},
    }
    for kernel_name in kernels:
        active = _kernel.use(kernel_name)
        if args.algo in (batch.ALGO_RDP, batch.ALGO_TTP, batch.ALGO_BRP):
            worker = batch.mine_worker
            context = {
                "network": network,
                "algo": args.algo,
                "eps": args.eps,
                "seed": args.seed,
                "tt_index": 0 if args.algo == batch.ALGO_TTP else None,
                "brp_eval": args.brp_eval,
            }
        else:
            worker = batch.segment_worker
            context = {
                "network": network,
                "criterion": batch.parse_segment_algo(args.algo, network),
                "algo": args.algo,
                "eps": args.eps,
            }
        wall0 = time.perf_counter()
        records = batch.run_batch(worker, trajectories, args.workers, context)
        elapsed = time.perf_counter() - wall0
        timing = batch.pop_timing(records)
        report["kernels"][active] = {
            "total_wall_s": elapsed,
            "throughput_per_s": len(trajectories) / elapsed if elapsed else None,
            "per_trajectory_wall": _timing_stats(timing, "wall_ms"),
            "per_trajectory_cpu": _timing_stats(timing, "cpu_ms"),
        }
    _kernel.use(os.environ.get("PREFMINE_KERNEL", "auto"))
    _write_json(args.out, report)
    for name, stats in report["kernels"].items():
        print(
            f"bench[{args.algo}] kernel={name}: "
            f"mean {stats['per_trajectory_cpu']['mean_ms']:.2f} ms cpu, "
            f"{stats['per_trajectory_wall']['mean_ms']:.2f} ms wall per trajectory"
        )
    return EXIT_OK


# ----------------------------------------------------------------------
# parser
# ----------------------------------------------------------------------


def _default_eps() -> float:
    return preference.oracle_eps()


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="prefmine", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic network and corpus")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--grid-w", type=int, default=10)
    p.add_argument("--grid-h", type=int, default=10)
    p.add_argument("--dim", type=int, default=4)
    p.add_argument("--no-unit-dim", action="store_true")
    p.add_argument("--trajectories", type=int, default=100)
    p.add_argument("--via-min", type=int, default=0)
    p.add_argument("--via-max", type=int, default=0)
    p.add_argument("--off-path-prob", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--adversarial", type=int, default=0)
    p.add_argument("--gap-min", type=float, default=10.0)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("stitch", help="stitch per-vehicle trajectories")
    p.add_argument("--network", required=True)
    p.add_argument("--trajectories", required=True)
    p.add_argument("--gap-max-min", type=float, default=30.0)
    p.add_argument("--stitch-len-m", type=float, default=200.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_stitch)

    p = sub.add_parser("segment", help="segment trajectories")
    p.add_argument("--network", required=True)
    p.add_argument("--trajectories", required=True)
    p.add_argument("--algo", default="ppts", help="ppts or opts:<cost_name>")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--eps", type=float, default=_default_eps())
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=["csv", "jsonl"], default="jsonl")
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("mine", help="mine driving preferences")
    p.add_argument("--network", required=True)
    p.add_argument("--trajectories", required=True)
    p.add_argument("--algo", choices=["rdp", "ttp", "brp"], default="rdp")
    p.add_argument("--brp-eval", choices=["rcrs", "rrro"], default="rcrs")
    p.add_argument("--travel-time-name", default="travel_time")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--eps", type=float, default=_default_eps())
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=["csv", "jsonl"], default="jsonl")
    p.set_defaults(func=cmd_mine)

    p = sub.add_parser("eval", help="merge record files into reports")
    p.add_argument("--inputs", nargs="+", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bench", help="latency benchmark, optionally per kernel")
    p.add_argument("--network", required=True)
    p.add_argument("--trajectories", required=True)
    p.add_argument("--algo", default="rdp")
    p.add_argument("--brp-eval", choices=["rcrs", "rrro"], default="rcrs")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--eps", type=float, default=_default_eps())
    p.add_argument(
        "--kernel",
        choices=["auto", "both", "cython", "python"],
        default="auto",
    )
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"prefmine: missing file: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ParseError, ValidationError, UnsortedInputError, NoPathError) as exc:
        print(f"prefmine: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (NumericalFailure, OracleDivergence) as exc:
        print(f"prefmine: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except PrefmineError as exc:
        print(f"prefmine: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"prefmine: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
