import json
import os
from pathlib import Path

import pytest

from prefmine import cli


def run(argv):
    return cli.main(argv)


@pytest.fixture(scope="module")
def corpus_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("corpus")
    code = run(
        [
            "synth", "--out-dir", str(out), "--grid-w", "6", "--grid-h", "6",
            "--trajectories", "8", "--via-min", "1", "--via-max", "2",
            "--seed", "5",
        ]
    )
    assert code == 0
    return out


@pytest.fixture(scope="module")
def stitched_file(corpus_dir, tmp_path_factory):
    out = tmp_path_factory.mktemp("stitched") / "stitched.txt"
    code = run(
        [
            "stitch", "--network", str(corpus_dir / "network.txt"),
            "--trajectories", str(corpus_dir / "legs.txt"),
            "--out", str(out),
        ]
    )
    assert code == 0
    return out


class TestSynth:
    def test_outputs_exist(self, corpus_dir):
        assert (corpus_dir / "network.txt").exists()
        assert (corpus_dir / "legs.txt").exists()
        assert (corpus_dir / "truth.json").exists()

    def test_rerun_is_byte_identical(self, corpus_dir, tmp_path):
        again = tmp_path / "again"
        run(
            [
                "synth", "--out-dir", str(again), "--grid-w", "6",
                "--grid-h", "6", "--trajectories", "8", "--via-min", "1",
                "--via-max", "2", "--seed", "5",
            ]
        )
        for name in ("network.txt", "legs.txt", "truth.json"):
            assert (again / name).read_bytes() == (corpus_dir / name).read_bytes()

    def test_planted_mode_writes_trajectories(self, tmp_path):
        out = tmp_path / "planted"
        assert run(
            [
                "synth", "--out-dir", str(out), "--grid-w", "5", "--grid-h",
                "5", "--trajectories", "4", "--seed", "2",
            ]
        ) == 0
        assert (out / "trajectories.txt").exists()
        truth = json.loads((out / "truth.json").read_text())
        assert len(truth["alphas"]) == 4


class TestSegmentMine:
    def test_segment_and_outputs(self, corpus_dir, stitched_file, tmp_path):
        out = tmp_path / "seg.jsonl"
        code = run(
            [
                "segment", "--network", str(corpus_dir / "network.txt"),
                "--trajectories", str(stitched_file),
                "--algo", "ppts", "--out", str(out),
            ]
        )
        assert code == 0
        records = [json.loads(line) for line in out.read_text().splitlines()]
        assert all(r["algorithm"] == "ppts" for r in records)
        assert (tmp_path / "seg.jsonl.summary.json").exists()
        assert (tmp_path / "seg.jsonl.timing.csv").exists()

    def test_worker_counts_give_identical_bytes(
        self, corpus_dir, stitched_file, tmp_path
    ):
        outs = {}
        for workers in ("1", "2"):
            out = tmp_path / f"seg_w{workers}.jsonl"
            assert run(
                [
                    "segment", "--network", str(corpus_dir / "network.txt"),
                    "--trajectories", str(stitched_file),
                    "--algo", "ppts", "--workers", workers,
                    "--out", str(out),
                ]
            ) == 0
            outs[workers] = out.read_bytes()
        assert outs["1"] == outs["2"]

    def test_mine_all_algorithms(self, corpus_dir, stitched_file, tmp_path):
        for algo in ("rdp", "ttp", "brp"):
            out = tmp_path / f"mine_{algo}.jsonl"
            assert run(
                [
                    "mine", "--network", str(corpus_dir / "network.txt"),
                    "--trajectories", str(stitched_file),
                    "--algo", algo, "--out", str(out), "--seed", "3",
                ]
            ) == 0
            records = [json.loads(l) for l in out.read_text().splitlines()]
            assert all(0 <= r["rcrs"] <= 1 for r in records)
            assert all(0 <= r["rrro"] <= 1 for r in records)
            if algo == "rdp":
                assert all(r["delta"] >= 0 for r in records)

    def test_csv_format(self, corpus_dir, stitched_file, tmp_path):
        out = tmp_path / "seg.csv"
        assert run(
            [
                "segment", "--network", str(corpus_dir / "network.txt"),
                "--trajectories", str(stitched_file),
                "--algo", "opts:travel_time", "--out", str(out),
                "--format", "csv",
            ]
        ) == 0
        header = out.read_text().splitlines()[0]
        assert header.startswith("id,algorithm,segmentable")


class TestEval:
    def test_merged_report(self, corpus_dir, stitched_file, tmp_path):
        seg_out = tmp_path / "seg.jsonl"
        mine_out = tmp_path / "mine.jsonl"
        run(
            [
                "segment", "--network", str(corpus_dir / "network.txt"),
                "--trajectories", str(stitched_file), "--algo", "ppts",
                "--out", str(seg_out),
            ]
        )
        run(
            [
                "mine", "--network", str(corpus_dir / "network.txt"),
                "--trajectories", str(stitched_file), "--algo", "rdp",
                "--out", str(mine_out),
            ]
        )
        report = tmp_path / "report"
        assert run(
            ["eval", "--inputs", str(seg_out), str(mine_out), "--out", str(report)]
        ) == 0
        text = report.read_text().splitlines()
        assert text[0] == "id,algorithm,brr,sr,sq,segmentable,rrro,rcrs,delta,iterations,wall_ms"
        summary = json.loads((tmp_path / "report.summary.json").read_text())
        assert "segmentation" in summary and "mining" in summary
        assert (tmp_path / "report.distcdf.csv").exists()


class TestBench:
    def test_bench_compares_kernels(self, corpus_dir, stitched_file, tmp_path):
        out = tmp_path / "bench.json"
        assert run(
            [
                "bench", "--network", str(corpus_dir / "network.txt"),
                "--trajectories", str(stitched_file), "--algo", "rdp",
                "--kernel", "both", "--out", str(out),
            ]
        ) == 0
        report = json.loads(out.read_text())
        assert "python" in report["kernels"]
        for stats in report["kernels"].values():
            assert stats["per_trajectory_wall"]["mean_ms"] > 0


class TestExitCodes:
    def test_missing_file_is_data_error(self, tmp_path):
        assert run(
            [
                "segment", "--network", str(tmp_path / "nope.txt"),
                "--trajectories", str(tmp_path / "nope2.txt"),
                "--out", str(tmp_path / "o"),
            ]
        ) == cli.EXIT_DATA

    def test_bad_flag_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            run(["segment", "--bogus"])
        assert exc.value.code == cli.EXIT_USAGE

    def test_unknown_algo_is_usage_error(self, corpus_dir, stitched_file, tmp_path):
        assert run(
            [
                "segment", "--network", str(corpus_dir / "network.txt"),
                "--trajectories", str(stitched_file),
                "--algo", "zigzag", "--out", str(tmp_path / "o"),
            ]
        ) == cli.EXIT_USAGE

    def test_unknown_cost_name_is_data_error(
        self, corpus_dir, stitched_file, tmp_path
    ):
        assert run(
            [
                "segment", "--network", str(corpus_dir / "network.txt"),
                "--trajectories", str(stitched_file),
                "--algo", "opts:nope", "--out", str(tmp_path / "o"),
            ]
        ) == cli.EXIT_DATA

    def test_empty_input_gives_empty_report(self, corpus_dir, tmp_path):
        empty = tmp_path / "empty.txt"
        empty.write_text("# nothing\n")
        out = tmp_path / "seg.jsonl"
        assert run(
            [
                "segment", "--network", str(corpus_dir / "network.txt"),
                "--trajectories", str(empty), "--algo", "ppts",
                "--out", str(out),
            ]
        ) == 0
        assert out.read_text() == ""
