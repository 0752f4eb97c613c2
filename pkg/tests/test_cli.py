"""End-to-end pipeline through the command-line interface."""

import json
import os

import numpy as np
import pytest

from nsgvd import tensorio
from nsgvd.cli import main
from nsgvd.estimator import ArrayScoreProvider, NsgConfig, nsg_feature
from nsgvd.manifest import read_manifest


def run(*argv):
    return main(list(argv))


def tree_bytes(root):
    out = {}
    for dirpath, _, files in os.walk(root):
        for name in files:
            path = os.path.join(dirpath, name)
            out[os.path.relpath(path, root)] = open(path, "rb").read()
    return out


@pytest.fixture()
def small_run(tmp_path):
    """Generated data + extracted features for a tiny task."""
    gen = tmp_path / "gen"
    feats = tmp_path / "feats"
    assert run(
        "synth", "gen", "--out", str(gen), "--seed", "21",
        "--set", "synth.count_real=40", "--set", "synth.count_fake=40",
        "--set", "synth.d=4", "--set", "synth.frames=6",
    ) == 0
    assert run(
        "nsg", "extract", "--out", str(feats), "--set", f"nsg.manifest={gen}/manifest.tsv"
    ) == 0
    return gen, feats


class TestSynthGen:
    def test_zero_count_writes_empty_manifest(self, tmp_path):
        out = tmp_path / "empty"
        assert run("synth", "gen", "--out", str(out), "--seed", "1") == 0
        assert read_manifest(out / "manifest.tsv") == []

    def test_deterministic_tree(self, tmp_path):
        args = [
            "synth", "gen", "--seed", "5",
            "--set", "synth.count_real=3", "--set", "synth.count_fake=2",
            "--set", "synth.d=3", "--set", "synth.frames=4",
        ]
        a, b = tmp_path / "a", tmp_path / "b"
        assert run(*args, "--out", str(a)) == 0
        assert run(*args, "--out", str(b)) == 0
        ta, tb = tree_bytes(a), tree_bytes(b)
        assert set(ta) == set(tb)
        # config echo differs only in the output directory name
        assert all(ta[k] == tb[k] for k in ta if k != "config.txt")

    def test_counts_and_files(self, small_run):
        gen, _ = small_run
        entries = read_manifest(gen / "manifest.tsv")
        assert len(entries) == 80
        assert sum(e.label == "real" for e in entries) == 40
        for entry in entries[:5]:
            video = tensorio.read_tensor(gen / entry.video_path)
            scores = tensorio.read_tensor(gen / entry.score_path)
            assert video.shape == (6, 4)
            assert scores.shape == (6, 4)

    def test_full_scale_file_counts(self, tmp_path):
        out = tmp_path / "full"
        assert run(
            "synth", "gen", "--out", str(out), "--seed", "2",
            "--set", "synth.count_real=100", "--set", "synth.count_fake=100",
            "--set", "synth.d=16", "--set", "synth.frames=8",
        ) == 0
        assert len(list((out / "videos").iterdir())) == 200
        assert len(list((out / "scores").iterdir())) == 200
        assert len(read_manifest(out / "manifest.tsv")) == 200

    def test_rerun_from_echoed_config(self, tmp_path):
        out = tmp_path / "first"
        assert run(
            "synth", "gen", "--out", str(out), "--seed", "9",
            "--set", "synth.count_real=2", "--set", "synth.d=2", "--set", "synth.frames=3",
        ) == 0
        again = tmp_path / "again"
        assert run("synth", "gen", "--config", str(out / "config.txt"), "--out", str(again)) == 0
        ta, tb = tree_bytes(out), tree_bytes(again)
        assert all(ta[k] == tb[k] for k in ta if k != "config.txt")


class TestNsgExtract:
    def test_features_match_library_path(self, small_run):
        gen, feats = small_run
        entries = read_manifest(feats / "manifest.tsv")
        assert len(entries) == 80
        entry = entries[0]
        video = tensorio.read_tensor(gen / entry.video_path)
        provider = ArrayScoreProvider.from_file(gen / entry.score_path)
        expected = nsg_feature(video, provider, NsgConfig())
        written = tensorio.read_tensor(feats / entry.feature_path)
        np.testing.assert_allclose(
            written, expected.values.astype(np.float32).astype(np.float64), rtol=0, atol=0
        )
        sidecar = json.loads((feats / "features" / f"{entry.video_id}.flags.json").read_text())
        assert sidecar["denominators"] == [float(v) for v in expected.denominators]

    def test_oracle_scores_recover_closed_form(self, small_run):
        # scores came from the sampled gaussian process, so the written feature
        # of a static check frame must match score/(motion term + lambda)
        gen, feats = small_run
        entry = read_manifest(feats / "manifest.tsv")[0]
        video = tensorio.read_tensor(gen / entry.video_path)
        scores = tensorio.read_tensor(gen / entry.score_path)
        np.testing.assert_allclose(scores, -video, rtol=1e-7)  # sigma = 1

    def test_corrupt_score_file_names_path(self, small_run, tmp_path, capsys):
        gen, _ = small_run
        entry = read_manifest(gen / "manifest.tsv")[0]
        (gen / entry.score_path).write_bytes(b"XXXX" + b"\x00" * 20)
        code = run(
            "nsg", "extract", "--out", str(tmp_path / "bad"),
            "--set", f"nsg.manifest={gen}/manifest.tsv",
        )
        assert code == 2
        assert entry.video_id in capsys.readouterr().err


class TestKernelTrainAndDetect:
    @pytest.fixture()
    def trained(self, small_run, tmp_path):
        _, feats = small_run
        out = tmp_path / "train"
        assert run(
            "kernel", "train", "--out", str(out), "--seed", "3",
            "--set", f"train.manifest={feats}/manifest.tsv",
            "--set", "train.max_iters=10", "--set", "train.batch_size=8",
            "--set", "train.hidden=8", "--set", "train.output_dim=4",
        ) == 0
        return out

    def test_train_outputs(self, trained):
        assert (trained / "checkpoint.nsgk").exists()
        report = json.loads((trained / "train_report.json").read_text())
        assert report["iterations"] == 10
        assert len(report["objective_trace"]) == 10
        assert "seconds_per_iter" not in report  # timing lives in timings.json
        timings = json.loads((trained / "timings.json").read_text())
        assert len(timings["seconds_per_iter"]) == 10

    def test_train_determinism(self, small_run, tmp_path):
        _, feats = small_run
        args = [
            "kernel", "train", "--seed", "3",
            "--set", f"train.manifest={feats}/manifest.tsv",
            "--set", "train.max_iters=5", "--set", "train.batch_size=8",
            "--set", "train.hidden=8", "--set", "train.output_dim=4",
        ]
        a, b = tmp_path / "t1", tmp_path / "t2"
        assert run(*args, "--out", str(a)) == 0
        assert run(*args, "--out", str(b)) == 0
        assert (a / "checkpoint.nsgk").read_bytes() == (b / "checkpoint.nsgk").read_bytes()
        assert (a / "train_report.json").read_text() == (b / "train_report.json").read_text()

    def test_detect_outputs(self, small_run, trained, tmp_path):
        _, feats = small_run
        out = tmp_path / "det"
        assert run(
            "detect", "--out", str(out),
            "--set", f"detect.checkpoint={trained}/checkpoint.nsgk",
            "--set", f"detect.reference_manifest={feats}/manifest.tsv",
            "--set", f"detect.test_manifest={feats}/manifest.tsv",
            "--set", "detect.reference_size=10",
            "--set", "detect.sweep=0.7,0.9,1.1",
        ) == 0
        lines = (out / "results.jsonl").read_text().splitlines()
        assert len(lines) == 80
        record = json.loads(lines[0])
        assert set(record) == {"video_id", "Q", "decision", "flags"}
        metrics = json.loads((out / "metrics.json").read_text())
        assert set(metrics["confusion"]) == {"tp", "fp", "tn", "fn"}
        sweep = json.loads((out / "sweep.json").read_text())
        assert [m["tau"] for m in sweep] == [0.7, 0.9, 1.1]

    def test_missing_checkpoint(self, small_run, tmp_path):
        _, feats = small_run
        code = run(
            "detect", "--out", str(tmp_path / "x"),
            "--set", "detect.checkpoint=/nonexistent.nsgk",
            "--set", f"detect.reference_manifest={feats}/manifest.tsv",
            "--set", f"detect.test_manifest={feats}/manifest.tsv",
        )
        assert code == 2


class TestTheoryVerify:
    def test_empty_selection(self, tmp_path):
        out = tmp_path / "t"
        assert run("theory", "verify", "--out", str(out), "--set", "theory.checks=none") == 0
        report = json.loads((out / "theory_report.json").read_text())
        assert report == {"checks": [], "passed": True}

    def test_single_group_runs_and_passes(self, tmp_path):
        out = tmp_path / "t2"
        assert run(
            "theory", "verify", "--out", str(out),
            "--set", "theory.checks=norm-bounds", "--set", "theory.trials=20000",
        ) == 0
        report = json.loads((out / "theory_report.json").read_text())
        assert report["passed"] and len(report["checks"]) == 3

    def test_default_suite_passes(self, tmp_path):
        out = tmp_path / "full-battery"
        assert run("theory", "verify", "--out", str(out), "--seed", "0") == 0
        report = json.loads((out / "theory_report.json").read_text())
        assert report["passed"]
        assert len(report["checks"]) > 70

    def test_inadmissible_lambda_is_config_error(self, tmp_path):
        code = run(
            "theory", "verify", "--out", str(tmp_path / "t3"),
            "--set", "theory.checks=feature-distance",
            "--set", "theory.theorem_trials=10000",
            "--set", "theory.distance_lambda=0.1",
        )
        assert code == 1

    def test_unknown_check_rejected(self, tmp_path):
        assert run(
            "theory", "verify", "--out", str(tmp_path / "t4"), "--set", "theory.checks=bogus"
        ) == 1


def test_missing_out_dir_is_config_error(capsys):
    assert run("synth", "gen") == 1
    assert "output directory" in capsys.readouterr().err
