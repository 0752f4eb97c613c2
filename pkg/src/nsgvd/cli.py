"""Command-line pipeline driver.

Subcommands: `synth gen`, `nsg extract`, `kernel train`, `detect`,
`theory verify`. Each takes an optional plain-text config file plus
`--set key=value` overrides, echoes the effective configuration into the
output directory, and is bit-reproducible for a fixed seed in single-threaded
mode. Exit codes: 0 success, 1 validation/config error, 2 data error,
3 verification failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import detector as det
from . import estimator, kernel, manifest, mmd, synth, tensorio, theory
from .config import Config, dump_config, load_config
from .errors import (
    AdmissibilityError,
    ConfigError,
    DataError,
    InsufficientDataError,
    NsgvdError,
    VerificationError,
)
from .rng import substream

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DATA = 2
EXIT_VERIFY = 3


def _echo_config(out_dir: str, effective: dict[str, str]) -> None:
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "config.txt"), "w", encoding="utf-8") as fh:
        fh.write(dump_config(effective))


def _write_json(path, payload) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _resolve(path: str, base: str) -> str:
    return path if os.path.isabs(path) else os.path.join(base, path)


def _schedule_from(cfg: Config, prefix: str) -> synth.SigmaSchedule:
    return synth.SigmaSchedule(
        cfg.get(f"{prefix}.schedule", "constant"),
        cfg.get_float(f"{prefix}.sigma_a", 1.0),
        cfg.get_float(f"{prefix}.sigma_b", 0.0),
    )


def _nsg_config(cfg: Config) -> estimator.NsgConfig:
    return estimator.NsgConfig(
        lambda_nsg=cfg.get_float("nsg.lambda", 0.1),
        delta_t=cfg.get_float("nsg.delta_t", 1.0),
        last_frame_rule=cfg.get("nsg.last_frame_rule", estimator.BACKWARD_DIFFERENCE),
        denominator_floor=cfg.get_float("nsg.denominator_floor", 1e-6),
    )


# --- synth gen ---------------------------------------------------------------


def cmd_synth_gen(cfg: Config, out_dir: str) -> int:
    seed = cfg.get_int("global.seed", 0)
    d = cfg.get_int("synth.d", 16)
    frames = cfg.get_int("synth.frames", 8)
    count_real = cfg.get_int("synth.count_real", 0)
    count_fake = cfg.get_int("synth.count_fake", 0)
    mu_norm = cfg.get_float("synth.mu_norm", 1.0)
    write_scores = cfg.get_bool("synth.write_scores", True)
    schedule = _schedule_from(cfg, "synth")

    effective = {
        "global.seed": str(seed),
        "global.out": out_dir,
        "synth.d": str(d),
        "synth.frames": str(frames),
        "synth.count_real": str(count_real),
        "synth.count_fake": str(count_fake),
        "synth.mu_norm": repr(mu_norm),
        "synth.schedule": schedule.kind,
        "synth.sigma_a": repr(schedule.a),
        "synth.sigma_b": repr(schedule.b),
        "synth.write_scores": str(write_scores).lower(),
    }
    _echo_config(out_dir, effective)
    os.makedirs(os.path.join(out_dir, "videos"), exist_ok=True)
    if write_scores:
        os.makedirs(os.path.join(out_dir, "scores"), exist_ok=True)

    entries = []
    for label, count in (("real", count_real), ("fake", count_fake)):
        spec = (
            synth.GaussianProcessSpec.real(d, frames, schedule, seed)
            if label == "real"
            else synth.GaussianProcessSpec.fake(d, frames, mu_norm, schedule, seed)
        )
        for i in range(count):
            video_id = f"{label}-{i:05d}"
            rng = substream(seed, "video", label, i)
            video = synth.sample_video(spec, rng)
            # scores are computed from the float32 frames actually stored, so
            # any extractor recomputing from the file reproduces them bit-exactly
            stored = video.astype("<f4").astype(np.float64)
            video_rel = os.path.join("videos", f"{video_id}.nsgt")
            tensorio.write_tensor(os.path.join(out_dir, video_rel), stored)
            score_rel = ""
            if write_scores:
                score_rel = os.path.join("scores", f"{video_id}.nsgt")
                scores = synth.oracle_score_field(stored, spec)
                tensorio.write_tensor(os.path.join(out_dir, score_rel), scores)
            entries.append(
                manifest.ManifestEntry(video_id, label, video_rel, score_rel, "")
            )
    manifest.write_manifest(os.path.join(out_dir, "manifest.tsv"), entries)
    print(f"wrote {len(entries)} videos to {out_dir}")
    return EXIT_OK


# --- nsg extract -------------------------------------------------------------


def cmd_nsg_extract(cfg: Config, out_dir: str) -> int:
    manifest_path = cfg.get("nsg.manifest", "")
    if not manifest_path:
        raise ConfigError("nsg.manifest is required")
    ncfg = _nsg_config(cfg)
    effective = {
        "global.out": out_dir,
        "nsg.manifest": manifest_path,
        "nsg.lambda": repr(ncfg.lambda_nsg),
        "nsg.delta_t": repr(ncfg.delta_t),
        "nsg.last_frame_rule": ncfg.last_frame_rule,
        "nsg.denominator_floor": repr(ncfg.denominator_floor),
    }
    _echo_config(out_dir, effective)
    os.makedirs(os.path.join(out_dir, "features"), exist_ok=True)

    base = os.path.dirname(os.path.abspath(manifest_path))
    entries = manifest.read_manifest(manifest_path)
    updated = []
    for entry in entries:
        if not entry.video_path or not entry.score_path:
            raise DataError(f"{entry.video_id}: manifest lacks video/score paths")
        try:
            video = tensorio.read_tensor(_resolve(entry.video_path, base))
            provider = estimator.ArrayScoreProvider.from_file(_resolve(entry.score_path, base))
            feature = estimator.nsg_feature(video, provider, ncfg)
        except NsgvdError as exc:
            raise DataError(f"{entry.video_id} ({entry.score_path}): {exc}") from exc
        feat_rel = os.path.join("features", f"{entry.video_id}.nsgt")
        tensorio.write_tensor(os.path.join(out_dir, feat_rel), feature.values)
        _write_json(
            os.path.join(out_dir, "features", f"{entry.video_id}.flags.json"),
            {
                "denominators": [float(v) for v in feature.denominators],
                "flags": [bool(f) for f in feature.flags],
            },
        )
        updated.append(entry.with_paths(feature_path=feat_rel))
    manifest.write_manifest(os.path.join(out_dir, "manifest.tsv"), updated)
    print(f"extracted {len(updated)} feature files to {out_dir}")
    return EXIT_OK


# --- kernel train ------------------------------------------------------------


def _load_features(entries, base, want_flags=False):
    feats, flags = [], []
    for entry in entries:
        if not entry.feature_path:
            raise DataError(f"{entry.video_id}: manifest lacks a feature path")
        values = tensorio.read_tensor(_resolve(entry.feature_path, base))
        feats.append(values.reshape(-1))
        if want_flags:
            flag_path = _resolve(entry.feature_path, base).replace(".nsgt", ".flags.json")
            entry_flags = []
            if os.path.exists(flag_path):
                with open(flag_path, "r", encoding="utf-8") as fh:
                    entry_flags = json.load(fh).get("flags", [])
            flags.append(entry_flags)
    stacked = np.asarray(feats)
    return (stacked, flags) if want_flags else stacked


def cmd_kernel_train(cfg: Config, out_dir: str) -> int:
    manifest_path = cfg.get("train.manifest", "")
    if not manifest_path:
        raise ConfigError("train.manifest is required")
    seed = cfg.get_int("global.seed", 0)
    tcfg = mmd.TrainConfig(
        lambda_reg=cfg.get_float("train.lambda_reg", 1e-10),
        learning_rate=cfg.get_float("train.learning_rate", 1e-4),
        weight_decay=cfg.get_float("train.weight_decay", 0.1),
        batch_size=cfg.get_int("train.batch_size", 24),
        max_iters=cfg.get_int("train.max_iters", 1000),
        seed=seed,
    )
    hidden = tuple(cfg.get_ints("train.hidden", ""))
    output_dim = cfg.get_int("train.output_dim", 300)
    eps0 = cfg.get_float("train.eps", 0.5)
    sigma_feat0 = cfg.get_float("train.sigma_feat", 0.1)
    sigma_raw0 = cfg.get_float("train.sigma_raw", 100.0)

    effective = {
        "global.seed": str(seed),
        "global.out": out_dir,
        "train.manifest": manifest_path,
        "train.lambda_reg": repr(tcfg.lambda_reg),
        "train.learning_rate": repr(tcfg.learning_rate),
        "train.weight_decay": repr(tcfg.weight_decay),
        "train.batch_size": str(tcfg.batch_size),
        "train.max_iters": str(tcfg.max_iters),
        "train.hidden": ",".join(str(h) for h in hidden),
        "train.output_dim": str(output_dim),
        "train.eps": repr(eps0),
        "train.sigma_feat": repr(sigma_feat0),
        "train.sigma_raw": repr(sigma_raw0),
    }
    _echo_config(out_dir, effective)

    base = os.path.dirname(os.path.abspath(manifest_path))
    entries = manifest.read_manifest(manifest_path)
    real = _load_features([e for e in entries if e.label == "real"], base)
    fake = _load_features([e for e in entries if e.label == "fake"], base)
    if real.size == 0 or fake.size == 0:
        raise InsufficientDataError("training needs both real and fake features")

    init = kernel.KernelParams.default(
        real.shape[1],
        substream(seed, "kernel-init"),
        hidden=hidden,
        output_dim=output_dim,
        eps=eps0,
        sigma_feat=sigma_feat0,
        sigma_raw=sigma_raw0,
    )
    report = mmd.train_kernel(real, fake, tcfg, init)
    kernel.save_checkpoint(os.path.join(out_dir, "checkpoint.nsgk"), report.params)
    _write_json(os.path.join(out_dir, "train_report.json"), report.to_json_dict())
    _write_json(
        os.path.join(out_dir, "timings.json"),
        {"seconds_per_iter": report.seconds_per_iter},
    )
    print(f"trained {report.iterations} iterations; checkpoint in {out_dir}")
    return EXIT_OK


# --- detect ------------------------------------------------------------------


def cmd_detect(cfg: Config, out_dir: str) -> int:
    ckpt_path = cfg.get("detect.checkpoint", "")
    ref_path = cfg.get("detect.reference_manifest", "")
    test_path = cfg.get("detect.test_manifest", "")
    if not ckpt_path or not ref_path or not test_path:
        raise ConfigError(
            "detect.checkpoint, detect.reference_manifest and detect.test_manifest are required"
        )
    tau = cfg.get_float("detect.tau", 1.0)
    n_ref = cfg.get_int("detect.reference_size", 100)
    sweep_taus = cfg.get_floats("detect.sweep", "")

    effective = {
        "global.out": out_dir,
        "detect.checkpoint": ckpt_path,
        "detect.reference_manifest": ref_path,
        "detect.test_manifest": test_path,
        "detect.tau": repr(tau),
        "detect.reference_size": str(n_ref),
        "detect.sweep": ",".join(repr(t) for t in sweep_taus),
    }
    _echo_config(out_dir, effective)

    if not os.path.exists(ckpt_path):
        raise DataError(f"missing checkpoint {ckpt_path}")
    params = kernel.load_checkpoint(ckpt_path)

    ref_entries = [e for e in manifest.read_manifest(ref_path) if e.label == "real"]
    if len(ref_entries) < n_ref:
        raise InsufficientDataError(
            f"reference manifest has {len(ref_entries)} real entries, need {n_ref}"
        )
    ref_base = os.path.dirname(os.path.abspath(ref_path))
    reference = _load_features(ref_entries[:n_ref], ref_base)
    state = det.DetectorState.build(reference, params, tau)

    test_entries = manifest.read_manifest(test_path)
    test_base = os.path.dirname(os.path.abspath(test_path))
    feats, flags = _load_features(test_entries, test_base, want_flags=True)

    qs, is_fake = [], []
    with open(os.path.join(out_dir, "results.jsonl"), "w", encoding="utf-8") as fh:
        for entry, row, entry_flags in zip(test_entries, feats, flags):
            result = det.detect_one(row, state)
            qs.append(result.q)
            is_fake.append(entry.label == "fake")
            fh.write(
                json.dumps(
                    {
                        "video_id": entry.video_id,
                        "Q": result.q,
                        "decision": result.decision,
                        "flags": entry_flags,
                    },
                    sort_keys=True,
                )
                + "\n"
            )
    qs = np.asarray(qs)
    is_fake = np.asarray(is_fake, dtype=bool)
    metrics = det.compute_metrics(qs, is_fake, tau)
    _write_json(os.path.join(out_dir, "metrics.json"), metrics.to_json_dict())
    if sweep_taus:
        sweep = det.threshold_sweep(qs, is_fake, sweep_taus)
        _write_json(os.path.join(out_dir, "sweep.json"), [m.to_json_dict() for m in sweep])
    print(
        f"scored {len(qs)} videos; accuracy {metrics.accuracy:.4f}"
        + (f", auroc {metrics.auroc:.4f}" if metrics.auroc is not None else "")
    )
    return EXIT_OK


# --- theory verify -----------------------------------------------------------

THEORY_GROUPS = (
    "chi2-tails",
    "chi2-magnitude",
    "denominator-law",
    "denominator-gap",
    "norm-bounds",
    "constants",
    "feature-distance",
)


def cmd_theory_verify(cfg: Config, out_dir: str) -> int:
    seed = cfg.get_int("global.seed", 0)
    trials = cfg.get_int("theory.trials", 100_000)
    theorem_trials = cfg.get_int("theory.theorem_trials", 10_000)
    distance_lambda = cfg.get_float("theory.distance_lambda", 1.0)
    selection = cfg.get_list("theory.checks", "default")
    write_csv = cfg.get_bool("theory.csv", False)

    effective = {
        "global.seed": str(seed),
        "global.out": out_dir,
        "theory.trials": str(trials),
        "theory.theorem_trials": str(theorem_trials),
        "theory.distance_lambda": repr(distance_lambda),
        "theory.checks": ",".join(selection),
        "theory.csv": str(write_csv).lower(),
    }
    _echo_config(out_dir, effective)

    if selection == ["none"] or not selection:
        _write_json(os.path.join(out_dir, "theory_report.json"), {"checks": [], "passed": True})
        print("no checks selected")
        return EXIT_OK
    groups = set(THEORY_GROUPS) if selection == ["default"] else set(selection)
    unknown = groups - set(THEORY_GROUPS)
    if unknown:
        raise ConfigError(f"unknown theory checks: {sorted(unknown)}; known: {THEORY_GROUPS}")

    reports: list = []
    if "chi2-tails" in groups:
        for d in theory.TAIL_GRID_D:
            for phi in theory.TAIL_GRID_PHI:
                for t in theory.TAIL_GRID_T:
                    reports.extend(theory.chi2_tail_check(d, phi, t, trials, seed))
    if "chi2-magnitude" in groups:
        for d in theory.TAIL_GRID_D:
            for phi in theory.TAIL_GRID_PHI:
                reports.append(theory.chi2_magnitude_check(d, phi, 0.05, trials, seed))
    linear = synth.SigmaSchedule("linear", 0.0, 1.0)
    real_lin, fake_lin = theory._suite_specs(4, 2, linear, 1.0)
    if "denominator-law" in groups:
        reports.append(theory.denominator_law_check(real_lin, 1, 0.1, trials, seed))
        reports.append(theory.denominator_law_check(fake_lin, 1, 0.1, trials, seed))
    if "denominator-gap" in groups:
        reports.append(theory.denominator_gap_check(real_lin, fake_lin, 1, 0.05, trials, seed))
    if "norm-bounds" in groups:
        reports.extend(theory.norm_bound_check(real_lin, fake_lin, 1, 0.05, trials, seed))
    if "constants" in groups:
        reports.append(
            theory.admissible_constants_check(real_lin, fake_lin, 1, 20.0, 0.05, trials, seed)
        )
    if "feature-distance" in groups:
        shrink = synth.SigmaSchedule("exponential", 1.0, -0.05)
        real_sh, fake_sh = theory._suite_specs(4, 8, shrink, 1.0)
        res0 = theory.feature_distance_samples(
            real_sh, real_sh, distance_lambda, 0.05, theorem_trials, seed
        )
        res1 = theory.feature_distance_samples(
            real_sh, fake_sh, distance_lambda, 0.05, theorem_trials, seed
        )
        for phi, res in ((0.0, res0), (1.0, res1)):
            reports.append(
                theory.BoundCheckReport(
                    f"feature-distance[d=4,T=8,phi={phi:g},delta=0.05]",
                    theorem_trials,
                    int((res.distances > res.bound).sum()),
                    0.05,
                    extra={
                        "bound": res.bound,
                        "c": res.c_bound,
                        "acceptance_rate": res.acceptance_rate,
                        "mean_sq_distance": float(res.distances.mean()),
                    },
                )
            )
        from scipy import stats as _stats

        mw = _stats.mannwhitneyu(res1.distances, res0.distances, alternative="greater")
        reports.append(
            theory.OrderingReport(
                "feature-distance-mean-ordering[phi=1>phi=0]",
                theorem_trials,
                float(mw.pvalue),
            )
        )
        if write_csv:
            with open(os.path.join(out_dir, "distances.csv"), "w", encoding="utf-8") as fh:
                fh.write("phi,sq_distance\n")
                for v in res0.distances:
                    fh.write(f"0,{v!r}\n")
                for v in res1.distances:
                    fh.write(f"1,{v!r}\n")

    all_passed = all(r.passed for r in reports)
    _write_json(
        os.path.join(out_dir, "theory_report.json"),
        {"checks": [r.to_json_dict() for r in reports], "passed": all_passed},
    )
    for r in reports:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name}")
    if not all_passed:
        raise VerificationError("one or more theory checks failed")
    return EXIT_OK


# --- argument parsing --------------------------------------------------------


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="plain-text config file")
    parser.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override a config key (repeatable)",
    )
    parser.add_argument("--seed", type=int, help="global seed (overrides global.seed)")
    parser.add_argument("--out", help="output directory (overrides global.out)")
    parser.add_argument(
        "--threads",
        type=int,
        default=1,
        help="cap on internal parallelism; 1 = bit-reproducible mode",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nsgvd", description=__doc__)
    sub = parser.add_subparsers(dest="group", required=True)

    synth_p = sub.add_parser("synth", help="synthetic data").add_subparsers(
        dest="action", required=True
    )
    _add_common(synth_p.add_parser("gen", help="generate videos and oracle scores"))

    nsg_p = sub.add_parser("nsg", help="feature extraction").add_subparsers(
        dest="action", required=True
    )
    _add_common(nsg_p.add_parser("extract", help="extract features from video+score pairs"))

    kernel_p = sub.add_parser("kernel", help="kernel training").add_subparsers(
        dest="action", required=True
    )
    _add_common(kernel_p.add_parser("train", help="train the deep kernel"))

    _add_common(sub.add_parser("detect", help="score test videos against a reference set"))

    theory_p = sub.add_parser("theory", help="verification suite").add_subparsers(
        dest="action", required=True
    )
    _add_common(theory_p.add_parser("verify", help="run the Monte Carlo verification battery"))
    return parser


COMMANDS = {
    ("synth", "gen"): cmd_synth_gen,
    ("nsg", "extract"): cmd_nsg_extract,
    ("kernel", "train"): cmd_kernel_train,
    ("detect", None): cmd_detect,
    ("theory", "verify"): cmd_theory_verify,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = Config(load_config(args.config) if args.config else {})
        cfg = cfg.override(args.overrides)
        if args.seed is not None:
            cfg = cfg.override([f"global.seed={args.seed}"])
        if args.out is not None:
            cfg = cfg.override([f"global.out={args.out}"])
        out_dir = cfg.get("global.out", "")
        if not out_dir:
            raise ConfigError("an output directory is required (--out or global.out)")
        command = COMMANDS[(args.group, getattr(args, "action", None))]
        return command(cfg, out_dir)
    except (ConfigError, AdmissibilityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (VerificationError,) as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except (InsufficientDataError,) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NsgvdError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
