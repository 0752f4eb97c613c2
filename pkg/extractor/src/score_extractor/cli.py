"""Command-line entry point mirroring the extractor configuration."""

from __future__ import annotations

import argparse
import sys

from .extract import ExtractorConfig, extract_scores
from .oracle import SigmaSchedule


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="score-extract", description=__doc__)
    parser.add_argument("--mode", choices=("diffusion", "gaussian_oracle"), default="gaussian_oracle")
    parser.add_argument("--input", required=True, help="manifest, tensor file, or directory of videos")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--timestep-fraction", type=float, default=5.0 / 1000.0)
    parser.add_argument("--resolution", type=int, choices=(64, 128, 256), default=256)
    parser.add_argument("--frames", type=int, default=8, help="frame count target")
    parser.add_argument("--model", default="", help="TorchScript score model (diffusion mode)")
    parser.add_argument("--schedule", default="constant", choices=("constant", "linear", "exponential"))
    parser.add_argument("--sigma-a", type=float, default=1.0)
    parser.add_argument("--sigma-b", type=float, default=0.0)
    parser.add_argument("--seed", type=int, default=0)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = ExtractorConfig(
            mode=args.mode,
            input_path=args.input,
            output_dir=args.out,
            timestep_fraction=args.timestep_fraction,
            resolution=args.resolution,
            target_frames=args.frames,
            model_path=args.model,
            schedule=SigmaSchedule(args.schedule, args.sigma_a, args.sigma_b),
            seed=args.seed,
        )
        summary = extract_scores(config)
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"processed {summary['processed']} videos, skipped {summary['skipped']}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
