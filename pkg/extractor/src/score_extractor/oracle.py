"""Analytic Gaussian score fields for integration testing against the engine.

The arithmetic here must mirror the engine's oracle exactly so that scoring
the same stored float32 frames reproduces its score files byte for byte:
sigma(t) evaluated in float64 from the schedule parameters, then
score_t = -frames_t / (sigma_t * sigma_t), rounded to float32 on write.
Frame time t is 1-based.
"""

from __future__ import annotations

import numpy as np


class SigmaSchedule:
    """Width schedule: constant a; linear a + b t; exponential a exp(b t)."""

    def __init__(self, kind: str, a: float, b: float = 0.0):
        if kind not in ("constant", "linear", "exponential"):
            raise ValueError(f"unknown schedule kind {kind!r}")
        self.kind = kind
        self.a = float(a)
        self.b = float(b)

    def sigma(self, t: int) -> float:
        if self.kind == "constant":
            return self.a
        if self.kind == "linear":
            return self.a + self.b * t
        return self.a * np.exp(self.b * t)


def gaussian_score_field(frames: np.ndarray, schedule: SigmaSchedule) -> np.ndarray:
    """Exact score of the zero-mean Gaussian density at every frame."""
    frames = np.asarray(frames, dtype=np.float64)
    sigmas = np.array([schedule.sigma(t) for t in range(1, frames.shape[0] + 1)])
    return -frames / (sigmas * sigmas)[:, None]
