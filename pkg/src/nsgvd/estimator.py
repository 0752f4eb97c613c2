"""Normalized spatiotemporal gradient features from a video and a score field.

Per retained frame t the feature is

    g_t = s_t / ( <s_t, dx_t> / dt + lam )

where s_t is the score vector, dx_t the inter-frame displacement and lam > 0
the stabilizer. The denominator estimates (lam - d/dt log p) via density
conservation along motion; the inner product over the d spatial entries is
forced by the temporal derivative being a scalar. Scores come through a
provider abstraction so the same path serves the Gaussian oracle and score
fields produced by an external diffusion-model extractor.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field

import numpy as np

from . import synth, tensorio
from .errors import (
    ConfigError,
    DegenerateDenominatorError,
    FeatureExtractionError,
    ShapeMismatchError,
)

BACKWARD_DIFFERENCE = "backward_difference"
DROP_LAST = "drop_last"


@dataclass(frozen=True)
class NsgConfig:
    lambda_nsg: float = 0.1
    delta_t: float = 1.0
    last_frame_rule: str = BACKWARD_DIFFERENCE
    denominator_floor: float = 1e-6

    def __post_init__(self):
        if not self.lambda_nsg > 0:
            raise ConfigError("lambda_nsg must be positive")
        if not self.delta_t > 0:
            raise ConfigError("delta_t must be positive")
        if self.last_frame_rule not in (BACKWARD_DIFFERENCE, DROP_LAST):
            raise ConfigError(f"unknown last_frame_rule {self.last_frame_rule!r}")
        if self.denominator_floor < 0:
            raise ConfigError("denominator_floor must be nonnegative")


@dataclass(frozen=True)
class NsgFeature:
    """T' x d feature values plus the per-frame denominators that produced
    them and near-degenerate flags. Flagged frames are kept, not zeroed."""

    values: np.ndarray
    denominators: np.ndarray
    flags: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        dens = np.asarray(self.denominators, dtype=np.float64)
        flags = (
            np.zeros(values.shape[0], dtype=bool)
            if self.flags is None
            else np.asarray(self.flags, dtype=bool)
        )
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "denominators", dens)
        object.__setattr__(self, "flags", flags)

    @property
    def flat(self) -> np.ndarray:
        return self.values.reshape(-1)

    @classmethod
    def from_values(cls, values: np.ndarray, lambda_nsg: float = 0.1) -> "NsgFeature":
        """Wrap plain feature values (used by tests and file loading)."""
        values = np.asarray(values, dtype=np.float64)
        return cls(values, np.full(values.shape[0], lambda_nsg))


class ScoreProvider(ABC):
    """Maps (video, frame index) to a score vector of matching dimension."""

    @abstractmethod
    def score_field(self, video: np.ndarray) -> np.ndarray:
        """Full T x d score field for the video."""

    def frame_score(self, video: np.ndarray, t: int) -> np.ndarray:
        return self.score_field(video)[t]


class OracleScoreProvider(ScoreProvider):
    """Exact Gaussian scores from a synthetic process spec."""

    def __init__(self, spec: synth.GaussianProcessSpec):
        self.spec = spec

    def score_field(self, video: np.ndarray) -> np.ndarray:
        return synth.oracle_score_field(video, self.spec)


class ArrayScoreProvider(ScoreProvider):
    """Precomputed score field, e.g. read from a tensor file. Read-only and
    safe for concurrent use."""

    def __init__(self, scores: np.ndarray):
        self._scores = np.asarray(scores, dtype=np.float64)

    @classmethod
    def from_file(cls, path) -> "ArrayScoreProvider":
        return cls(tensorio.read_tensor(path))

    def score_field(self, video: np.ndarray) -> np.ndarray:
        return tensorio.validate_scores(self._scores, video)


def frame_displacements(video: np.ndarray, rule: str) -> np.ndarray:
    """Forward differences x_{t+1} - x_t; the last frame reuses the backward
    difference or is dropped, per `rule`."""
    video = np.asarray(video, dtype=np.float64)
    fwd = video[1:] - video[:-1]
    if rule == DROP_LAST:
        return fwd
    return np.vstack([fwd, fwd[-1]])


def frame_displacement(video: np.ndarray, t: int, rule: str = BACKWARD_DIFFERENCE):
    """Displacement for 0-based frame t; None when the frame is dropped."""
    video = np.asarray(video, dtype=np.float64)
    last = video.shape[0] - 1
    if t < last:
        return video[t + 1] - video[t]
    if rule == DROP_LAST:
        return None
    return video[last] - video[last - 1]


def temporal_denominator(
    score: np.ndarray, dx: np.ndarray, dt: float, lambda_nsg: float
) -> float:
    """<score, dx>/dt + lam: the estimated (lam - d/dt log p), one scalar per
    frame. Invariant under joint rescaling of dx and dt."""
    score = np.asarray(score, dtype=np.float64)
    dx = np.asarray(dx, dtype=np.float64)
    if score.shape != dx.shape:
        raise ShapeMismatchError(f"score {score.shape} vs displacement {dx.shape}")
    return float(score @ dx) / dt + lambda_nsg


def nsg_feature(video: np.ndarray, provider: ScoreProvider, cfg: NsgConfig) -> NsgFeature:
    """Extract the feature matrix for one video.

    Near-degenerate frames (|denominator| below the floor) are flagged; an
    exactly-zero denominator cannot yield finite values and raises. If every
    frame is flagged the extraction fails.
    """
    video = tensorio.validate_video(video)
    scores = tensorio.validate_scores(provider.score_field(video), video)
    dx = frame_displacements(video, cfg.last_frame_rule)
    kept = dx.shape[0]
    scores = scores[:kept]
    denominators = (scores * dx).sum(axis=1) / cfg.delta_t + cfg.lambda_nsg
    flags = np.abs(denominators) < cfg.denominator_floor
    if flags.all():
        raise FeatureExtractionError(
            f"all {kept} frames have |denominator| < {cfg.denominator_floor}"
        )
    if (denominators == 0.0).any():
        t_bad = int(np.nonzero(denominators == 0.0)[0][0])
        raise DegenerateDenominatorError(f"exactly-zero denominator at frame {t_bad}")
    values = scores / denominators[:, None]
    return NsgFeature(values, denominators, flags)


def stack_features(features) -> np.ndarray:
    """Flatten a sequence of features (or plain arrays) into an n x D matrix."""
    rows = []
    for f in features:
        arr = f.flat if isinstance(f, NsgFeature) else np.asarray(f, dtype=np.float64).reshape(-1)
        rows.append(arr)
    out = np.asarray(rows, dtype=np.float64)
    if out.ndim != 2:
        raise ShapeMismatchError("features have inconsistent shapes")
    return out
