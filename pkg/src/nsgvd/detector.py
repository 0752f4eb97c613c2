"""Deployment-facing detection protocol and evaluation metrics.

Each test video is scored by the biased MMD statistic Q against a frozen
reference set of real-video features; the decision is Fake iff Q > tau
(strict inequality, so ties classify as Real). Fake is the positive class
throughout the metrics.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DataError, InsufficientDataError
from .estimator import NsgFeature
from .kernel import KernelParams, ReferenceKernelCache, _as_matrix

REAL = "real"
FAKE = "fake"


@dataclass(frozen=True)
class DetectorState:
    """Frozen kernel + cached reference statistics + decision threshold.

    Immutable after construction; safe for concurrent detect calls.
    """

    cache: ReferenceKernelCache
    params: KernelParams
    tau: float = 1.0

    def __post_init__(self):
        if not np.isfinite(self.tau):
            raise ConfigError("tau must be finite")

    @property
    def n_reference(self) -> int:
        return self.cache.raw.shape[0]

    @classmethod
    def build(cls, reference_features, params: KernelParams, tau: float = 1.0) -> "DetectorState":
        ref = _as_matrix(reference_features)
        if ref.shape[0] < 1:
            raise InsufficientDataError("reference set must not be empty")
        return cls(ReferenceKernelCache.build(ref, params), params, float(tau))


@dataclass(frozen=True)
class DetectionResult:
    q: float
    decision: str
    flags: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        flags = np.zeros(0, dtype=bool) if self.flags is None else np.asarray(self.flags, dtype=bool)
        object.__setattr__(self, "flags", flags)

    @property
    def is_fake(self) -> bool:
        return self.decision == FAKE


def detect_one(test, state: DetectorState) -> DetectionResult:
    """Pure function of (test, state): Q and the thresholded decision."""
    flags = test.flags if isinstance(test, NsgFeature) else None
    test_v = _as_matrix(test)
    cross = state.cache.cross_rows(test_v, state.params)
    q = state.cache.gram_mean - 2.0 * float(cross.mean()) + 1.0
    decision = FAKE if q > state.tau else REAL
    return DetectionResult(q, decision, flags)


def detect_batch(tests, state: DetectorState) -> list[DetectionResult]:
    """Elementwise detect_one; the reference term is already cached in the
    state. Aborts on the first failing element, naming its index."""
    results = []
    for i, test in enumerate(tests):
        try:
            results.append(detect_one(test, state))
        except Exception as exc:
            raise DataError(f"test element {i}: {exc}") from exc
    return results


@dataclass(frozen=True)
class MetricsReport:
    tau: float
    tp: int
    fp: int
    tn: int
    fn: int
    recall: float
    precision: float
    accuracy: float
    f1: float
    auroc: float | None

    def to_json_dict(self) -> dict:
        return {
            "tau": self.tau,
            "confusion": {"tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn},
            "recall": self.recall,
            "precision": self.precision,
            "accuracy": self.accuracy,
            "f1": self.f1,
            "auroc": self.auroc,
        }


def auroc_score(qs: np.ndarray, is_fake: np.ndarray) -> float | None:
    """Probability that a random fake's Q exceeds a random real's Q, ties
    counted 1/2 (rank formulation; exact, matches pairwise counting).
    Returns None when either class is absent."""
    qs = np.asarray(qs, dtype=np.float64)
    is_fake = np.asarray(is_fake, dtype=bool)
    n_fake = int(is_fake.sum())
    n_real = int((~is_fake).sum())
    if n_fake == 0 or n_real == 0:
        return None
    order = np.argsort(qs, kind="stable")
    ranks = np.empty(qs.size, dtype=np.float64)
    sorted_q = qs[order]
    i = 0
    while i < qs.size:
        j = i
        while j + 1 < qs.size and sorted_q[j + 1] == sorted_q[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0  # average 1-based rank
        i = j + 1
    rank_sum_fake = float(ranks[is_fake].sum())
    u = rank_sum_fake - n_fake * (n_fake + 1) / 2.0
    return u / (n_fake * n_real)


def compute_metrics(qs, is_fake, tau: float) -> MetricsReport:
    """Threshold metrics at tau plus AUROC. Single-class inputs still get the
    threshold metrics; AUROC is then undefined (None)."""
    qs = np.asarray(qs, dtype=np.float64)
    is_fake = np.asarray(is_fake, dtype=bool)
    if qs.shape != is_fake.shape:
        raise DataError(f"scores {qs.shape} vs labels {is_fake.shape}")
    pred_fake = qs > tau
    tp = int((pred_fake & is_fake).sum())
    fp = int((pred_fake & ~is_fake).sum())
    tn = int((~pred_fake & ~is_fake).sum())
    fn = int((~pred_fake & is_fake).sum())
    total = tp + fp + tn + fn
    recall = tp / (tp + fn) if tp + fn else 0.0
    precision = tp / (tp + fp) if tp + fp else 0.0
    accuracy = (tp + tn) / total if total else 0.0
    f1 = 2.0 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return MetricsReport(tau, tp, fp, tn, fn, recall, precision, accuracy, f1, auroc_score(qs, is_fake))


def threshold_sweep(qs, is_fake, taus) -> list[MetricsReport]:
    """Metrics at each threshold, for the stability-plateau ablation."""
    return [compute_metrics(qs, is_fake, float(t)) for t in taus]
