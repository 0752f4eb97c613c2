"""Kernel two-sample statistics and the kernel-training loop.

The detection statistic for a single test video against n references is the
biased squared MMD

    Q = mean_ij k(G_i, G_j) - 2 mean_i k(G_i, G_test) + k(G_test, G_test)

whose reference term is cacheable across test videos. Training maximizes the
multi-population proxy relative to its standard deviation,

    J = MPP / sqrt(var + lambda_reg),
    MPP = 1/(N(N-1)) sum_{i != j} H_ij,
    H_ij = k(x_i, x_j) - k(x_i, y_j) - k(y_i, x_j),
    var = 4/N^3 sum_i (sum_j H_ij)^2 - 4/N^4 (sum_ij H_ij)^2,

by ascent with Adam-style bias-corrected moments and decoupled weight decay
on the feature-net parameters only. Note H deliberately omits the k(y_i, y_j)
term of the classical two-sample U-statistic kernel; it is implemented
verbatim.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import kernel as dk
from .errors import ConfigError, InsufficientDataError, ShapeMismatchError, TrainingDivergedError
from .kernel import KernelParams, _as_matrix
from .rng import substream

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8


def mmd_biased_single(reference, test, params: KernelParams, ref_gram_mean: float | None = None) -> float:
    """Biased squared MMD between a reference set and one test feature.

    `ref_gram_mean` may be precomputed once per reference set; the remaining
    cost is one cross-kernel row. k(test, test) = 1 for this kernel family.
    """
    ref = _as_matrix(reference)
    if ref.shape[0] < 1:
        raise InsufficientDataError("empty reference set")
    test_v = _as_matrix(test)
    if test_v.shape[0] != 1:
        test_v = test_v.reshape(1, -1)
    if ref_gram_mean is None:
        ref_gram_mean = float(dk.gram(ref, None, params).mean())
    cross = dk.gram(ref, test_v, params)
    return ref_gram_mean - 2.0 * float(cross.mean()) + 1.0


def mpp_statistic(real_feats, fake_feats, params: KernelParams) -> tuple[float, np.ndarray]:
    """Multi-population proxy and its H matrix for equally-sized samples."""
    x = _as_matrix(real_feats)
    y = _as_matrix(fake_feats)
    if x.shape[0] != y.shape[0]:
        raise ShapeMismatchError(f"population sizes differ: {x.shape[0]} vs {y.shape[0]}")
    n = x.shape[0]
    if n < 2:
        raise InsufficientDataError("need at least 2 samples per population")
    k_xx = dk.gram(x, None, params)
    k_xy = dk.gram(x, y, params)
    h = k_xx - k_xy - k_xy.T
    mpp = (h.sum() - np.trace(h)) / (n * (n - 1))
    return float(mpp), h


def variance_estimator(h: np.ndarray) -> float:
    """Variance proxy 4/N^3 sum_i R_i^2 - 4/N^4 S^2 over the full H matrix."""
    h = np.asarray(h, dtype=np.float64)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ShapeMismatchError(f"H must be square, got {h.shape}")
    n = h.shape[0]
    if n < 2:
        raise InsufficientDataError("need N >= 2")
    rows = h.sum(axis=1)
    total = rows.sum()
    return float(4.0 / n**3 * (rows @ rows) - 4.0 / n**4 * total * total)


def objective(real_feats, fake_feats, params: KernelParams, lambda_reg: float) -> float:
    """J = MPP / sqrt(var + lambda_reg)."""
    mpp, h = mpp_statistic(real_feats, fake_feats, params)
    return mpp / np.sqrt(variance_estimator(h) + lambda_reg)


def objective_with_gradients(
    real_feats, fake_feats, params: KernelParams, lambda_reg: float
) -> tuple[float, float, float, dk.KernelGrads]:
    """Objective value plus exact gradients in the unconstrained space.

    Returns (J, MPP, var, grads). Gradients flow through both Gram blocks;
    k(y_i, x_j) = k(x_j, y_i) is handled by transposing the upstream of the
    cross block rather than a third Gram evaluation.
    """
    x = _as_matrix(real_feats)
    y = _as_matrix(fake_feats)
    if x.shape[0] != y.shape[0]:
        raise ShapeMismatchError(f"population sizes differ: {x.shape[0]} vs {y.shape[0]}")
    n = x.shape[0]
    if n < 2:
        raise InsufficientDataError("need at least 2 samples per population")

    k_xx, ctx_xx = dk.gram_with_context(x, None, params)
    k_xy, ctx_xy = dk.gram_with_context(x, y, params)
    h = k_xx - k_xy - k_xy.T
    mpp = float((h.sum() - np.trace(h)) / (n * (n - 1)))
    var = variance_estimator(h)
    root = np.sqrt(var + lambda_reg)
    j = mpp / root

    # dJ/dH
    d_mpp = 1.0 / root
    d_var = -0.5 * mpp / root**3
    u = np.full((n, n), d_mpp / (n * (n - 1)))
    np.fill_diagonal(u, 0.0)
    rows = h.sum(axis=1)
    total = rows.sum()
    u += d_var * (8.0 / n**3 * rows[:, None] - 8.0 / n**4 * total)

    grads = dk.gradients_from_context(ctx_xx, u, params)
    grads = grads + dk.gradients_from_context(ctx_xy, -(u + u.T), params)
    return float(j), mpp, var, grads


@dataclass(frozen=True)
class TrainConfig:
    lambda_reg: float = 1e-10
    learning_rate: float = 1e-4
    weight_decay: float = 0.1
    batch_size: int = 24
    max_iters: int = 1000
    seed: int = 0

    def __post_init__(self):
        if not self.lambda_reg > 0:
            raise ConfigError("lambda_reg must be positive")
        if not self.learning_rate > 0:
            raise ConfigError("learning_rate must be positive")
        if self.batch_size < 2:
            raise ConfigError("batch_size must be >= 2 (statistics sum over i != j)")
        if self.max_iters < 0:
            raise ConfigError("max_iters must be nonnegative")


@dataclass
class TrainReport:
    """Per-iteration trace plus the final parameters.

    The trace arrays and `params` are bit-reproducible for a fixed seed;
    `seconds_per_iter` is wall-clock and excluded from serialized output by
    default so written reports stay deterministic.
    """

    objective_trace: list = field(default_factory=list)
    mpp_trace: list = field(default_factory=list)
    variance_trace: list = field(default_factory=list)
    seconds_per_iter: list = field(default_factory=list)
    params: KernelParams | None = None

    @property
    def iterations(self) -> int:
        return len(self.objective_trace)

    def to_json_dict(self, include_timing: bool = False) -> dict:
        out = {
            "iterations": self.iterations,
            "objective_trace": list(self.objective_trace),
            "mpp_trace": list(self.mpp_trace),
            "variance_trace": list(self.variance_trace),
        }
        if include_timing:
            out["seconds_per_iter"] = list(self.seconds_per_iter)
        return out


class _BatchSampler:
    """Without-replacement minibatches, reshuffled each epoch."""

    def __init__(self, size: int, batch: int, rng: np.random.Generator):
        self.size = size
        self.batch = batch
        self.rng = rng
        self.perm = np.empty(0, dtype=np.int64)
        self.pos = 0

    def next(self) -> np.ndarray:
        if self.pos + self.batch > self.perm.size:
            self.perm = self.rng.permutation(self.size)
            self.pos = 0
        out = self.perm[self.pos : self.pos + self.batch]
        self.pos += self.batch
        return out


def train_kernel(real_train, fake_train, cfg: TrainConfig, init: KernelParams) -> TrainReport:
    """Ascend J over minibatches; deterministic for a fixed cfg.seed.

    Real and fake minibatches of size `batch_size` are drawn independently
    without replacement. A non-finite objective aborts with the offending
    iteration recorded on the raised error.
    """
    x = _as_matrix(real_train)
    y = _as_matrix(fake_train)
    n_batch = cfg.batch_size
    if x.shape[0] < n_batch or y.shape[0] < n_batch:
        raise InsufficientDataError(
            f"need >= {n_batch} features per population, got {x.shape[0]} real / {y.shape[0]} fake"
        )

    rng = substream(cfg.seed, "kernel-train")
    real_batches = _BatchSampler(x.shape[0], n_batch, rng)
    fake_batches = _BatchSampler(y.shape[0], n_batch, rng)

    vec = dk.pack_params(init)
    decay_mask = dk.net_param_mask(init)
    m = np.zeros_like(vec)
    v = np.zeros_like(vec)
    report = TrainReport(params=init.copy())

    for r in range(1, cfg.max_iters + 1):
        t0 = time.perf_counter()
        params = dk.unpack_params(vec, init)
        bx = real_batches.next()
        by = fake_batches.next()
        j, mpp, var, grads = objective_with_gradients(x[bx], y[by], params, cfg.lambda_reg)
        if not np.isfinite(j):
            raise TrainingDivergedError(r)
        report.objective_trace.append(j)
        report.mpp_trace.append(mpp)
        report.variance_trace.append(var)

        g = -dk.pack_grads(grads)  # descent on -J
        m = ADAM_BETA1 * m + (1.0 - ADAM_BETA1) * g
        v = ADAM_BETA2 * v + (1.0 - ADAM_BETA2) * g * g
        m_hat = m / (1.0 - ADAM_BETA1**r)
        v_hat = v / (1.0 - ADAM_BETA2**r)
        vec = vec - cfg.learning_rate * m_hat / (np.sqrt(v_hat) + ADAM_EPS)
        vec[decay_mask] -= cfg.learning_rate * cfg.weight_decay * vec[decay_mask]
        report.seconds_per_iter.append(time.perf_counter() - t0)

    report.params = dk.unpack_params(vec, init)
    return report
