"""Synthetic Gaussian video processes and their exact analytic oracles.

Real-class frames are drawn from N(0, sigma(t)^2 I_d) and fake-class frames
from N(mu, sigma(t)^2 I_d), each frame independent. Frame time t is 1-based
(row i of a video corresponds to t = i + 1). All closed forms below are exact
for these densities:

    score(x, t)          = -x / sigma(t)^2           (gradient of log density,
                                                      always under the zero-mean
                                                      real-class density)
    d/dt log p(x, t)     = -d*sd/s + ||x||^2 * sd/s^3     with s = sigma(t), sd = sigma_dot(t)
    denominator D(x, t)  = lam + d*sd/s - ||x||^2 * sd/s^3
    g(x, t)              = score(x, t) / D(x, t)

The translating process moves a Gaussian bump at constant velocity c, which
makes the density exactly conserved along trajectories; it is the ground
truth for the motion-based temporal-derivative estimator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DegenerateDenominatorError
from .rng import substream


@dataclass(frozen=True)
class SigmaSchedule:
    """Width schedule sigma(t) > 0 carrying its analytic derivative.

    kinds: "constant" sigma=a; "linear" sigma=a+b*t; "exponential" sigma=a*exp(b*t).
    """

    kind: str
    a: float
    b: float = 0.0

    def __post_init__(self):
        if self.kind not in ("constant", "linear", "exponential"):
            raise ConfigError(f"unknown schedule kind {self.kind!r}")

    def sigma(self, t: float) -> float:
        if self.kind == "constant":
            return self.a
        if self.kind == "linear":
            return self.a + self.b * t
        return self.a * np.exp(self.b * t)

    def sigma_dot(self, t: float) -> float:
        if self.kind == "constant":
            return 0.0
        if self.kind == "linear":
            return self.b
        return self.a * self.b * np.exp(self.b * t)

    def validate(self, frame_count: int) -> None:
        for t in range(1, frame_count + 1):
            if not self.sigma(t) > 0:
                raise ConfigError(f"sigma({t}) = {self.sigma(t)} must be positive")

    def to_config(self) -> dict:
        return {"schedule": self.kind, "sigma_a": repr(self.a), "sigma_b": repr(self.b)}

    @classmethod
    def from_config(cls, kind: str, a: float, b: float = 0.0) -> "SigmaSchedule":
        return cls(kind=kind, a=float(a), b=float(b))


CONSTANT_UNIT = SigmaSchedule("constant", 1.0)


@dataclass(frozen=True)
class GaussianProcessSpec:
    """Per-frame isotropic Gaussian video process."""

    d: int
    frame_count: int
    mu: np.ndarray
    schedule: SigmaSchedule = CONSTANT_UNIT
    seed: int = 0

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=np.float64).reshape(-1)
        if mu.shape != (self.d,):
            raise ConfigError(f"mu must have dimension {self.d}, got {mu.shape}")
        object.__setattr__(self, "mu", mu)
        if self.d < 1 or self.frame_count < 2:
            raise ConfigError("need d >= 1 and frame_count >= 2")
        self.schedule.validate(self.frame_count)

    @property
    def is_real_class(self) -> bool:
        return not self.mu.any()

    def noncentrality(self, t: int) -> float:
        """Normalized squared shift ||mu||^2 / sigma(t)^2."""
        s = self.schedule.sigma(t)
        return float(self.mu @ self.mu) / (s * s)

    @classmethod
    def real(cls, d, frame_count, schedule=CONSTANT_UNIT, seed=0):
        return cls(d, frame_count, np.zeros(d), schedule, seed)

    @classmethod
    def fake(cls, d, frame_count, mu_norm, schedule=CONSTANT_UNIT, seed=0):
        """Shift spread uniformly over coordinates with the requested norm."""
        mu = np.full(d, float(mu_norm) / np.sqrt(d))
        return cls(d, frame_count, mu, schedule, seed)

    def to_config(self) -> dict:
        """Flattened key/value form for the plain-text config format."""
        out = {
            "d": str(self.d),
            "frames": str(self.frame_count),
            "mu_norm": repr(float(np.sqrt(self.mu @ self.mu))),
            "seed": str(self.seed),
        }
        out.update(self.schedule.to_config())
        return out


def sample_video(spec: GaussianProcessSpec, rng: np.random.Generator | None = None) -> np.ndarray:
    """Draw one video (frame_count x d); deterministic for a fixed spec seed."""
    if rng is None:
        rng = substream(spec.seed, "video")
    sigmas = np.array([spec.schedule.sigma(t) for t in range(1, spec.frame_count + 1)])
    frames = rng.standard_normal((spec.frame_count, spec.d))
    return spec.mu[None, :] + frames * sigmas[:, None]


def oracle_score(x_t: np.ndarray, spec: GaussianProcessSpec, t: int) -> np.ndarray:
    """Exact score at frame t. Fake-class samples are also scored under the
    real-class (zero-mean) density, matching how a detector's score network
    trained on real data sees them."""
    s = spec.schedule.sigma(t)
    return -np.asarray(x_t, dtype=np.float64) / (s * s)


def oracle_score_field(video: np.ndarray, spec: GaussianProcessSpec) -> np.ndarray:
    """Stack oracle_score over all frames of a video."""
    video = np.asarray(video, dtype=np.float64)
    sigmas = np.array([spec.schedule.sigma(t) for t in range(1, video.shape[0] + 1)])
    return -video / (sigmas * sigmas)[:, None]


def oracle_temporal_derivative(x_t: np.ndarray, spec: GaussianProcessSpec, t: int) -> float:
    """Exact d/dt log p(x, t) = -d*sd/s + ||x||^2 * sd/s^3."""
    s = spec.schedule.sigma(t)
    sd = spec.schedule.sigma_dot(t)
    x = np.asarray(x_t, dtype=np.float64)
    return -spec.d * sd / s + float(x @ x) * sd / s**3


def nsg_denominator(x_t: np.ndarray, spec: GaussianProcessSpec, t: int, lambda_nsg: float) -> float:
    """D(x) = lambda - d/dt log p(x, t)."""
    return lambda_nsg - oracle_temporal_derivative(x_t, spec, t)


def closed_form_nsg(
    x_t: np.ndarray,
    spec: GaussianProcessSpec,
    t: int,
    lambda_nsg: float,
    denominator_floor: float = 1e-12,
) -> np.ndarray:
    """Exact normalized spatiotemporal gradient g(x, t) for the Gaussian process."""
    den = nsg_denominator(x_t, spec, t, lambda_nsg)
    if abs(den) < denominator_floor:
        raise DegenerateDenominatorError(
            f"|denominator| = {abs(den):.3g} below floor {denominator_floor:.3g} at t={t}"
        )
    return oracle_score(x_t, spec, t) / den


def displacement_matching_derivative(
    x_t: np.ndarray, spec: GaussianProcessSpec, t: int
) -> np.ndarray:
    """Displacement dx (parallel to x) for which the motion estimator
    <score, dx>/dt reproduces -d/dt log p(x, t) exactly with dt = 1.

    Solves <-x/s^2, alpha*x> = -d/dt log p for alpha; requires x != 0.
    """
    x = np.asarray(x_t, dtype=np.float64)
    nsq = float(x @ x)
    if nsq == 0.0:
        raise DegenerateDenominatorError("displacement undefined at x = 0")
    s = spec.schedule.sigma(t)
    sd = spec.schedule.sigma_dot(t)
    alpha = -spec.d * sd * s / nsq + sd / s
    return alpha * x


@dataclass(frozen=True)
class TranslatingDensitySpec:
    """Gaussian bump translating at constant velocity: exact density
    conservation along x -> x + c per unit frame time."""

    d: int
    frame_count: int
    sigma: float
    velocity: np.ndarray
    seed: int = 0

    def __post_init__(self):
        c = np.asarray(self.velocity, dtype=np.float64).reshape(-1)
        if c.shape != (self.d,):
            raise ConfigError(f"velocity must have dimension {self.d}, got {c.shape}")
        object.__setattr__(self, "velocity", c)
        if not self.sigma > 0:
            raise ConfigError("sigma must be positive")
        if self.frame_count < 2:
            raise ConfigError("need frame_count >= 2")

    def log_density_dt(self, x: np.ndarray, t: float) -> float:
        """Exact d/dt log p(x, t) = c . (x - c t) / sigma^2."""
        x = np.asarray(x, dtype=np.float64)
        return float(self.velocity @ (x - self.velocity * t)) / self.sigma**2

    def score(self, x: np.ndarray, t: float) -> np.ndarray:
        """Gradient of log N(c t, sigma^2 I) at x."""
        return -(np.asarray(x, dtype=np.float64) - self.velocity * t) / self.sigma**2


def translating_sequence(
    spec: TranslatingDensitySpec, rng: np.random.Generator | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """One trajectory sampled at t=1 and advanced by exactly c per frame.

    Returns (video, exact d/dt log p values per frame).
    """
    if rng is None:
        rng = substream(spec.seed, "translating")
    x1 = spec.velocity * 1.0 + spec.sigma * rng.standard_normal(spec.d)
    frames = np.empty((spec.frame_count, spec.d))
    frames[0] = x1
    for i in range(1, spec.frame_count):
        frames[i] = frames[i - 1] + spec.velocity
    dlogp = np.array(
        [spec.log_density_dt(frames[i], i + 1) for i in range(spec.frame_count)]
    )
    return frames, dlogp
