"""Monte Carlo verification of the concentration results behind the detector.

Every check draws from the synthetic Gaussian processes, measures the
empirical frequency of the event a bound forbids, and passes iff that
frequency stays within the theoretical rate plus a 3-sigma binomial slack
3*sqrt(rate*(1-rate)/trials), which makes the checks stable across seeds.
Noncentral chi-squared variates are sampled exactly as sums of squared
shifted standard normals, the shift carried in the first coordinate.

Two checks report companion values next to the operative ones so the reports
document the sensitive choices:

* the denominator-gap bound is checked with its |sigma_dot|/sigma prefactor
  (the scale the gap actually lives on); the prefactor-free variant and its
  empirical rate ride along in `extra`.
* the feasible-constants selection uses lower confidence bounds on the
  denominators derived from the tail inequalities. The sign-flipped variants
  (`stated_*` fields) place C above the denominators' high-probability region
  and cannot deliver P{D_r > C and D_f > C} >= 1 - delta; they are retained in
  reports precisely so the coverage collapse is visible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .errors import AdmissibilityError, ConfigError
from .rng import substream
from .synth import GaussianProcessSpec, SigmaSchedule

KS_THRESHOLD = 0.01


def binomial_slack(rate: float, trials: int) -> float:
    return 3.0 * math.sqrt(rate * (1.0 - rate) / trials)


@dataclass(frozen=True)
class BoundCheckReport:
    """Outcome of one tail / coverage check."""

    name: str
    trials: int
    violations: int
    bound_rate: float
    extra: dict = field(default_factory=dict)

    @property
    def empirical_rate(self) -> float:
        return self.violations / self.trials

    @property
    def slack(self) -> float:
        return binomial_slack(self.bound_rate, self.trials)

    @property
    def passed(self) -> bool:
        return self.empirical_rate <= self.bound_rate + self.slack

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "kind": "bound",
            "trials": self.trials,
            "violations": self.violations,
            "empirical_rate": self.empirical_rate,
            "bound_rate": self.bound_rate,
            "slack": self.slack,
            "passed": self.passed,
            **({"extra": self.extra} if self.extra else {}),
        }


@dataclass(frozen=True)
class DistributionFitReport:
    """Kolmogorov-Smirnov fit of transformed samples against a target law."""

    name: str
    trials: int
    ks_distance: float
    threshold: float = KS_THRESHOLD
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.ks_distance < self.threshold

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "kind": "distribution-fit",
            "trials": self.trials,
            "ks_distance": self.ks_distance,
            "threshold": self.threshold,
            "passed": self.passed,
            **({"extra": self.extra} if self.extra else {}),
        }


@dataclass(frozen=True)
class OrderingReport:
    """One-sided location comparison between two sample sets."""

    name: str
    trials: int
    p_value: float
    threshold: float = 0.01
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.p_value < self.threshold

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "kind": "ordering",
            "trials": self.trials,
            "p_value": self.p_value,
            "threshold": self.threshold,
            "passed": self.passed,
            **({"extra": self.extra} if self.extra else {}),
        }


# --- chi-squared sampling and tail bounds -----------------------------------


def sample_chi2(d: int, phi: float, trials: int, rng: np.random.Generator) -> np.ndarray:
    """chi^2(d, phi) as sum of d squared normals, shift in coordinate 0."""
    z = rng.standard_normal((trials, d))
    z[:, 0] += math.sqrt(phi)
    return (z * z).sum(axis=1)


def chi2_upper_threshold(d: int, phi: float, t: float) -> float:
    return d + phi + 2.0 * math.sqrt((d + 2.0 * phi) * t) + 2.0 * t


def chi2_lower_threshold(d: int, phi: float, t: float) -> float:
    return d + phi - 2.0 * math.sqrt((d + 2.0 * phi) * t)


def chi2_tail_check(d: int, phi: float, t: float, trials: int, seed: int) -> list[BoundCheckReport]:
    """Both tails of the noncentral chi-squared bound at exponent t."""
    if trials < 10_000:
        raise ConfigError("tail checks need >= 1e4 trials")
    rng = substream(seed, "chi2-tail", d, repr(phi), repr(t))
    x = sample_chi2(d, phi, trials, rng)
    rate = math.exp(-t)
    upper = int((x >= chi2_upper_threshold(d, phi, t)).sum())
    lower = int((x <= chi2_lower_threshold(d, phi, t)).sum())
    tag = f"d={d},phi={phi:g},t={t:g}"
    return [
        BoundCheckReport(f"chi2-tail-upper[{tag}]", trials, upper, rate),
        BoundCheckReport(f"chi2-tail-lower[{tag}]", trials, lower, rate),
    ]


def chi2_magnitude_bound(d: int, phi: float, delta: float) -> float:
    """Two-sided magnitude bound holding with probability >= 1 - delta."""
    log2d = math.log(2.0 / delta)
    return d + phi + math.sqrt(4.0 * (d + 2.0 * phi) * log2d) + 2.0 * log2d


def chi2_magnitude_check(d: int, phi: float, delta: float, trials: int, seed: int) -> BoundCheckReport:
    if trials < 10_000:
        raise ConfigError("magnitude checks need >= 1e4 trials")
    rng = substream(seed, "chi2-magnitude", d, repr(phi), repr(delta))
    x = sample_chi2(d, phi, trials, rng)
    bound = chi2_magnitude_bound(d, phi, delta)
    violations = int((np.abs(x) > bound).sum())
    return BoundCheckReport(
        f"chi2-magnitude[d={d},phi={phi:g},delta={delta:g}]",
        trials,
        violations,
        delta,
        extra={"bound": bound},
    )


# --- denominator laws and gaps ----------------------------------------------


def _frame_params(spec: GaussianProcessSpec, t: int) -> tuple[float, float, float]:
    s = spec.schedule.sigma(t)
    sd = spec.schedule.sigma_dot(t)
    return s, sd, spec.noncentrality(t)


def sample_denominators(
    spec: GaussianProcessSpec, t: int, lambda_nsg: float, trials: int, rng: np.random.Generator
) -> np.ndarray:
    """Draw frames from the process at time t and evaluate D = lam - d/dt log p."""
    s, sd, _ = _frame_params(spec, t)
    x = spec.mu[None, :] + s * rng.standard_normal((trials, spec.d))
    nsq = (x * x).sum(axis=1)
    return lambda_nsg + spec.d * sd / s - nsq * sd / s**3


def denominator_law_check(
    spec: GaussianProcessSpec, t: int, lambda_nsg: float, trials: int, seed: int
) -> DistributionFitReport:
    """The denominator law: D ~ lam + d*sd/s - (sd/s) * chi^2(d, phi).

    With a flat schedule the denominator is the constant lam and is checked
    for exact constancy; otherwise the samples are mapped back to chi-squared
    variates and KS-fitted against the central or noncentral law.
    """
    s, sd, phi = _frame_params(spec, t)
    rng = substream(seed, "denominator-law", t)
    dvals = sample_denominators(spec, t, lambda_nsg, trials, rng)
    name = f"denominator-law[d={spec.d},phi={phi:g},t={t}]"
    if sd == 0.0:
        exact = bool((dvals == lambda_nsg).all())
        return DistributionFitReport(
            name, trials, 0.0 if exact else np.inf, extra={"degenerate": True}
        )
    transformed = (lambda_nsg + spec.d * sd / s - dvals) * s / sd
    dist = stats.chi2(spec.d) if phi == 0.0 else stats.ncx2(spec.d, phi)
    ks = stats.kstest(transformed, dist.cdf).statistic
    return DistributionFitReport(
        name,
        trials,
        float(ks),
        extra={"mean": float(transformed.mean()), "expected_mean": spec.d + phi},
    )


def denominator_gap_bound(d: int, phi: float, delta: float, prefactor: float) -> float:
    log4d = math.log(4.0 / delta)
    core = (
        phi
        + 2.0 * math.sqrt((d + 2.0 * phi) * log4d)
        + 2.0 * math.sqrt(d * log4d)
        + 2.0 * log4d
    )
    return prefactor * core


def denominator_gap_check(
    real_spec: GaussianProcessSpec,
    fake_spec: GaussianProcessSpec,
    t: int,
    delta: float,
    trials: int,
    seed: int,
) -> BoundCheckReport:
    """|D_r - D_f| coverage. The pass criterion uses the derivation's
    |sigma_dot|/sigma prefactor; the prefactor-free stated form and its
    empirical rate are reported in `extra`."""
    s, sd, _ = _frame_params(real_spec, t)
    if sd == 0.0:
        raise ConfigError("gap check needs a non-flat schedule")
    phi = fake_spec.noncentrality(t)
    rng = substream(seed, "denominator-gap", t)
    # lambda cancels in the difference; use 0
    d_r = sample_denominators(real_spec, t, 0.0, trials, rng)
    d_f = sample_denominators(fake_spec, t, 0.0, trials, rng)
    gap = np.abs(d_r - d_f)
    bound = denominator_gap_bound(real_spec.d, phi, delta, abs(sd) / s)
    stated = denominator_gap_bound(real_spec.d, phi, delta, 1.0)
    violations = int((gap > bound).sum())
    return BoundCheckReport(
        f"denominator-gap[d={real_spec.d},phi={phi:g},delta={delta:g}]",
        trials,
        violations,
        delta,
        extra={
            "bound": bound,
            "prefactor": abs(sd) / s,
            "stated_bound_no_prefactor": stated,
            "stated_violation_rate": float((gap > stated).mean()),
        },
    )


def norm_bound_check(
    real_spec: GaussianProcessSpec,
    fake_spec: GaussianProcessSpec,
    t: int,
    delta: float,
    trials: int,
    seed: int,
) -> list[BoundCheckReport]:
    """Coverage of the three squared-norm bounds: ||x||^2/s^2, ||y||^2/s^2 and
    ||x - y||^2/(2 s^2), with noncentralities 0, phi and phi/2."""
    s, _, _ = _frame_params(real_spec, t)
    d = real_spec.d
    phi = fake_spec.noncentrality(t)
    rng = substream(seed, "norm-bounds", t)
    x = s * rng.standard_normal((trials, d))
    y = fake_spec.mu[None, :] + s * rng.standard_normal((trials, d))
    log2d = math.log(2.0 / delta)

    def coverage(name, samples, bound):
        return BoundCheckReport(
            name, trials, int((samples > bound).sum()), delta, extra={"bound": bound}
        )

    return [
        coverage(
            f"norm-real[d={d},delta={delta:g}]",
            (x * x).sum(axis=1) / s**2,
            d + math.sqrt(4.0 * d * log2d) + 2.0 * log2d,
        ),
        coverage(
            f"norm-fake[d={d},phi={phi:g},delta={delta:g}]",
            (y * y).sum(axis=1) / s**2,
            d + phi + math.sqrt(4.0 * (d + 2.0 * phi) * log2d) + 2.0 * log2d,
        ),
        coverage(
            f"norm-diff[d={d},phi={phi:g},delta={delta:g}]",
            ((x - y) ** 2).sum(axis=1) / (2.0 * s**2),
            d + phi / 2.0 + math.sqrt(4.0 * (d + phi) * log2d) + 2.0 * log2d,
        ),
    ]


# --- feasible constants ------------------------------------------------------


@dataclass(frozen=True)
class AdmissibleConstants:
    """Denominator lower bound C and the minimal lambda that keeps it positive.

    `c` / `lambda_floor` deliver P{D_r > C and D_f > C} >= 1 - delta;
    `stated_c` / `stated_lambda_floor` are the sign-flipped variants kept for
    report comparison (see module docstring).
    """

    case: int  # 1: sigma_dot/sigma > 0, 2: < 0
    c: float
    lambda_floor: float
    stated_c: float
    stated_lambda_floor: float
    real_lower_bound: float
    fake_lower_bound: float

    @property
    def admissible(self) -> bool:
        return self.c > 0.0


def admissible_constants(
    fake_spec: GaussianProcessSpec, t: int, lambda_nsg: float, delta: float
) -> AdmissibleConstants:
    """Feasible (C, lambda floor) per sign of sigma_dot/sigma at frame t."""
    s, sd, _ = _frame_params(fake_spec, t)
    if sd == 0.0:
        raise AdmissibilityError("sigma_dot = 0: denominators are the constant lambda")
    ratio = sd / s
    d = fake_spec.d
    phi = fake_spec.noncentrality(t)
    log2d = math.log(2.0 / delta)
    sqrt_d = math.sqrt(d * log2d)
    sqrt_dphi = math.sqrt((d + 2.0 * phi) * log2d)

    if ratio > 0:
        case = 1
        # upper tails of the chi-squared variates push D down
        real_lb = lambda_nsg - ratio * (2.0 * sqrt_d + 2.0 * log2d)
        fake_lb = lambda_nsg - ratio * (phi + 2.0 * sqrt_dphi + 2.0 * log2d)
        floor = ratio * (phi + 2.0 * sqrt_dphi + 2.0 * log2d)
        stated_c = lambda_nsg - ratio * phi + 2.0 * ratio * sqrt_d + 2.0 * ratio * log2d
        stated_floor = ratio * (d + phi) - 2.0 * ratio * sqrt_d - 2.0 * ratio * log2d
    else:
        case = 2
        # lower tails of the chi-squared variates push D down
        real_lb = lambda_nsg + 2.0 * ratio * sqrt_d
        fake_lb = lambda_nsg - ratio * phi + 2.0 * ratio * sqrt_dphi
        floor = -ratio * max(2.0 * sqrt_d, 2.0 * sqrt_dphi - phi)
        stated_c = lambda_nsg - 2.0 * ratio * sqrt_d
        stated_floor = 2.0 * ratio * sqrt_d
    c = min(real_lb, fake_lb)
    return AdmissibleConstants(case, c, floor, stated_c, stated_floor, real_lb, fake_lb)


def admissible_constants_check(
    real_spec: GaussianProcessSpec,
    fake_spec: GaussianProcessSpec,
    t: int,
    lambda_nsg: float,
    delta: float,
    trials: int,
    seed: int,
) -> BoundCheckReport:
    """Monte Carlo validation of the guarantee P{D_r > C and D_f > C} >= 1 - delta."""
    consts = admissible_constants(fake_spec, t, lambda_nsg, delta)
    if not consts.admissible:
        raise AdmissibilityError(
            f"lambda = {lambda_nsg} is below the floor {consts.lambda_floor:.6g}"
        )
    rng = substream(seed, "constants-check", t)
    d_r = sample_denominators(real_spec, t, lambda_nsg, trials, rng)
    d_f = sample_denominators(fake_spec, t, lambda_nsg, trials, rng)
    violations = int((~((d_r > consts.c) & (d_f > consts.c))).sum())
    return BoundCheckReport(
        f"admissible-constants[case={consts.case},delta={delta:g}]",
        trials,
        violations,
        delta,
        extra={
            "c": consts.c,
            "lambda_floor": consts.lambda_floor,
            "stated_c": consts.stated_c,
            "stated_lambda_floor": consts.stated_lambda_floor,
            "stated_c_coverage": float(((d_r > consts.stated_c) & (d_f > consts.stated_c)).mean()),
        },
    )


# --- feature-distance bound ---------------------------------------------------


@dataclass(frozen=True)
class DistanceBoundInputs:
    """Inputs of the explicit feature-distance bound at one evaluation time."""

    d: int
    frame_count: int
    phi: float
    sigma: float
    sigma_dot: float
    lambda_nsg: float
    delta: float
    c_bound: float

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise ConfigError("delta must lie in (0, 1)")
        if not self.c_bound > 0:
            raise ConfigError("C must be positive")
        if not self.sigma > 0:
            raise ConfigError("sigma must be positive")


def nsg_distance_bound(inputs: DistanceBoundInputs) -> float:
    """Explicit high-probability bound on ||G(x) - G(y)||^2:

    (2T / (C^4 sigma^2)) * [10 phi d + 4 d^2 + 2 d + phi
                            + log(12T/delta) (17 phi + 14 d + 4)
                            + 9 log^2(12T/delta)]
    """
    d = inputs.d
    phi = inputs.phi
    t_count = inputs.frame_count
    ell = math.log(12.0 * t_count / inputs.delta)
    bracket = (
        10.0 * phi * d
        + 4.0 * d * d
        + 2.0 * d
        + phi
        + ell * (17.0 * phi + 14.0 * d + 4.0)
        + 9.0 * ell * ell
    )
    return 2.0 * t_count / (inputs.c_bound**4 * inputs.sigma**2) * bracket


@dataclass(frozen=True)
class DistanceCheckResult:
    distances: np.ndarray
    bound: float
    c_bound: float
    acceptance_rate: float


def feature_distance_samples(
    real_spec: GaussianProcessSpec,
    fake_spec: GaussianProcessSpec,
    lambda_nsg: float,
    delta: float,
    trials: int,
    seed: int,
    delta_cond: float | None = None,
) -> DistanceCheckResult:
    """Sample paired videos, condition on all denominators exceeding C in
    magnitude (resampling rejected pairs), and return the squared distances
    between their closed-form feature matrices together with the per-frame
    bound summed over frames.

    C is the per-frame feasible constant at confidence delta_cond (default:
    delta), minimized over frames; lambda must clear every frame's floor.
    """
    if delta_cond is None:
        delta_cond = delta
    d = real_spec.d
    t_count = real_spec.frame_count
    if fake_spec.d != d or fake_spec.frame_count != t_count:
        raise ConfigError("real and fake specs must share geometry")

    sigmas = np.array([real_spec.schedule.sigma(t) for t in range(1, t_count + 1)])
    sdots = np.array([real_spec.schedule.sigma_dot(t) for t in range(1, t_count + 1)])
    phis = np.array([fake_spec.noncentrality(t) for t in range(1, t_count + 1)])

    c_bound = np.inf
    for t in range(1, t_count + 1):
        consts = admissible_constants(fake_spec, t, lambda_nsg, delta_cond)
        if not consts.admissible or lambda_nsg <= consts.lambda_floor:
            raise AdmissibilityError(
                f"(C, lambda) infeasible at frame {t}: floor {consts.lambda_floor:.6g}"
            )
        c_bound = min(c_bound, consts.c)

    bound = sum(
        nsg_distance_bound(
            DistanceBoundInputs(
                d, t_count, float(phis[i]), float(sigmas[i]), float(sdots[i]), lambda_nsg, delta, c_bound
            )
        )
        / t_count
        for i in range(t_count)
    )

    rng = substream(seed, "distance-check")
    ratio = sdots / sigmas
    collected = []
    accepted = 0
    proposed = 0
    while accepted < trials:
        batch = max(trials - accepted, 4096)
        x = sigmas[None, :, None] * rng.standard_normal((batch, t_count, d))
        y = fake_spec.mu[None, None, :] + sigmas[None, :, None] * rng.standard_normal(
            (batch, t_count, d)
        )
        nsq_x = (x * x).sum(axis=2) / sigmas[None, :] ** 2
        nsq_y = (y * y).sum(axis=2) / sigmas[None, :] ** 2
        d_r = lambda_nsg + ratio[None, :] * (d - nsq_x)
        d_f = lambda_nsg + ratio[None, :] * (d - nsq_y)
        keep = (np.abs(d_r) > c_bound).all(axis=1) & (np.abs(d_f) > c_bound).all(axis=1)
        proposed += batch
        if keep.any():
            g_x = -x[keep] / sigmas[None, :, None] ** 2 / d_r[keep][:, :, None]
            g_y = -y[keep] / sigmas[None, :, None] ** 2 / d_f[keep][:, :, None]
            collected.append(((g_x - g_y) ** 2).sum(axis=(1, 2)))
            accepted += int(keep.sum())
        if proposed > 1000 * trials + 100_000:
            raise AdmissibilityError("conditioning acceptance rate is vacuously small")
    distances = np.concatenate(collected)[:trials]
    return DistanceCheckResult(distances, float(bound), float(c_bound), trials / proposed)


def feature_distance_check(
    real_spec: GaussianProcessSpec,
    fake_spec: GaussianProcessSpec,
    lambda_nsg: float,
    delta: float,
    trials: int,
    seed: int,
    delta_cond: float | None = None,
) -> BoundCheckReport:
    """Exceedance rate of ||G(x) - G(y)||^2 over the explicit bound."""
    result = feature_distance_samples(
        real_spec, fake_spec, lambda_nsg, delta, trials, seed, delta_cond
    )
    phi = max(fake_spec.noncentrality(t) for t in range(1, fake_spec.frame_count + 1))
    violations = int((result.distances > result.bound).sum())
    return BoundCheckReport(
        f"feature-distance[d={real_spec.d},T={real_spec.frame_count},phi_max={phi:g},delta={delta:g}]",
        trials,
        violations,
        delta,
        extra={
            "bound": result.bound,
            "c": result.c_bound,
            "acceptance_rate": result.acceptance_rate,
            "mean_sq_distance": float(result.distances.mean()),
        },
    )


# --- default verification battery --------------------------------------------

TAIL_GRID_D = (1, 4, 16)
TAIL_GRID_PHI = (0.0, 1.0, 10.0)
TAIL_GRID_T = (0.5, 1.0, 2.0)


def _suite_specs(d: int, frame_count: int, schedule: SigmaSchedule, phi: float):
    """Real/fake spec pair with the shift norm set so the noncentrality at
    t = 1 equals phi."""
    real = GaussianProcessSpec.real(d, frame_count, schedule)
    fake = GaussianProcessSpec.fake(d, frame_count, math.sqrt(phi) * schedule.sigma(1), schedule)
    return real, fake


def default_suite(trials: int = 100_000, theorem_trials: int = 10_000, seed: int = 0) -> list:
    """The full verification battery; returns heterogeneous reports, each with
    `.name`, `.passed` and `.to_json_dict()`."""
    reports: list = []

    for d in TAIL_GRID_D:
        for phi in TAIL_GRID_PHI:
            for t in TAIL_GRID_T:
                reports.extend(chi2_tail_check(d, phi, t, trials, seed))

    for d in TAIL_GRID_D:
        for phi in TAIL_GRID_PHI:
            reports.append(chi2_magnitude_check(d, phi, 0.05, trials, seed))
    reports.append(chi2_magnitude_check(1, 0.0, 0.5, trials, seed))

    # denominator laws on a growing-width schedule (sigma(t) = t at t = 1)
    linear = SigmaSchedule("linear", 0.0, 1.0)
    real_lin, fake_lin = _suite_specs(4, 2, linear, 1.0)
    reports.append(denominator_law_check(real_lin, 1, 0.1, trials, seed))
    reports.append(denominator_law_check(fake_lin, 1, 0.1, trials, seed))
    flat_real = GaussianProcessSpec.real(4, 2, SigmaSchedule("constant", 1.0))
    reports.append(denominator_law_check(flat_real, 1, 0.1, trials, seed))

    reports.append(denominator_gap_check(real_lin, fake_lin, 1, 0.05, trials, seed))
    reports.append(denominator_gap_check(real_lin, real_lin, 1, 0.05, trials, seed))
    reports.extend(norm_bound_check(real_lin, fake_lin, 1, 0.05, trials, seed))

    # feasible constants, one per sign case
    reports.append(admissible_constants_check(real_lin, fake_lin, 1, 20.0, 0.05, trials, seed))
    shrink = SigmaSchedule("exponential", 1.0, -0.05)
    real_sh, fake_sh = _suite_specs(4, 8, shrink, 1.0)
    reports.append(admissible_constants_check(real_sh, fake_sh, 1, 1.0, 0.05, trials, seed))

    # feature-distance bound at phi in {0, 1}, plus the mean-ordering claim
    res0 = feature_distance_samples(real_sh, real_sh, 1.0, 0.05, theorem_trials, seed)
    res1 = feature_distance_samples(real_sh, fake_sh, 1.0, 0.05, theorem_trials, seed)
    for phi, res in ((0.0, res0), (1.0, res1)):
        violations = int((res.distances > res.bound).sum())
        reports.append(
            BoundCheckReport(
                f"feature-distance[d=4,T=8,phi={phi:g},delta=0.05]",
                theorem_trials,
                violations,
                0.05,
                extra={
                    "bound": res.bound,
                    "c": res.c_bound,
                    "acceptance_rate": res.acceptance_rate,
                    "mean_sq_distance": float(res.distances.mean()),
                },
            )
        )
    mw = stats.mannwhitneyu(res1.distances, res0.distances, alternative="greater")
    reports.append(
        OrderingReport(
            "feature-distance-mean-ordering[phi=1>phi=0]",
            theorem_trials,
            float(mw.pvalue),
            extra={
                "mean_phi0": float(res0.distances.mean()),
                "mean_phi1": float(res1.distances.mean()),
            },
        )
    )
    return reports
