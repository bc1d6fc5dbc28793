"""Monte-Carlo sampling of permutation statistics and convergence diagnostics.

Samples are drawn in chunks of ``chunk_size`` permutations; chunk ``c`` always
uses ``substream(seed, c)``, so results depend on the seed and chunk size but
not on the number of worker processes. Standard errors come from bootstrap
resampling on streams keyed above ``AUXILIARY_STREAM_KEY``.
"""
import math
import multiprocessing as mp
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Optional

import numpy as np

# pylint: disable=no-self-argument
from pydantic import BaseModel, validator
from scipy import optimize, stats

from permcumulants.base import AUXILIARY_STREAM_KEY, ParameterError, substream
from permcumulants.permutation import Permutation, ewens_sample_batch, exact_distribution
from permcumulants.settings import Settings, check_count, check_positive, check_seed, check_tv_threshold
from permcumulants.statistics import (
    BivincularPattern,
    DashedCounter,
    adjacency_batch,
    count_dashed,
    dashed_mean,
    f_batch,
    f_expectation,
    f_limit,
    gamma_batch,
    k_covariance,
    z_covariance,
)
from permcumulants.utils import logger

MAX_CUMULANT_ESTIMATE = 4


class RunConfig(BaseModel):
    """Everything that determines a Monte-Carlo run."""

    n: int
    theta: float
    samples: int = 10000
    seed: int = 0
    workers: int = 1
    chunk_size: int = 1000
    bootstrap_resamples: int = 200
    se_multiple: float = 4.0
    tv_threshold: float = 0.01

    check_counts = validator(
        "n", "samples", "workers", "chunk_size", "bootstrap_resamples", allow_reuse=True
    )(check_count)
    check_seeds = validator("seed", allow_reuse=True)(check_seed)
    check_reals = validator("theta", "se_multiple", allow_reuse=True)(check_positive)
    check_tv_thresholds = validator("tv_threshold", allow_reuse=True)(check_tv_threshold)

    class Config:
        """Run configs are values."""

        frozen = True

    @classmethod
    def from_settings(cls, settings: Settings, **overrides: Any) -> "RunConfig":
        """Defaults from the settings, then every override that is not ``None``."""
        values = {
            "samples": settings.samples,
            "seed": settings.seed,
            "workers": settings.workers,
            "chunk_size": settings.chunk_size,
            "bootstrap_resamples": settings.bootstrap_resamples,
            "se_multiple": settings.se_multiple,
            "tv_threshold": settings.tv_threshold,
        }
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**values)

    def with_size(self, n: int) -> "RunConfig":
        return RunConfig(**{**self.dict(), "n": n})

    def bootstrap_stream(self, index: int) -> np.random.Generator:
        return substream(self.seed, AUXILIARY_STREAM_KEY + index)


class Statistic:
    """A real-valued (or vector-valued) function of a batch of permutations."""

    name = "statistic"

    @property
    def columns(self) -> list[str]:
        return [self.name]

    def evaluate(self, samples: np.ndarray) -> np.ndarray:
        """Values for every row of ``samples``, shape ``(rows,)`` or ``(rows, columns)``."""
        raise NotImplementedError


class GammaStatistic(Statistic):
    def __init__(self, p: int):
        self.p = p
        self.name = f"gamma_{p}"

    def evaluate(self, samples: np.ndarray) -> np.ndarray:
        return gamma_batch(samples, self.p)


class AdjacencyStatistic(Statistic):
    name = "adjacencies"

    def evaluate(self, samples: np.ndarray) -> np.ndarray:
        return adjacency_batch(samples)


class FStatistic(Statistic):
    def __init__(self, xs: Sequence[float]):
        self.xs = [float(x) for x in xs]

    @property
    def columns(self) -> list[str]:
        return [f"F({x:g})" for x in self.xs]

    def evaluate(self, samples: np.ndarray) -> np.ndarray:
        return f_batch(samples, self.xs)


class FZStatistic(FStatistic):
    """``sqrt(N) (F(x) - E F(x))`` with the exact finite-``N`` mean."""

    def __init__(self, xs: Sequence[float], n: int, theta: float):
        super().__init__(xs)
        self.n = n
        self.means = np.array([float(f_expectation(n, float(theta), x)) for x in self.xs])

    @property
    def columns(self) -> list[str]:
        return [f"Z({x:g})" for x in self.xs]

    def evaluate(self, samples: np.ndarray) -> np.ndarray:
        return math.sqrt(self.n) * (f_batch(samples, self.xs) - self.means)


class DashedStatistic(Statistic):
    def __init__(self, pattern: BivincularPattern):
        self.pattern = pattern
        self.counter = DashedCounter(pattern)
        self.name = f"O{pattern}"

    def evaluate(self, samples: np.ndarray) -> np.ndarray:
        return self.counter.batch(samples)


class DashedZStatistic(DashedStatistic):
    """``sqrt(N) (O / N ** (p - q) - 1 / (p! (p - q)!))``."""

    def __init__(self, pattern: BivincularPattern, n: int):
        super().__init__(pattern)
        self.n = n
        self.name = f"Z{pattern}"

    def evaluate(self, samples: np.ndarray) -> np.ndarray:
        exponent = self.pattern.p - self.pattern.q
        normalised = super().evaluate(samples) / float(self.n) ** exponent
        return math.sqrt(self.n) * (normalised - float(dashed_mean(self.pattern.p, self.pattern.q)))


class FunctionStatistic(Statistic):
    """Any function of a single permutation; it must be picklable to run on several workers."""

    def __init__(self, function: Callable[[Permutation], float], name: str = "statistic"):
        self.function = function
        self.name = name

    def evaluate(self, samples: np.ndarray) -> np.ndarray:
        return np.array([self.function(Permutation.from_array(row)) for row in samples], dtype=np.float64)


class StackedStatistic(Statistic):
    """Several statistics of the same permutations side by side."""

    def __init__(self, parts: Sequence[Statistic]):
        self.parts = list(parts)

    @property
    def columns(self) -> list[str]:
        return [column for part in self.parts for column in part.columns]

    def evaluate(self, samples: np.ndarray) -> np.ndarray:
        return np.column_stack([part.evaluate(samples) for part in self.parts])


def _chunks(cfg: RunConfig) -> list[tuple[int, int]]:
    full, remainder = divmod(cfg.samples, cfg.chunk_size)
    sizes = [cfg.chunk_size] * full + ([remainder] if remainder else [])
    return list(enumerate(sizes))


def _sample_chunk(job: tuple[Statistic, int, float, int, int, int]) -> np.ndarray:
    statistic, n, theta, seed, chunk, size = job
    samples = ewens_sample_batch(n, theta, size, substream(seed, chunk))
    return np.asarray(statistic.evaluate(samples))


def sample_permutations(cfg: RunConfig) -> np.ndarray:
    """The permutations behind ``sample_statistic``, shape ``(samples, N)``."""
    return np.concatenate(
        [ewens_sample_batch(cfg.n, cfg.theta, size, substream(cfg.seed, chunk)) for chunk, size in _chunks(cfg)]
    )


def sample_statistic(statistic: Statistic, cfg: RunConfig) -> np.ndarray:
    """Evaluate ``statistic`` on ``cfg.samples`` Ewens permutations."""
    jobs = [(statistic, cfg.n, cfg.theta, cfg.seed, chunk, size) for chunk, size in _chunks(cfg)]
    logger.debug(
        "Sampling %d permutations of size %d in %d chunks on %d workers.",
        cfg.samples,
        cfg.n,
        len(jobs),
        cfg.workers,
    )
    if cfg.workers == 1 or len(jobs) == 1:
        results = [_sample_chunk(job) for job in jobs]
    else:
        with mp.Pool(min(cfg.workers, len(jobs))) as pool:
            results = pool.map(_sample_chunk, jobs)
    return np.concatenate(results)


@dataclass(frozen=True)
class CumulantEstimate:
    order: int
    estimate: float
    se: float
    sample_size: int

    def check(self, target: float, se_multiple: float) -> "CheckedEstimate":
        return CheckedEstimate(self, float(target), abs(self.estimate - float(target)) <= se_multiple * self.se)

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "estimate": self.estimate,
            "se": self.se,
            "sample_size": self.sample_size,
        }


@dataclass(frozen=True)
class CheckedEstimate:
    estimate: CumulantEstimate
    target: float
    passed: bool

    def to_json(self) -> dict:
        return {**self.estimate.to_json(), "target": self.target, "pass": self.passed}


def _bootstrap_se(
    data: tuple[np.ndarray, ...],
    statistic: Callable[..., float],
    resamples: int,
    rng: np.random.Generator,
    paired: bool = False,
) -> float:
    result = stats.bootstrap(
        data,
        statistic,
        n_resamples=resamples,
        vectorized=False,
        paired=paired,
        method="percentile",
        rng=rng,
    )
    return float(result.standard_error)


def cumulant_estimates(
    values: np.ndarray,
    max_order: int,
    resamples: int,
    rng: np.random.Generator,
) -> list[CumulantEstimate]:
    """k-statistics of orders ``1..max_order`` with bootstrap standard errors."""
    if not 1 <= max_order <= MAX_CUMULANT_ESTIMATE:
        raise ParameterError(f"cumulants are estimated up to order {MAX_CUMULANT_ESTIMATE}, got {max_order}")
    values = np.asarray(values, dtype=np.float64).ravel()
    if len(values) <= max_order:
        raise ParameterError(f"{len(values)} samples are too few for order {max_order}")
    if np.ptp(values) == 0:
        constant = float(values[0])
        return [
            CumulantEstimate(order, constant if order == 1 else 0.0, 0.0, len(values))
            for order in range(1, max_order + 1)
        ]
    estimates = []
    for order in range(1, max_order + 1):
        def kstat(sample: np.ndarray, order: int = order) -> float:
            return float(stats.kstat(sample, order))

        estimate = kstat(values)
        se = _bootstrap_se((values,), kstat, resamples, rng)
        estimates.append(CumulantEstimate(order, estimate, se, len(values)))
    return estimates


def estimate_cumulants(
    statistic: Statistic,
    cfg: RunConfig,
    max_order: int = MAX_CUMULANT_ESTIMATE,
) -> list[CumulantEstimate]:
    values = sample_statistic(statistic, cfg)
    return cumulant_estimates(values, max_order, cfg.bootstrap_resamples, cfg.bootstrap_stream(0))


def _poisson_tv(values: np.ndarray, lam: float) -> tuple[float, int]:
    cutoff = math.ceil(lam + 10 * math.sqrt(lam))
    counts = np.bincount(np.clip(values, 0, cutoff + 1), minlength=cutoff + 2)
    empirical = counts / len(values)
    reference = stats.poisson.pmf(np.arange(cutoff + 1), lam)
    tail = float(stats.poisson.sf(cutoff, lam))
    distance = 0.5 * (np.abs(empirical[: cutoff + 1] - reference).sum() + abs(empirical[cutoff + 1] - tail))
    return float(distance), cutoff


@dataclass(frozen=True)
class PoissonReport:
    lam: float
    tv: float
    cutoff: int
    threshold: float
    cumulants: list[CheckedEstimate]
    verdict: Optional[bool]

    @property
    def cumulants_pass(self) -> bool:
        return all(check.passed for check in self.cumulants[:2])

    def to_json(self) -> dict:
        return {
            "lambda": self.lam,
            "tv": self.tv,
            "cutoff": self.cutoff,
            "threshold": self.threshold,
            "cumulants": [check.to_json() for check in self.cumulants],
            "tv_pass": self.verdict,
            "cumulants_pass": self.cumulants_pass,
        }


def poisson_diagnostic(values: np.ndarray, lam: float, cfg: RunConfig, stream: int = 0) -> PoissonReport:
    """Compare an integer statistic with ``Poisson(lam)``.

    The total variation distance is computed on ``0..ceil(lam + 10 sqrt(lam))``
    with both tails lumped into one extra cell. ``lam = 0`` passes only for an
    identically zero statistic. Every cumulant of a Poisson law equals ``lam``.
    """
    values = np.asarray(values).astype(np.int64).ravel()
    if lam < 0:
        raise ParameterError(f"lambda must be non-negative, got {lam}")
    if np.any(values < 0):
        raise ParameterError("a Poisson comparison needs a non-negative integer statistic")
    estimates = cumulant_estimates(values, MAX_CUMULANT_ESTIMATE, cfg.bootstrap_resamples, cfg.bootstrap_stream(stream))
    checks = [estimate.check(lam, cfg.se_multiple) for estimate in estimates]
    if lam == 0:
        distance = float(np.mean(values != 0))
        return PoissonReport(lam, distance, 0, cfg.tv_threshold, checks, distance == 0)
    distance, cutoff = _poisson_tv(values, lam)
    return PoissonReport(lam, distance, cutoff, cfg.tv_threshold, checks, distance < cfg.tv_threshold)


@dataclass(frozen=True)
class CorrelationReport:
    rho: Optional[float]
    band: float
    verdict: Optional[bool]

    def to_json(self) -> dict:
        return {"rho": self.rho, "band": self.band, "pass": self.verdict}


def correlation_diagnostic(a: np.ndarray, b: np.ndarray, se_multiple: float) -> CorrelationReport:
    """Pearson correlation against the ``se_multiple / sqrt(n)`` band around zero."""
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    band = se_multiple / math.sqrt(len(a))
    if np.ptp(a) == 0 or np.ptp(b) == 0:
        return CorrelationReport(None, band, None)
    rho = float(np.corrcoef(a, b)[0, 1])
    return CorrelationReport(rho, band, abs(rho) < band)


@dataclass(frozen=True)
class GaussianReport:
    n: int
    cumulants: list[CumulantEstimate]
    skewness: Optional[float]
    excess_kurtosis: Optional[float]
    verdict: Optional[bool]

    def to_json(self) -> dict:
        return {
            "N": self.n,
            "cumulants": [estimate.to_json() for estimate in self.cumulants],
            "skewness": self.skewness,
            "excess_kurtosis": self.excess_kurtosis,
            "pass": self.verdict,
        }


def gaussian_diagnostic(values: np.ndarray, cfg: RunConfig, stream: int = 0) -> GaussianReport:
    """Check that the third and fourth cumulants vanish within the SE multiple.

    A constant statistic gives a degenerate report without a verdict.
    """
    estimates = cumulant_estimates(values, MAX_CUMULANT_ESTIMATE, cfg.bootstrap_resamples, cfg.bootstrap_stream(stream))
    variance = estimates[1].estimate
    if estimates[1].se == 0 and variance == 0:
        return GaussianReport(cfg.n, estimates, None, None, None)
    skewness = estimates[2].estimate / variance**1.5 if variance > 0 else None
    kurtosis = estimates[3].estimate / variance**2 if variance > 0 else None
    verdict = all(abs(estimate.estimate) <= cfg.se_multiple * estimate.se for estimate in estimates[2:])
    return GaussianReport(cfg.n, estimates, skewness, kurtosis, verdict)


@dataclass(frozen=True)
class GaussianGridReport:
    reports: list[GaussianReport]
    variance_gap: Optional[float]
    variance_gap_se: Optional[float]
    verdict: Optional[bool]

    def to_json(self) -> dict:
        return {
            "grid": [report.to_json() for report in self.reports],
            "variance_gap": self.variance_gap,
            "variance_gap_se": self.variance_gap_se,
            "pass": self.verdict,
        }


def gaussian_grid_diagnostic(
    make_statistic: Callable[[int], Statistic],
    n_grid: Sequence[int],
    cfg: RunConfig,
) -> GaussianGridReport:
    """Gaussian reports along a grid of sizes; the variance must settle between the two largest."""
    reports = []
    for index, n in enumerate(sorted(n_grid)):
        logger.info("Gaussian diagnostic at N = %d.", n)
        sized = cfg.with_size(n)
        reports.append(gaussian_diagnostic(sample_statistic(make_statistic(n), sized), sized, index))
    if any(report.verdict is None for report in reports):
        return GaussianGridReport(reports, None, None, None)
    gap = gap_se = None
    stable = True
    if len(reports) >= 2:
        previous, last = reports[-2].cumulants[1], reports[-1].cumulants[1]
        gap = last.estimate - previous.estimate
        gap_se = math.hypot(last.se, previous.se)
        stable = abs(gap) <= cfg.se_multiple * gap_se
    verdict = stable and all(report.verdict for report in reports)
    return GaussianGridReport(reports, gap, gap_se, verdict)


@dataclass(frozen=True)
class CovarianceReport:
    labels: list[str]
    covariance: np.ndarray
    se: np.ndarray
    expected: np.ndarray
    limit: Optional[np.ndarray]
    tolerance: np.ndarray
    verdict: bool

    def to_json(self) -> dict:
        entries = []
        for a, b in zip(*np.triu_indices(len(self.labels))):
            entry = {
                "x": self.labels[a],
                "y": self.labels[b],
                "covariance": float(self.covariance[a, b]),
                "se": float(self.se[a, b]),
                "expected": float(self.expected[a, b]),
                "pass": bool(abs(self.covariance[a, b] - self.expected[a, b]) <= self.tolerance[a, b]),
            }
            if self.limit is not None:
                entry["limit"] = float(self.limit[a, b])
            entries.append(entry)
        return {"entries": entries, "pass": self.verdict}


def covariance_diagnostic(
    values: np.ndarray,
    expected: np.ndarray,
    cfg: RunConfig,
    labels: Optional[Sequence[str]] = None,
    limit: Optional[np.ndarray] = None,
    stream: int = 0,
) -> CovarianceReport:
    """Empirical covariances of the columns of ``values`` against ``expected``, entry by entry."""
    values = np.asarray(values, dtype=np.float64)
    columns = values.shape[1]
    expected = np.asarray(expected, dtype=np.float64)
    if expected.shape != (columns, columns):
        raise ParameterError(f"expected a {columns}x{columns} target, got shape {expected.shape}")
    covariance = np.cov(values, rowvar=False).reshape(columns, columns)
    se = np.zeros((columns, columns))
    rng = cfg.bootstrap_stream(stream)
    for a, b in zip(*np.triu_indices(columns)):
        if np.ptp(values[:, a]) == 0 or np.ptp(values[:, b]) == 0:
            continue
        se[a, b] = se[b, a] = _bootstrap_se(
            (values[:, a], values[:, b]),
            lambda x, y: float(np.cov(x, y)[0, 1]),
            cfg.bootstrap_resamples,
            rng,
            paired=True,
        )
    tolerance = cfg.se_multiple * se
    verdict = bool(np.all(np.abs(covariance - expected) <= tolerance))
    names = list(labels) if labels is not None else [str(k) for k in range(columns)]
    return CovarianceReport(names, covariance, se, expected, limit, tolerance, verdict)


@dataclass(frozen=True)
class InverseNFit:
    intercept: float
    intercept_se: float
    slope: float
    slope_se: float

    def to_json(self) -> dict:
        return {
            "intercept": self.intercept,
            "intercept_se": self.intercept_se,
            "slope": self.slope,
            "slope_se": self.slope_se,
        }


def fit_inverse_n(n_grid: Sequence[int], values: Sequence[float], ses: Sequence[float]) -> InverseNFit:
    """Weighted least-squares fit of ``value + slope / N``.

    Raises:
        ParameterError: with fewer than three grid points.
    """
    if len(n_grid) < 3:
        raise ParameterError(f"the 1/N fit needs at least 3 grid points, got {len(n_grid)}")
    x = np.asarray(n_grid, dtype=np.float64)
    y = np.asarray(values, dtype=np.float64)
    sigma = np.asarray(ses, dtype=np.float64)
    weighted = bool(np.all(sigma > 0))
    parameters, covariance = optimize.curve_fit(
        lambda size, intercept, slope: intercept + slope / size,
        x,
        y,
        p0=(float(y[-1]), 0.0),
        sigma=sigma if weighted else None,
        absolute_sigma=weighted,
    )
    errors = np.sqrt(np.clip(np.diag(covariance), 0, None))
    return InverseNFit(float(parameters[0]), float(errors[0]), float(parameters[1]), float(errors[1]))


@dataclass(frozen=True)
class MeanCheck:
    label: str
    estimate: float
    se: float
    expected: float
    limit: float
    passed: bool

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "estimate": self.estimate,
            "se": self.se,
            "expected": self.expected,
            "limit": self.limit,
            "gap_to_limit": self.expected - self.limit,
            "pass": self.passed,
        }


def f_mean_diagnostic(values: np.ndarray, xs: Sequence[float], cfg: RunConfig) -> list[MeanCheck]:
    """Sample means of ``F(x)`` against the exact finite-``N`` mean; the limit is reported alongside."""
    checks = []
    for index, x in enumerate(xs):
        column = np.asarray(values)[:, index]
        mean = cumulant_estimates(column, 1, cfg.bootstrap_resamples, cfg.bootstrap_stream(index))[0]
        expected = float(f_expectation(cfg.n, cfg.theta, float(x)))
        passed = abs(mean.estimate - expected) <= cfg.se_multiple * mean.se
        checks.append(MeanCheck(f"F({x:g})", mean.estimate, mean.se, expected, float(f_limit(float(x))), passed))
    return checks


def f_covariance_diagnostic(values: np.ndarray, xs: Sequence[float], cfg: RunConfig) -> CovarianceReport:
    """Covariances of ``Z(x)`` against the exact finite-``N`` covariances, with ``K(x, y)`` alongside."""
    expected = z_covariance(cfg.n, cfg.theta, xs)
    limit = np.array([[float(k_covariance(float(x), float(y))) for y in xs] for x in xs])
    return covariance_diagnostic(values, expected, cfg, [f"{x:g}" for x in xs], limit, stream=len(xs))


def _exact_theta(theta: float) -> Fraction:
    return Fraction(theta).limit_denominator(10**6)


def exact_dashed_moments(pattern: BivincularPattern, n: int, theta: float) -> dict[str, Fraction]:
    """Exact mean and variance of the occurrence count on ``S_n`` by enumeration."""
    law = exact_distribution(lambda sigma: count_dashed(sigma, pattern), n, _exact_theta(theta))
    mean = sum((weight * value for value, weight in law.items()), Fraction(0))
    second = sum((weight * Fraction(value) ** 2 for value, weight in law.items()), Fraction(0))
    return {"mean": mean, "variance": second - mean**2}


@dataclass(frozen=True)
class GridPoint:
    n: int
    mean: float
    mean_se: float
    scaled_variance: float
    scaled_variance_se: float

    def to_json(self) -> dict:
        return {
            "N": self.n,
            "normalised_mean": self.mean,
            "normalised_mean_se": self.mean_se,
            "scaled_variance": self.scaled_variance,
            "scaled_variance_se": self.scaled_variance_se,
        }


@dataclass(frozen=True)
class PatternVarianceReport:
    pattern: BivincularPattern
    grid: list[GridPoint]
    mean_fit: InverseNFit
    mean_limit: Fraction
    mean_pass: bool
    variance_fit: InverseNFit
    positive: bool
    positivity_multiple: float
    exact: list[dict]
    gaussian: Optional[GaussianGridReport] = None

    @property
    def verdict(self) -> bool:
        gaussian = self.gaussian is None or self.gaussian.verdict is not False
        return self.mean_pass and self.positive and gaussian

    def to_json(self) -> dict:
        return {
            "pattern": self.pattern.to_json(),
            "grid": [point.to_json() for point in self.grid],
            "mean_fit": self.mean_fit.to_json(),
            "mean_limit": self.mean_limit,
            "mean_pass": self.mean_pass,
            "V": self.variance_fit.intercept,
            "V_se": self.variance_fit.intercept_se,
            "variance_fit": self.variance_fit.to_json(),
            "positive": self.positive,
            "positivity_multiple": self.positivity_multiple,
            "exact": self.exact,
            "gaussian": self.gaussian.to_json() if self.gaussian is not None else None,
        }


def estimate_V(
    pattern: BivincularPattern,
    n_grid: Sequence[int],
    cfg: RunConfig,
    exact_max_n: int = 7,
    positivity_multiple: float = 5.0,
    gaussian: bool = False,
) -> PatternVarianceReport:
    """Estimate the limiting variance ``V`` of a dashed pattern count.

    At every grid size the normalised mean ``O / N ** (p - q)`` and the scaled
    variance ``N ** (1 - 2 (p - q)) Var(O)`` are estimated; both are then
    extrapolated with ``value + c / N``. Exact moments for small ``N`` come
    from enumeration.
    """
    if len(n_grid) < 3:
        raise ParameterError(f"estimating V needs at least 3 grid sizes, got {len(n_grid)}")
    exponent = pattern.p - pattern.q
    points = []
    for index, n in enumerate(sorted(n_grid)):
        logger.info("Sampling %s at N = %d.", pattern, n)
        sized = cfg.with_size(n)
        counts = sample_statistic(DashedStatistic(pattern), sized).astype(np.float64)
        estimates = cumulant_estimates(counts, 2, cfg.bootstrap_resamples, cfg.bootstrap_stream(index))
        mean_scale = float(n) ** -exponent
        variance_scale = float(n) ** (1 - 2 * exponent)
        points.append(
            GridPoint(
                n,
                estimates[0].estimate * mean_scale,
                estimates[0].se * mean_scale,
                estimates[1].estimate * variance_scale,
                estimates[1].se * variance_scale,
            )
        )
    sizes = [point.n for point in points]
    mean_fit = fit_inverse_n(sizes, [p.mean for p in points], [p.mean_se for p in points])
    limit = dashed_mean(pattern.p, pattern.q)
    mean_pass = abs(mean_fit.intercept - float(limit)) <= cfg.se_multiple * mean_fit.intercept_se
    variance_fit = fit_inverse_n(
        sizes, [p.scaled_variance for p in points], [p.scaled_variance_se for p in points]
    )
    positive = variance_fit.intercept > positivity_multiple * variance_fit.intercept_se
    exact = []
    for n in range(pattern.p, exact_max_n + 1):
        moments = exact_dashed_moments(pattern, n, cfg.theta)
        exact.append(
            {
                "N": n,
                "mean": moments["mean"],
                "variance": moments["variance"],
                "scaled_variance": moments["variance"] * Fraction(n) ** (1 - 2 * exponent),
            }
        )
    grid_report = None
    if gaussian:
        grid_report = gaussian_grid_diagnostic(
            lambda size: DashedZStatistic(pattern, size), sizes, cfg
        )
    return PatternVarianceReport(
        pattern,
        points,
        mean_fit,
        limit,
        mean_pass,
        variance_fit,
        positive,
        positivity_multiple,
        exact,
        grid_report,
    )
