"""The gamma manifold in mean/shape coordinates.

A point ``(mu, kappa)`` is the density

    f(x; mu, kappa) = (kappa/mu)**kappa * x**(kappa-1) * exp(-kappa*x/mu) / Gamma(kappa)

with mean ``mu`` and coefficient of variation ``1/sqrt(kappa)``. The Fisher
metric is diagonal in these coordinates, ``diag(kappa/mu**2, psi'(kappa) - 1/kappa)``,
and the exponential curve ``kappa = 1`` is the spacing law of a Poisson process.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable

import numpy as np

from .quadrature import adaptive_simpson
from .specfn import (
    log_gamma,
    log_minus_digamma,
    trigamma,
    trigamma_excess,
)

if TYPE_CHECKING:
    from .sources import GeneratorHandle

__all__ = [
    "GammaParams",
    "SampleSummary",
    "FitResult",
    "MetricTensor",
    "DegenerateSample",
    "NonConvergence",
    "summary_from_values",
    "pdf",
    "log_pdf",
    "log_likelihood",
    "fit_mle",
    "initial_shape_guess",
    "sample",
    "metric_tensor",
    "distance_bound",
    "arc_length_distance",
]

DEGENERATE_S = 1e-12
RESIDUAL_TOL = 1e-10
MAX_ITER = 200
QUAD_TOL = 1e-8


class DegenerateSample(ValueError):
    """The sample has (numerically) no spread, so the shape estimate diverges."""


class NonConvergence(RuntimeError):
    """The shape solver missed its residual target."""


@dataclass(frozen=True)
class GammaParams:
    """A point on the gamma manifold: mean ``mu`` and shape ``kappa``."""

    mu: float
    kappa: float

    def __post_init__(self):
        for name in ("mu", "kappa"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be finite and positive, got {v!r}")

    @property
    def cv(self) -> float:
        """Coefficient of variation, ``1/sqrt(kappa)``."""
        return 1.0 / math.sqrt(self.kappa)

    @property
    def scale(self) -> float:
        return self.mu / self.kappa


@dataclass(frozen=True)
class SampleSummary:
    """Sufficient statistics for a gamma fit.

    ``s_stat`` is ``log(mean) - mean_log``; by Jensen it is nonnegative and
    vanishes only for constant data.
    """

    n: int
    mean: float
    mean_log: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("summary needs at least one observation")
        if not (math.isfinite(self.mean) and self.mean > 0):
            raise ValueError(f"mean must be finite and positive, got {self.mean!r}")
        if not math.isfinite(self.mean_log):
            raise ValueError("mean_log must be finite")

    @property
    def s_stat(self) -> float:
        return math.log(self.mean) - self.mean_log


def summary_from_values(values: Iterable[float]) -> SampleSummary:
    x = np.asarray(list(values) if not isinstance(values, np.ndarray) else values,
                   dtype=np.float64)
    if x.size == 0:
        raise ValueError("no observations")
    if np.any(x <= 0) or not np.all(np.isfinite(x)):
        raise ValueError("observations must be finite and positive")
    return SampleSummary(n=int(x.size), mean=float(np.mean(x)), mean_log=float(np.mean(np.log(x))))


@dataclass(frozen=True)
class FitResult:
    params: GammaParams
    iterations: int
    residual: float
    summary: SampleSummary


@dataclass(frozen=True)
class MetricTensor:
    g_mumu: float
    g_kk: float

    @property
    def g_mu_kappa(self) -> float:
        return 0.0

    def as_matrix(self) -> np.ndarray:
        return np.array([[self.g_mumu, 0.0], [0.0, self.g_kk]])


def log_pdf(x: float, params: GammaParams) -> float:
    if x < 0:
        raise ValueError(f"gamma density is supported on x >= 0, got {x!r}")
    mu, k = params.mu, params.kappa
    if x == 0:
        if k == 1.0:
            return -math.log(mu)
        return -math.inf if k > 1.0 else math.inf
    return k * math.log(k / mu) - log_gamma(k) + (k - 1.0) * math.log(x) - k * x / mu


def pdf(x: float, params: GammaParams) -> float:
    """Gamma density at ``x``, evaluated as ``exp(log_pdf)``."""
    return math.exp(log_pdf(x, params))


def log_likelihood(summary: SampleSummary, params: GammaParams) -> float:
    """Log-likelihood of the summarized sample, ``sum(log f(X_i))``."""
    mu, k = params.mu, params.kappa
    per_obs = (
        k * math.log(k / mu)
        - log_gamma(k)
        + (k - 1.0) * summary.mean_log
        - k * summary.mean / mu
    )
    return summary.n * per_obs


def initial_shape_guess(s: float) -> float:
    """Closed-form approximation to the root of ``log k - psi(k) = s``."""
    return (3.0 - s + math.sqrt((s - 3.0) ** 2 + 24.0 * s)) / (12.0 * s)


def fit_mle(summary: SampleSummary) -> FitResult:
    """Maximum-likelihood gamma fit.

    The mean estimate is the sample mean. The shape solves
    ``log k - psi(k) = s_stat`` by Newton's method on the decreasing convex
    function ``h(k) = log k - psi(k)``, kept inside the bracket
    ``(1/(2s), 1/s)`` that ``1/(2k) < h(k) < 1/k`` guarantees.

    Raises
    ------
    DegenerateSample
        Fewer than two observations, or ``s_stat`` below 1e-12.
    NonConvergence
        Residual above 1e-10 after 200 iterations.
    """
    if summary.n < 2:
        raise DegenerateSample("need at least two observations to fit a shape")
    s = summary.s_stat
    if not s > DEGENERATE_S:
        raise DegenerateSample(f"s_stat={s!r} is below {DEGENERATE_S}; observations are all equal")

    lo, hi = 0.5 / s, 1.0 / s
    k = min(max(initial_shape_guess(s), lo), hi)
    f = log_minus_digamma(k) - s
    iterations = 0
    while iterations < MAX_ITER:
        iterations += 1
        if f > 0:
            lo = k
        elif f < 0:
            hi = k
        else:
            break
        step = f / trigamma_excess(k)  # h'(k) = -(psi'(k) - 1/k)
        k_new = k + step
        if not lo < k_new < hi:
            k_new = math.sqrt(lo * hi)
        if abs(k_new - k) <= 4e-16 * k:
            k = k_new
            f = log_minus_digamma(k) - s
            break
        k = k_new
        f = log_minus_digamma(k) - s
    residual = abs(f)
    if residual > RESIDUAL_TOL:
        raise NonConvergence(
            f"shape solver stopped at k={k!r} with residual {residual:.3e} after {iterations} iterations"
        )
    return FitResult(GammaParams(summary.mean, k), iterations, residual, summary)


def sample(params: GammaParams, n: int, rng: "GeneratorHandle") -> np.ndarray:
    """``n`` independent draws from the gamma density, advancing ``rng``."""
    if n < 1:
        raise ValueError("n must be positive")
    return rng.standard_gamma(params.kappa, n) * params.scale


def metric_tensor(params: GammaParams) -> MetricTensor:
    return MetricTensor(params.kappa / params.mu**2, trigamma_excess(params.kappa))


def distance_bound(origin: GammaParams, target: GammaParams) -> float:
    """Coordinate-mesh distance bound: ``|psi'(k2) - psi'(k1)| + |log(mu1/mu2)|``."""
    # difference of logs rather than log of the ratio keeps the result exactly symmetric
    return abs(trigamma(target.kappa) - trigamma(origin.kappa)) + abs(
        math.log(origin.mu) - math.log(target.mu)
    )


def _shape_speed(k: float) -> float:
    return math.sqrt(trigamma_excess(k))


def arc_length_distance(origin: GammaParams, target: GammaParams) -> float:
    """Length of the L-shaped path: along ``kappa`` at the origin mean, then along ``mu``.

    The shape leg has ``ds = sqrt(psi'(kappa) - 1/kappa) dkappa`` (integrated
    adaptively); the mean leg runs at the target shape, where
    ``ds = sqrt(kappa) |d log mu|``.
    Any path length bounds the geodesic distance from above.
    """
    mu_leg = math.sqrt(target.kappa) * abs(math.log(origin.mu) - math.log(target.mu))
    if origin.kappa == target.kappa:
        return mu_leg
    k_leg = adaptive_simpson(_shape_speed, min(origin.kappa, target.kappa),
                             max(origin.kappa, target.kappa), QUAD_TOL)
    return mu_leg + k_leg
