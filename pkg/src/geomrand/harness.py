"""Replicated spacing experiments and the calibrated pass/fail rule.

One replicate draws (or reads) a sequence, takes the separations of the
target symbol, fits a gamma density by maximum likelihood and measures how
far the fit lies from the reference point on the exponential curve.
"""

from __future__ import annotations

import enum
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from ._backend import BACKEND
from .gamma import (
    DegenerateSample,
    GammaParams,
    arc_length_distance,
    distance_bound,
    fit_mle,
)
from .sources import (
    GeneratorHandle,
    GeneratorKind,
    StreamExhausted,
    StreamSpec,
    create_generator,
    derive_seed,
    open_stream,
)
from .spacing import GapConvention, InsufficientOccurrences, gaps_from_positions, summarize

log = logging.getLogger(__name__)

__all__ = [
    "ExperimentConfig",
    "ReplicateRecord",
    "SkippedReplicate",
    "ExperimentReport",
    "ReferenceSummary",
    "Verdict",
    "ReferenceMismatch",
    "AllReplicatesSkipped",
    "run_replicate",
    "run_experiment",
    "aggregate",
    "reference_distribution",
    "verdict",
    "thread_count",
]

DEFAULT_SEED = 42
CALIBRATION_SALT = 0xC0FFEE
QUANTILE_LEVELS = (0.5, 0.9, 0.99, 0.999)
REPORT_QUANTILES = (0.5, 0.9, 0.99)


class Verdict(str, enum.Enum):
    PASS = "pass"
    FAIL = "fail"
    INCONCLUSIVE = "inconclusive"


class ReferenceMismatch(ValueError):
    """A calibration was computed for a different experiment setup."""


class AllReplicatesSkipped(RuntimeError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    sequence_length: int = 100_000
    alphabet_size: int = 512
    target: int = 0
    replicates: int = 500
    master_seed: int = DEFAULT_SEED
    convention: GapConvention = GapConvention.INDEX_DIFFERENCE
    reference: GammaParams | None = None
    generator: GeneratorKind | StreamSpec = GeneratorKind.GOLD64
    arclength: bool = True

    def __post_init__(self):
        object.__setattr__(self, "convention", GapConvention(self.convention))
        if not isinstance(self.generator, StreamSpec):
            object.__setattr__(self, "generator", GeneratorKind(self.generator))
            if self.generator is GeneratorKind.EXTERNAL:
                raise ValueError("external input is configured with a StreamSpec")
        if self.alphabet_size < 2:
            raise ValueError("alphabet_size must be at least 2")
        if self.sequence_length < self.alphabet_size:
            raise ValueError(
                f"sequence_length {self.sequence_length} < alphabet_size {self.alphabet_size}: "
                "fewer than one expected occurrence"
            )
        if self.replicates < 1:
            raise ValueError("replicates must be at least 1")
        if not 0 <= self.target < self.alphabet_size:
            raise ValueError(f"target {self.target} outside [0, {self.alphabet_size})")
        if not 0 <= self.master_seed < 1 << 64:
            raise ValueError("master_seed must fit in 64 unsigned bits")

    @property
    def abundance(self) -> float:
        return 1.0 / self.alphabet_size

    @property
    def reference_point(self) -> GammaParams:
        """Explicit reference, else the ideal mean separation ``1/p`` on the exponential curve."""
        if self.reference is not None:
            return self.reference
        return GammaParams(float(self.alphabet_size), 1.0)

    @property
    def external(self) -> bool:
        return isinstance(self.generator, StreamSpec)

    @property
    def generator_name(self) -> str:
        return GeneratorKind.EXTERNAL.value if self.external else self.generator.value


@dataclass(frozen=True)
class ReplicateRecord:
    index: int
    seed: int | None
    mu_hat: float
    kappa_hat: float
    n_gaps: int
    distance_eq5: float
    distance_arclength: float | None
    iterations: int = 0


@dataclass(frozen=True)
class SkippedReplicate:
    index: int
    seed: int | None
    reason: str


@dataclass(frozen=True)
class ReferenceSummary:
    """Null distribution of the fit statistics under the gold generator."""

    trials: int
    used: int
    master_seed: int
    sequence_length: int
    alphabet_size: int
    convention: GapConvention
    reference: GammaParams
    kappa_median: float
    # central interval of kappa-hat holding the given probability mass
    kappa_envelope: dict[float, tuple[float, float]]
    distance_quantiles: dict[float, float]

    def __post_init__(self):
        object.__setattr__(self, "convention", GapConvention(self.convention))

    def check_compatible(self, config: ExperimentConfig) -> None:
        mine = (self.sequence_length, self.alphabet_size, self.convention, self.reference)
        theirs = (config.sequence_length, config.alphabet_size, config.convention,
                  config.reference_point)
        if mine != theirs:
            raise ReferenceMismatch(
                "reference calibrated for (length, alphabet, convention, reference) = "
                f"{mine}, experiment uses {theirs}"
            )


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    records: list[ReplicateRecord]
    skipped: list[SkippedReplicate]
    aggregates: dict
    verdict: Verdict = Verdict.INCONCLUSIVE
    reference: ReferenceSummary | None = None
    backend: str = field(default="", compare=False)

    @property
    def kappas(self) -> np.ndarray:
        return np.array([r.kappa_hat for r in self.records])

    @property
    def mus(self) -> np.ndarray:
        return np.array([r.mu_hat for r in self.records])


def thread_count() -> int:
    """Worker threads for replicates: ``GEOMRAND_THREADS`` if set, else the CPU count."""
    env = os.environ.get("GEOMRAND_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ValueError(f"GEOMRAND_THREADS must be an integer, got {env!r}") from None
        return max(1, n)
    return max(1, os.cpu_count() or 1)


def _replicate_positions(config: ExperimentConfig, index: int,
                         stream: np.ndarray | None) -> tuple[np.ndarray, int | None, GeneratorHandle | None]:
    if config.external:
        if stream is None:
            stream = open_stream(config.generator)
        handle = GeneratorHandle(GeneratorKind.EXTERNAL, stream=stream)
        handle.skip(index * config.sequence_length)
        positions = handle.target_positions(config.alphabet_size, config.target,
                                            config.sequence_length)
        jitter_seed = derive_seed(config.master_seed, index)
        jitter = create_generator(GeneratorKind.GOLD64, jitter_seed)
        return positions, None, jitter
    seed = derive_seed(config.master_seed, index)
    handle = create_generator(config.generator, seed)
    positions = handle.target_positions(config.alphabet_size, config.target,
                                        config.sequence_length)
    return positions, seed, handle


def run_replicate(config: ExperimentConfig, index: int,
                  stream: np.ndarray | None = None) -> ReplicateRecord | SkippedReplicate:
    """Run replicate ``index``.

    Built-in generators are seeded with ``derive_seed(master_seed, index)``;
    external input uses the ``index``-th segment of ``sequence_length``
    symbols. Too few occurrences or a degenerate fit give a
    :class:`SkippedReplicate` instead of an exception.
    """
    if not 0 <= index < config.replicates:
        raise IndexError(f"replicate {index} outside [0, {config.replicates})")
    positions, seed, handle = _replicate_positions(config, index, stream)
    try:
        jitter = handle if config.convention is GapConvention.EXCLUSIVE_JITTERED else None
        series = gaps_from_positions(positions, config.sequence_length, config.convention, jitter)
        summary = summarize(series)
        fit = fit_mle(summary)
    except InsufficientOccurrences as exc:
        return SkippedReplicate(index, seed, f"insufficient-occurrences: {exc}")
    except DegenerateSample as exc:
        return SkippedReplicate(index, seed, f"degenerate-sample: {exc}")
    ref = config.reference_point
    arc = arc_length_distance(ref, fit.params) if config.arclength else None
    return ReplicateRecord(
        index=index,
        seed=seed,
        mu_hat=fit.params.mu,
        kappa_hat=fit.params.kappa,
        n_gaps=summary.n,
        distance_eq5=distance_bound(ref, fit.params),
        distance_arclength=arc,
        iterations=fit.iterations,
    )


def _stats(values: np.ndarray) -> dict:
    return {
        "min": float(np.min(values)),
        "max": float(np.max(values)),
        "mean": float(np.mean(values)),
        "median": float(np.median(values)),
        "std": float(np.std(values, ddof=1)) if values.size > 1 else 0.0,
    }


def _quantiles(values: np.ndarray, levels: Sequence[float]) -> dict[float, float]:
    return {q: float(np.quantile(values, q)) for q in levels}


def aggregate(records: Sequence[ReplicateRecord]) -> dict:
    """Summary statistics over records; independent of record order."""
    ordered = sorted(records, key=lambda r: r.index)
    mus = np.array([r.mu_hat for r in ordered])
    kappas = np.array([r.kappa_hat for r in ordered])
    d5 = np.array([r.distance_eq5 for r in ordered])
    out = {
        "count": len(ordered),
        "mu_hat": _stats(mus),
        "kappa_hat": _stats(kappas),
        "distance_eq5": {**_stats(d5), "quantiles": _quantiles(d5, REPORT_QUANTILES)},
    }
    arcs = [r.distance_arclength for r in ordered if r.distance_arclength is not None]
    if arcs:
        arc = np.array(arcs)
        out["distance_arclength"] = {**_stats(arc), "quantiles": _quantiles(arc, REPORT_QUANTILES)}
    return out


def run_experiment(config: ExperimentConfig, reference: ReferenceSummary | None = None,
                   threads: int | None = None) -> ExperimentReport:
    """Run every replicate, aggregate, and judge against ``reference`` if given.

    Raises
    ------
    AllReplicatesSkipped
        No replicate produced a fit.
    """
    if reference is not None:
        reference.check_compatible(config)
    stream = None
    if config.external:
        stream = open_stream(config.generator)
        available = stream.size // config.sequence_length
        if available < config.replicates:
            raise StreamExhausted(
                f"stream has {stream.size} symbols: {available} segment(s) of "
                f"{config.sequence_length}, {config.replicates} requested"
            )
    threads = thread_count() if threads is None else max(1, threads)
    indices = range(config.replicates)
    if threads == 1 or config.replicates == 1:
        results = [run_replicate(config, i, stream) for i in indices]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda i: run_replicate(config, i, stream), indices))
    records = [r for r in results if isinstance(r, ReplicateRecord)]
    skipped = [r for r in results if isinstance(r, SkippedReplicate)]
    if not records:
        raise AllReplicatesSkipped(
            f"all {config.replicates} replicates skipped; first reason: {skipped[0].reason}"
        )
    if skipped:
        log.info("%d of %d replicates skipped", len(skipped), config.replicates)
    report = ExperimentReport(config, records, skipped, aggregate(records), backend=BACKEND)
    report.reference = reference
    report.verdict = verdict(records, reference)
    return report


def reference_distribution(config: ExperimentConfig, trials: int,
                           master_seed: int | None = None,
                           threads: int | None = None) -> ReferenceSummary:
    """Null distribution of kappa-hat and the distance bound under ``gold64``.

    The calibration seeds default to the config seed xor a fixed salt so a
    calibration never reuses the streams of the run it will judge.
    """
    if trials < 100:
        raise ValueError("calibration needs at least 100 trials")
    seed = (config.master_seed ^ CALIBRATION_SALT) if master_seed is None else master_seed
    cal = replace(config, generator=GeneratorKind.GOLD64, replicates=trials,
                  master_seed=seed, arclength=False)
    report = run_experiment(cal, threads=threads)
    kappas = report.kappas
    d5 = np.array([r.distance_eq5 for r in report.records])
    envelope = {
        c: (float(np.quantile(kappas, (1 - c) / 2)), float(np.quantile(kappas, (1 + c) / 2)))
        for c in QUANTILE_LEVELS
    }
    return ReferenceSummary(
        trials=trials,
        used=len(report.records),
        master_seed=seed,
        sequence_length=config.sequence_length,
        alphabet_size=config.alphabet_size,
        convention=config.convention,
        reference=config.reference_point,
        kappa_median=float(np.median(kappas)),
        kappa_envelope=envelope,
        distance_quantiles=_quantiles(d5, QUANTILE_LEVELS),
    )


def verdict(records: Sequence[ReplicateRecord], reference: ReferenceSummary | None) -> Verdict:
    """Fail when the median distance bound exceeds the reference 99% quantile, or
    more than 1% of kappa-hat values fall outside the reference 99.9% envelope."""
    if reference is None or not records:
        return Verdict.INCONCLUSIVE
    d5 = np.array([r.distance_eq5 for r in records])
    kappas = np.array([r.kappa_hat for r in records])
    if float(np.median(d5)) > reference.distance_quantiles[0.99]:
        return Verdict.FAIL
    lo, hi = reference.kappa_envelope[0.999]
    outside = np.count_nonzero((kappas < lo) | (kappas > hi)) / kappas.size
    if outside > 0.01:
        return Verdict.FAIL
    return Verdict.PASS
