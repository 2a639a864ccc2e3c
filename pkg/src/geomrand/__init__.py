"""Gamma-manifold spacing tests for pseudorandom number generators.

Separations between occurrences of a symbol in an ideal random stream are
(nearly) exponential, i.e. gamma with shape 1. Fitting a gamma density to
observed separations and measuring the distance of the fit from the
exponential curve in the Fisher geometry gives a randomness statistic.
"""

__version__ = "0.1.0"

from ._backend import BACKEND
from .gamma import (
    DegenerateSample,
    FitResult,
    GammaParams,
    MetricTensor,
    NonConvergence,
    SampleSummary,
    arc_length_distance,
    distance_bound,
    fit_mle,
    log_likelihood,
    metric_tensor,
    pdf,
    sample,
)
from .harness import (
    ExperimentConfig,
    ExperimentReport,
    ReferenceSummary,
    Verdict,
    reference_distribution,
    run_experiment,
    run_replicate,
    verdict,
)
from .sources import GeneratorKind, StreamFormat, StreamSpec, create_generator, open_stream
from .spacing import GapConvention, GapSeries, InsufficientOccurrences, extract_gaps, summarize
from .specfn import digamma, log_gamma, trigamma

__all__ = [
    "BACKEND",
    "DegenerateSample",
    "ExperimentConfig",
    "ExperimentReport",
    "FitResult",
    "GammaParams",
    "GapConvention",
    "GapSeries",
    "GeneratorKind",
    "InsufficientOccurrences",
    "MetricTensor",
    "NonConvergence",
    "ReferenceSummary",
    "SampleSummary",
    "StreamFormat",
    "StreamSpec",
    "Verdict",
    "arc_length_distance",
    "create_generator",
    "digamma",
    "distance_bound",
    "extract_gaps",
    "fit_mle",
    "log_gamma",
    "log_likelihood",
    "metric_tensor",
    "open_stream",
    "pdf",
    "reference_distribution",
    "run_experiment",
    "run_replicate",
    "sample",
    "summarize",
    "trigamma",
    "verdict",
]
