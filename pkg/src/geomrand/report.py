"""JSON report/reference documents and CSV tables.

Floats are written with Python's shortest round-trip ``repr`` (at most 17
significant digits), so every value parses back to the identical double.
The only non-deterministic field is the ``generated_at`` header.

Report document (``schema_version = "geomrand.report/1"``)::

    {
      "schema_version": "geomrand.report/1",
      "tool": {"name": "geomrand", "version": "0.1.0"},
      "generated_at": "2026-01-01T00:00:00+00:00",
      "config": {sequence_length, alphabet_size, target, replicates, master_seed,
                 convention, reference: {mu, kappa}, generator, stream, arclength},
      "records": [{index, seed, mu_hat, kappa_hat, n_gaps, distance_eq5,
                   distance_arclength, iterations}, ...],
      "skipped": [{index, seed, reason}, ...],
      "aggregates": {count, mu_hat: {min, max, mean, median, std}, kappa_hat: {...},
                     distance_eq5: {..., quantiles: {"0.5": q, ...}},
                     distance_arclength: {...}},
      "reference": <reference summary or null>,
      "verdict": "pass" | "fail" | "inconclusive"
    }

Reference document (``schema_version = "geomrand.reference/1"``) carries the
same header plus ``"reference"``: {trials, used, master_seed, sequence_length,
alphabet_size, convention, reference: {mu, kappa}, kappa_median,
kappa_envelope: {"0.999": [lo, hi], ...}, distance_quantiles: {"0.99": q, ...}}.
"""

from __future__ import annotations

import csv
import datetime as _dt
import io
import json
from pathlib import Path
from typing import Iterable, Literal, TextIO

from . import __version__
from .gamma import GammaParams, arc_length_distance, distance_bound
from .harness import (
    ExperimentConfig,
    ExperimentReport,
    ReferenceSummary,
    ReplicateRecord,
    SkippedReplicate,
    Verdict,
)
from .sources import StreamSpec

REPORT_SCHEMA = "geomrand.report/1"
REFERENCE_SCHEMA = "geomrand.reference/1"


class SchemaError(ValueError):
    """Document is not a geomrand document of the expected schema version."""


def _header(schema: str, timestamp: bool) -> dict:
    head = {"schema_version": schema, "tool": {"name": "geomrand", "version": __version__}}
    head["generated_at"] = (
        _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds") if timestamp else None
    )
    return head


def _check_schema(doc: dict, schema: str) -> None:
    got = doc.get("schema_version") if isinstance(doc, dict) else None
    if got != schema:
        raise SchemaError(f"expected schema {schema!r}, found {got!r}")


def _params(p: GammaParams | None) -> dict | None:
    return None if p is None else {"mu": p.mu, "kappa": p.kappa}


def _unparams(d: dict | None) -> GammaParams | None:
    return None if d is None else GammaParams(d["mu"], d["kappa"])


def _qkeys(d: dict) -> dict:
    return {repr(float(k)): v for k, v in d.items()}


def _unqkeys(d: dict) -> dict:
    return {float(k): v for k, v in d.items()}


def config_to_dict(config: ExperimentConfig) -> dict:
    stream = None
    if config.external:
        spec = config.generator
        stream = {"origin": str(spec.origin), "format": spec.format.value,
                  "alphabet_size": spec.alphabet_size}
    return {
        "sequence_length": config.sequence_length,
        "alphabet_size": config.alphabet_size,
        "target": config.target,
        "replicates": config.replicates,
        "master_seed": config.master_seed,
        "convention": config.convention.value,
        "reference": _params(config.reference),
        "generator": config.generator_name,
        "stream": stream,
        "arclength": config.arclength,
    }


def config_from_dict(d: dict) -> ExperimentConfig:
    generator = d["generator"]
    if d.get("stream") is not None:
        s = d["stream"]
        generator = StreamSpec(s["origin"], s["format"], s["alphabet_size"])
    return ExperimentConfig(
        sequence_length=d["sequence_length"],
        alphabet_size=d["alphabet_size"],
        target=d["target"],
        replicates=d["replicates"],
        master_seed=d["master_seed"],
        convention=d["convention"],
        reference=_unparams(d["reference"]),
        generator=generator,
        arclength=d["arclength"],
    )


def reference_to_dict(ref: ReferenceSummary) -> dict:
    return {
        "trials": ref.trials,
        "used": ref.used,
        "master_seed": ref.master_seed,
        "sequence_length": ref.sequence_length,
        "alphabet_size": ref.alphabet_size,
        "convention": ref.convention.value,
        "reference": _params(ref.reference),
        "kappa_median": ref.kappa_median,
        "kappa_envelope": {k: list(v) for k, v in _qkeys(ref.kappa_envelope).items()},
        "distance_quantiles": _qkeys(ref.distance_quantiles),
    }


def reference_from_dict(d: dict) -> ReferenceSummary:
    return ReferenceSummary(
        trials=d["trials"],
        used=d["used"],
        master_seed=d["master_seed"],
        sequence_length=d["sequence_length"],
        alphabet_size=d["alphabet_size"],
        convention=d["convention"],
        reference=_unparams(d["reference"]),
        kappa_median=d["kappa_median"],
        kappa_envelope={k: tuple(v) for k, v in _unqkeys(d["kappa_envelope"]).items()},
        distance_quantiles=_unqkeys(d["distance_quantiles"]),
    )


def _aggregates_to_dict(agg: dict) -> dict:
    out = {}
    for key, val in agg.items():
        if isinstance(val, dict):
            val = {k: (_qkeys(v) if k == "quantiles" else v) for k, v in val.items()}
        out[key] = val
    return out


def _aggregates_from_dict(d: dict) -> dict:
    out = {}
    for key, val in d.items():
        if isinstance(val, dict):
            val = {k: (_unqkeys(v) if k == "quantiles" else v) for k, v in val.items()}
        out[key] = val
    return out


def report_to_dict(report: ExperimentReport, timestamp: bool = True) -> dict:
    doc = _header(REPORT_SCHEMA, timestamp)
    doc["config"] = config_to_dict(report.config)
    doc["records"] = [
        {
            "index": r.index,
            "seed": r.seed,
            "mu_hat": r.mu_hat,
            "kappa_hat": r.kappa_hat,
            "n_gaps": r.n_gaps,
            "distance_eq5": r.distance_eq5,
            "distance_arclength": r.distance_arclength,
            "iterations": r.iterations,
        }
        for r in report.records
    ]
    doc["skipped"] = [{"index": s.index, "seed": s.seed, "reason": s.reason} for s in report.skipped]
    doc["aggregates"] = _aggregates_to_dict(report.aggregates)
    doc["reference"] = None if report.reference is None else reference_to_dict(report.reference)
    doc["verdict"] = report.verdict.value
    return doc


def report_from_dict(doc: dict) -> ExperimentReport:
    _check_schema(doc, REPORT_SCHEMA)
    return ExperimentReport(
        config=config_from_dict(doc["config"]),
        records=[ReplicateRecord(**r) for r in doc["records"]],
        skipped=[SkippedReplicate(**s) for s in doc["skipped"]],
        aggregates=_aggregates_from_dict(doc["aggregates"]),
        verdict=Verdict(doc["verdict"]),
        reference=None if doc["reference"] is None else reference_from_dict(doc["reference"]),
    )


def serialize_report(report: ExperimentReport, timestamp: bool = True) -> str:
    return json.dumps(report_to_dict(report, timestamp), indent=2) + "\n"


def parse_report(text: str) -> ExperimentReport:
    return report_from_dict(json.loads(text))


def serialize_reference(ref: ReferenceSummary, timestamp: bool = True) -> str:
    doc = _header(REFERENCE_SCHEMA, timestamp)
    doc["reference"] = reference_to_dict(ref)
    return json.dumps(doc, indent=2) + "\n"


def parse_reference(text: str) -> ReferenceSummary:
    doc = json.loads(text)
    _check_schema(doc, REFERENCE_SCHEMA)
    return reference_from_dict(doc["reference"])


def load_reference(path: str | Path) -> ReferenceSummary:
    return parse_reference(Path(path).read_text())


def write_records_csv(report: ExperimentReport, fh: TextIO) -> None:
    """Per-replicate table: kappa-hat against replicate index, plus the other fit fields."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["index", "seed", "mu_hat", "kappa_hat", "n_gaps", "distance_eq5",
                "distance_arclength"])
    for r in report.records:
        w.writerow([r.index, "" if r.seed is None else r.seed, repr(r.mu_hat), repr(r.kappa_hat),
                    r.n_gaps, repr(r.distance_eq5),
                    "" if r.distance_arclength is None else repr(r.distance_arclength)])


def axis(lo: float, hi: float, n: int) -> list[float]:
    """``n`` evenly spaced values from ``lo`` to ``hi`` inclusive.

    Computed as ``lo + (i*(hi-lo))/(n-1)`` so grid nodes that are exactly
    representable (e.g. 511 on [350, 700] with 351 nodes) come out exact.
    """
    if n < 2:
        raise ValueError("grid needs at least 2 nodes per axis")
    if not (0 < lo < hi):
        raise ValueError(f"range must satisfy 0 < lo < hi, got ({lo}, {hi})")
    span = hi - lo
    return [lo + (i * span) / (n - 1) for i in range(n - 1)] + [hi]


def emit_surface(
    reference: GammaParams,
    mu_range: tuple[float, float],
    kappa_range: tuple[float, float],
    grid: tuple[int, int],
    which: Literal["eq5", "arclength"] = "eq5",
    out: TextIO | None = None,
    scatter: Iterable[GammaParams] = (),
) -> str | None:
    """Distance surface ``mu,kappa,height`` over a regular grid, mu-major.

    ``scatter`` points (e.g. fitted parameters from a report) are appended as
    extra rows with their own heights. Returns the CSV text when ``out`` is None.
    """
    if which == "eq5":
        height = distance_bound
    elif which == "arclength":
        height = arc_length_distance
    else:
        raise ValueError(f"unknown surface functional {which!r}")
    mus = axis(*mu_range, grid[0])
    kappas = axis(*kappa_range, grid[1])
    buf = out if out is not None else io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["mu", "kappa", "height"])
    for mu in mus:
        for k in kappas:
            w.writerow([repr(mu), repr(k), repr(height(reference, GammaParams(mu, k)))])
    for p in scatter:
        w.writerow([repr(p.mu), repr(p.kappa), repr(height(reference, p))])
    return buf.getvalue() if out is None else None
