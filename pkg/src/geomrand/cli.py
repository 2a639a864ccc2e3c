"""Command-line interface.

Exit codes: 0 success or verdict pass/inconclusive, 1 verdict fail,
2 usage or configuration error, 3 I/O or data error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .gamma import DegenerateSample, GammaParams, arc_length_distance, distance_bound, fit_mle
from .harness import (
    AllReplicatesSkipped,
    ExperimentConfig,
    ReferenceMismatch,
    Verdict,
    reference_distribution,
    run_experiment,
)
from .report import (
    SchemaError,
    emit_surface,
    load_reference,
    parse_report,
    serialize_reference,
    serialize_report,
    write_records_csv,
)
from .sources import GeneratorKind, SourceError, StreamFormat, StreamSpec, open_stream
from .spacing import GapConvention, InsufficientOccurrences, summarize

log = logging.getLogger("geomrand")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_DATA = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return v


def _experiment_flags(p: argparse.ArgumentParser, replicates_default: int | None = 500) -> None:
    p.add_argument("--length", type=int, default=100_000, help="symbols per replicate")
    p.add_argument("--alphabet", type=int, default=512, help="alphabet size (p = 1/alphabet)")
    p.add_argument("--target", type=int, default=0, help="symbol whose separations are measured")
    p.add_argument("--replicates", type=int, default=replicates_default)
    p.add_argument("--seed", type=int, default=42, help="master seed")
    p.add_argument("--convention", choices=[c.value for c in GapConvention],
                   default=GapConvention.INDEX_DIFFERENCE.value)
    p.add_argument("--reference-mu", type=_positive_float, default=None,
                   help="reference mean (default: alphabet size, i.e. 1/p)")
    p.add_argument("--reference-kappa", type=_positive_float, default=1.0)
    p.add_argument("--no-arclength", action="store_true",
                   help="skip the arc-length distance per replicate")


def _report_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--reference-file", type=Path, default=None,
                   help="calibration JSON from `calibrate`; enables the verdict")
    p.add_argument("--calibrate", type=int, default=None, metavar="TRIALS",
                   help="calibrate a gold64 reference in-process instead of loading one")
    p.add_argument("--out", type=Path, default=None, help="report JSON (default: stdout)")
    p.add_argument("--csv", type=Path, default=None, help="per-replicate CSV table")
    p.add_argument("--no-timestamp", action="store_true",
                   help="leave generated_at empty for byte-reproducible output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="geomrand",
        description="Test random sequences by the gamma-manifold distance of their spacing statistics.",
    )
    parser.add_argument("--version", action="version", version=f"geomrand {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run the experiment with a built-in generator")
    _experiment_flags(p)
    p.add_argument("--generator", choices=[k.value for k in GeneratorKind if k is not GeneratorKind.EXTERNAL],
                   default=GeneratorKind.GOLD64.value)
    _report_flags(p)

    p = sub.add_parser("test", help="run the experiment on an external symbol stream")
    p.add_argument("input", help="stream file, or - for standard input")
    p.add_argument("--format", choices=[f.value for f in StreamFormat], default=StreamFormat.ASCII.value)
    _experiment_flags(p, replicates_default=None)
    _report_flags(p)

    p = sub.add_parser("fit", help="fit a gamma density to whitespace-separated positive numbers")
    p.add_argument("data", help="data file, or - for standard input")

    p = sub.add_parser("distance", help="distance functionals between two (mu, kappa) points")
    p.add_argument("--from", dest="origin", nargs=2, type=_positive_float, required=True,
                   metavar=("MU", "KAPPA"))
    p.add_argument("--to", dest="target", nargs=2, type=_positive_float, required=True,
                   metavar=("MU", "KAPPA"))

    p = sub.add_parser("surface", help="distance surface CSV (mu,kappa,height)")
    p.add_argument("--reference-mu", type=_positive_float, default=511.0)
    p.add_argument("--reference-kappa", type=_positive_float, default=1.0)
    p.add_argument("--mu-range", nargs=2, type=_positive_float, default=[350.0, 700.0])
    p.add_argument("--kappa-range", nargs=2, type=_positive_float, default=[0.5, 2.0])
    p.add_argument("--grid", nargs=2, type=int, default=[351, 31], metavar=("N_MU", "N_KAPPA"))
    p.add_argument("--which", choices=["eq5", "arclength"], default="eq5")
    p.add_argument("--scatter", type=Path, default=None,
                   help="report JSON whose fitted points are appended as rows")
    p.add_argument("--out", type=Path, default=None)

    p = sub.add_parser("calibrate", help="gold64 reference distribution for the verdict")
    _experiment_flags(p, replicates_default=None)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--out", type=Path, default=None)
    p.add_argument("--no-timestamp", action="store_true")
    return parser


def _config(args, generator) -> ExperimentConfig:
    reference = None
    if args.reference_mu is not None or args.reference_kappa != 1.0:
        mu = args.reference_mu if args.reference_mu is not None else float(args.alphabet)
        reference = GammaParams(mu, args.reference_kappa)
    return ExperimentConfig(
        sequence_length=args.length,
        alphabet_size=args.alphabet,
        target=args.target,
        replicates=args.replicates if args.replicates is not None else 1,
        master_seed=args.seed,
        convention=GapConvention(args.convention),
        reference=reference,
        generator=generator,
        arclength=not args.no_arclength,
    )


def _write(text: str, path: Path | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text)


def _run_and_report(args, config: ExperimentConfig) -> int:
    reference = None
    if args.reference_file is not None and args.calibrate is not None:
        raise UsageError("use either --reference-file or --calibrate, not both")
    if args.reference_file is not None:
        reference = load_reference(args.reference_file)
    elif args.calibrate is not None:
        reference = reference_distribution(config, args.calibrate)
    report = run_experiment(config, reference=reference)
    _write(serialize_report(report, timestamp=not args.no_timestamp), args.out)
    if args.csv is not None:
        with open(args.csv, "w", newline="") as fh:
            write_records_csv(report, fh)
    agg = report.aggregates
    print(
        f"replicates={len(report.records)} skipped={len(report.skipped)} "
        f"kappa_hat=[{agg['kappa_hat']['min']:.4g}, {agg['kappa_hat']['max']:.4g}] "
        f"mu_hat=[{agg['mu_hat']['min']:.4g}, {agg['mu_hat']['max']:.4g}] "
        f"verdict={report.verdict.value}",
        file=sys.stderr,
    )
    return EXIT_FAIL if report.verdict is Verdict.FAIL else EXIT_OK


def cmd_simulate(args) -> int:
    return _run_and_report(args, _config(args, GeneratorKind(args.generator)))


def cmd_test(args) -> int:
    spec = StreamSpec(args.input, StreamFormat(args.format), args.alphabet)
    if args.replicates is None:
        # every complete segment of the stream
        stream_len = open_stream(spec).size
        args.replicates = stream_len // args.length
        if args.replicates < 1:
            raise InsufficientOccurrences(
                f"stream holds {stream_len} symbols, less than one segment of {args.length}"
            )
    return _run_and_report(args, _config(args, spec))


def _read_numbers(source: str) -> np.ndarray:
    text = sys.stdin.read() if source == "-" else Path(source).read_text()
    try:
        values = np.array([float(tok) for tok in text.split()], dtype=np.float64)
    except ValueError as exc:
        raise SourceError(f"malformed number in {source}: {exc}") from None
    if values.size == 0 or np.any(values <= 0) or not np.all(np.isfinite(values)):
        raise SourceError(f"{source}: data must be finite positive numbers")
    return values


def cmd_fit(args) -> int:
    values = _read_numbers(args.data)
    summary = summarize(values)
    fit = fit_mle(summary)
    print(f"n={summary.n}")
    print(f"mean={summary.mean!r}")
    print(f"mean_log={summary.mean_log!r}")
    print(f"s_stat={summary.s_stat!r}")
    print(f"mu_hat={fit.params.mu!r}")
    print(f"kappa_hat={fit.params.kappa!r}")
    print(f"iterations={fit.iterations}")
    print(f"residual={fit.residual!r}")
    return EXIT_OK


def cmd_distance(args) -> int:
    a = GammaParams(*args.origin)
    b = GammaParams(*args.target)
    print(f"eq5={distance_bound(a, b)!r}")
    print(f"arclength={arc_length_distance(a, b)!r}")
    return EXIT_OK


def cmd_surface(args) -> int:
    scatter = []
    if args.scatter is not None:
        report = parse_report(args.scatter.read_text())
        scatter = [GammaParams(r.mu_hat, r.kappa_hat) for r in report.records]
    ref = GammaParams(args.reference_mu, args.reference_kappa)
    kwargs = dict(reference=ref, mu_range=tuple(args.mu_range), kappa_range=tuple(args.kappa_range),
                  grid=tuple(args.grid), which=args.which, scatter=scatter)
    if args.out is None:
        emit_surface(out=sys.stdout, **kwargs)
    else:
        with open(args.out, "w", newline="") as fh:
            emit_surface(out=fh, **kwargs)
    return EXIT_OK


def cmd_calibrate(args) -> int:
    args.replicates = args.trials
    config = _config(args, GeneratorKind.GOLD64)
    ref = reference_distribution(config, args.trials)
    _write(serialize_reference(ref, timestamp=not args.no_timestamp), args.out)
    lo, hi = ref.kappa_envelope[0.999]
    print(
        f"trials={ref.trials} used={ref.used} kappa_median={ref.kappa_median:.4f} "
        f"kappa_99.9%=[{lo:.4f}, {hi:.4f}] eq5_q99={ref.distance_quantiles[0.99]:.4f}",
        file=sys.stderr,
    )
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "test": cmd_test,
    "fit": cmd_fit,
    "distance": cmd_distance,
    "surface": cmd_surface,
    "calibrate": cmd_calibrate,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (OSError, SourceError, InsufficientOccurrences, DegenerateSample,
            AllReplicatesSkipped, SchemaError, json.JSONDecodeError, KeyError) as exc:
        print(f"geomrand: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (UsageError, ReferenceMismatch, ValueError) as exc:
        print(f"geomrand: configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
