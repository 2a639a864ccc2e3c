import csv
import io
import json
import math

import pytest

from geomrand.gamma import GammaParams, distance_bound
from geomrand.harness import ExperimentConfig, reference_distribution, run_experiment
from geomrand.report import (
    SchemaError,
    axis,
    emit_surface,
    parse_reference,
    parse_report,
    serialize_reference,
    serialize_report,
    write_records_csv,
)
from geomrand.specfn import trigamma as psi1

REF = GammaParams(511.0, 1.0)


@pytest.fixture(scope="module")
def report():
    cfg = ExperimentConfig(replicates=20)
    return run_experiment(cfg, reference=reference_distribution(cfg, 100))


def test_report_round_trip(report):
    text = serialize_report(report)
    back = parse_report(text)
    assert back == report
    assert serialize_report(back, timestamp=False) == serialize_report(report, timestamp=False)


def test_full_precision(report):
    doc = json.loads(serialize_report(report, timestamp=False))
    assert doc["generated_at"] is None
    for rec, mem in zip(doc["records"], report.records):
        assert rec["kappa_hat"] == mem.kappa_hat
        assert float(f"{mem.kappa_hat:.17g}") == rec["kappa_hat"]
    assert doc["schema_version"] == "geomrand.report/1"
    assert doc["reference"]["distance_quantiles"]["0.99"] == report.reference.distance_quantiles[0.99]


def test_reference_round_trip(report):
    ref = report.reference
    assert parse_reference(serialize_reference(ref)) == ref


def test_schema_errors(report):
    doc = json.loads(serialize_report(report))
    doc["schema_version"] = "geomrand.report/0"
    with pytest.raises(SchemaError):
        parse_report(json.dumps(doc))
    with pytest.raises(SchemaError):
        parse_reference(serialize_report(report))


def test_records_csv(report):
    buf = io.StringIO()
    write_records_csv(report, buf)
    rows = list(csv.DictReader(io.StringIO(buf.getvalue())))
    assert len(rows) == len(report.records)
    assert float(rows[0]["kappa_hat"]) == report.records[0].kappa_hat


def test_axis_exact_nodes():
    mus = axis(350.0, 700.0, 351)
    assert mus[161] == 511.0 and mus[-1] == 700.0 and len(mus) == 351
    ks = axis(0.5, 2.0, 31)
    assert ks[10] == 1.0
    with pytest.raises(ValueError):
        axis(1.0, 2.0, 1)
    with pytest.raises(ValueError):
        axis(0.0, 2.0, 3)


def _rows(text):
    reader = csv.reader(io.StringIO(text))
    assert next(reader) == ["mu", "kappa", "height"]
    return [tuple(map(float, r)) for r in reader]


def test_surface_shape_and_values():
    rows = _rows(emit_surface(REF, (350.0, 700.0), (0.5, 2.0), (351, 31)))
    assert len(rows) == 351 * 31
    heights = {(m, k): h for m, k, h in rows}
    assert heights[(511.0, 1.0)] == 0.0
    for mu in (350.0, 420.0, 700.0):
        assert heights[(mu, 1.0)] == pytest.approx(abs(math.log(511 / mu)), abs=1e-12)
    for m, k, h in rows[::97]:
        expected = abs(psi1(1.0) - psi1(k)) + abs(math.log(m / 511.0))
        assert h == pytest.approx(expected, abs=1e-12)


def test_surface_monotone_in_kappa():
    rows = _rows(emit_surface(REF, (400.0, 600.0), (0.5, 2.0), (3, 31)))
    for mu in (400.0, 500.0, 600.0):
        line = [(k, h) for m, k, h in rows if m == mu]
        above = [h for k, h in line if k >= 1.0]
        below = [h for k, h in reversed(line) if k <= 1.0]
        assert all(b > a for a, b in zip(above, above[1:]))
        assert all(b > a for a, b in zip(below, below[1:]))


def test_surface_scatter_and_arclength():
    pts = [GammaParams(500.0, 1.2), GammaParams(530.0, 0.9)]
    rows = _rows(emit_surface(REF, (350.0, 700.0), (0.5, 2.0), (4, 3), scatter=pts))
    assert len(rows) == 12 + 2
    assert rows[-1][2] == distance_bound(REF, pts[1])
    arc = _rows(emit_surface(REF, (350.0, 700.0), (0.5, 2.0), (4, 3), which="arclength"))
    eq5 = _rows(emit_surface(REF, (350.0, 700.0), (0.5, 2.0), (4, 3)))
    assert all(a[2] <= b[2] + 1e-12 for a, b in zip(arc, eq5))
    with pytest.raises(ValueError):
        emit_surface(REF, (350.0, 700.0), (0.5, 2.0), (4, 3), which="nope")


def test_surface_writes_to_handle():
    buf = io.StringIO()
    assert emit_surface(REF, (350.0, 700.0), (0.5, 2.0), (2, 2), out=buf) is None
    assert buf.getvalue().count("\n") == 5
