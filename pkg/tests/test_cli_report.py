import csv
import io
import json
import math

import pytest

from spincurv import cli_report as cr
from spincurv import spacetimes as st
from spincurv.errors import ConfigurationError, UsageError

from conftest import DATA


@pytest.fixture(scope="module")
def flat_report():
    return cr.run_suite("catalog:minkowski", "all", "both")


@pytest.fixture(scope="module")
def bad_report():
    return cr.run_suite(st.load_scenario(str(DATA / "schwarzschild_perturbed.json")), "curvature", "epsilon")


def test_minkowski_all_pass(flat_report):
    assert flat_report.passed
    modules = {c.module for c in flat_report.checks}
    assert modules == set(cr.SUITES)
    assert all(c.paper_ref for c in flat_report.checks)


def test_schwarzschild_curvature_has_reconstruction():
    rep = cr.run_suite("catalog:schwarzschild", "curvature", "both")
    ids = {c.check_id for c in rep.checks}
    assert "curvature.riemann_roundtrip[gamma]" in ids
    assert "curvature.riemann_roundtrip[epsilon]" in ids
    assert rep.passed


def test_perturbed_scenario_fails_only_einstein(bad_report):
    failed = {c.check_id for c in bad_report.failures()}
    assert failed == {"curvature.trace_free_ricci[epsilon]", "curvature.cosmological[epsilon]"}
    # still a complete, serialisable report
    assert cr.from_json(cr.to_json(bad_report)).to_dict() == bad_report.to_dict()


def test_json_round_trip(flat_report):
    back = cr.from_json(cr.to_json(flat_report))
    assert back == flat_report
    d = json.loads(cr.to_json(flat_report))
    assert set(d) == {"scenario", "suite", "formalisms", "passed", "fingerprint", "checks"}
    assert set(d["fingerprint"]) == {"seed", "probe_count", "tolerance_scale", "tolerance_table", "version"}


def test_json_is_byte_identical():
    a = cr.to_json(cr.run_suite("catalog:coulomb_flat", "gauge", "both"))
    b = cr.to_json(cr.run_suite("catalog:coulomb_flat", "gauge", "both"))
    assert a == b


def test_non_finite_values_survive_json():
    c = cr.CheckResult("x.y[gamma]", "x", "tag", "gamma", float("nan"), 1e-9, False, error="boom")
    rep = cr.SuiteReport("s", "all", ["gamma"], [c], {})
    text = cr.to_json(rep)
    assert '"nan"' in text
    back = cr.from_json(text).checks[0]
    assert math.isnan(back.residual) and back.error == "boom"


def test_csv_rows(flat_report):
    text = cr.to_csv(flat_report)
    assert text.splitlines()[0] == "check_id,paper_ref,residual,tolerance,pass"
    rows = list(csv.reader(io.StringIO(text)))
    assert len(rows) == len(flat_report.checks) + 1
    assert {r[4] for r in rows[1:]} == {"true"}


def test_text_sorted_and_tags_failures(bad_report):
    text = cr.to_text(bad_report)
    for c in bad_report.failures():
        line = next(ln for ln in text.splitlines() if c.check_id in ln)
        assert line.startswith("FAIL") and c.paper_ref in line
    flat = cr.to_text(cr.run_suite("catalog:minkowski", "all", "gamma"))
    mods = [ln.split()[1].split(".")[0] for ln in flat.splitlines() if ln.startswith(("PASS", "FAIL"))]
    assert mods == sorted(mods, key=cr.SUITES.index)


def test_tolerance_scale(bad_report):
    rep = cr.run_suite(st.load_scenario(str(DATA / "schwarzschild_perturbed.json")), "curvature", "epsilon", tol_scale=1e10)
    assert rep.passed
    assert rep.fingerprint["tolerance_scale"] == 1e10
    with pytest.raises(UsageError):
        cr.run_suite("catalog:minkowski", "algebra", "both", tol_scale=-1)


def test_run_suite_rejects_bad_selectors():
    with pytest.raises(UsageError):
        cr.run_suite("catalog:minkowski", "everything")
    with pytest.raises(UsageError):
        cr.run_suite("catalog:minkowski", "algebra", "delta")


def test_emit(tmp_path, flat_report):
    out = tmp_path / "r.csv"
    text = cr.emit(flat_report, "csv", out)
    assert out.read_text() == text
    with pytest.raises(UsageError):
        cr.emit(flat_report, "xml")
    with pytest.raises(ConfigurationError):
        cr.emit(flat_report, "json", tmp_path / "missing" / "r.json")


def test_seed_override(monkeypatch):
    sc = st.catalog_get("minkowski")
    assert cr.effective_seed(sc) == sc.probe_seed
    monkeypatch.setenv("SPINCURV_SEED", "123")
    rep = cr.run_suite(sc, "algebra", "gamma")
    assert rep.fingerprint["seed"] == 123


def test_evaluation_errors_are_collected():
    sc = st.catalog_get("minkowski").replace(metric_fn=lambda x: [[1.0 / (x[0] - x[0]), 0, 0, 0], [0, -1.0, 0, 0], [0, 0, -1.0, 0], [0, 0, 0, -1.0]])
    rep = cr.run_suite(sc, "algebra", "gamma")
    assert not rep.passed
    assert rep.checks[0].error


# command line ---------------------------------------------------------------


def test_cli_exit_pass(capsys):
    assert cr.main(["run", "--scenario", "catalog:minkowski", "--suite", "algebra", "--format", "csv"]) == 0
    assert capsys.readouterr().out.startswith("check_id,paper_ref")


def test_cli_exit_fail(tmp_path, capsys):
    out = tmp_path / "r.json"
    code = cr.main(["run", "--scenario", str(DATA / "schwarzschild_perturbed.json"), "--suite", "curvature",
                    "--formalism", "epsilon", "--format", "json", "--out", str(out)])
    assert code == 1
    assert json.loads(out.read_text())["passed"] is False
    assert "2 failed" in capsys.readouterr().out


@pytest.mark.parametrize(
    "argv",
    [
        ["run", "--scenario", "catalog:kerr"],
        ["run", "--scenario", "catalog:minkowski", "--suite", "nope"],
        ["run", "--scenario", str(DATA / "wrong_signature.json")],
        ["run", "--scenario", "catalog:minkowski", "--tol-scale", "0"],
        ["check-file", str(DATA / "bad_expression.json")],
        ["frobnicate"],
        [],
    ],
)
def test_cli_exit_usage(argv, capsys):
    assert cr.main(argv) == 2


def test_cli_list(capsys):
    assert cr.main(["list"]) == 0
    out = capsys.readouterr().out
    for name in st.CATALOG:
        assert name in out


def test_cli_check_file(capsys):
    assert cr.main(["check-file", str(DATA / "complex_gamma.json")]) == 0
    assert "ok: complex_gamma" in capsys.readouterr().out
