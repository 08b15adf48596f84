from pathlib import Path

import pytest

from spincurv import chart_fields as cf
from spincurv import spacetimes as st

DATA = Path(__file__).parent / "data"


def wiggly_gamma(scenario):
    """|gamma| = 1 + 0.05 sin(x0 + x1), phase 0.3 cos(x2 x3)."""
    return scenario.replace(
        gamma_abs_fn=lambda x: cf.sin(x[0] + x[1]) * 0.05 + 1.0,
        gamma_phase_fn=lambda x: cf.cos(x[2] * x[3]) * 0.3,
    )


def perturbed_schwarzschild(eps=1e-3):
    """g_tt -> g_tt (1 + eps sin r); still flagged vacuum, so it is wrong physics."""
    sc = st.catalog_get("schwarzschild")
    metric, tetrad = sc.metric_fn, sc.tetrad_fn

    def g(x):
        m = [list(r) for r in metric(x)]
        m[0][0] = m[0][0] * (cf.sin(x[1]) * eps + 1.0)
        return m

    def e(x):
        t = [list(r) for r in tetrad(x)]
        t[0][0] = t[0][0] * cf.sqrt(cf.sin(x[1]) * eps + 1.0)
        return t

    return sc.replace(name="schwarzschild_perturbed", metric_fn=g, tetrad_fn=e)


@pytest.fixture(scope="session")
def catalog():
    return {name: st.catalog_get(name) for name in st.CATALOG}


@pytest.fixture
def data_dir():
    return DATA


@pytest.fixture(autouse=True)
def _no_seed_override(monkeypatch):
    monkeypatch.delenv(st.SEED_ENV, raising=False)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[n])


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    # an acceptance test that errors before its verdict still gets a FAIL line
    outcome = yield
    rep = outcome.get_result()
    if rep.when != "call" or not rep.failed or item.module.__name__ != "test_acceptance":
        return
    n = int(item.name.split("_")[1])
    results = item.module.RESULTS
    if n not in results:
        results[n] = f"[FAIL] {n:2d}. {item.name}: {call.excinfo.typename}: {call.excinfo.value}"
