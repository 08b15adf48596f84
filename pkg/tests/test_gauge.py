import math

import numpy as np
import pytest

from spincurv import gauge as ga
from spincurv import spin_algebra as sa
from spincurv import wave as wv
from spincurv.connection import build_geometry
from spincurv.errors import ConfigurationError
from spincurv.gauge import GaugeTransform

from conftest import wiggly_gamma

INVARIANT = ("chi", "phi_A^B")


@pytest.mark.parametrize("name", ["schwarzschild", "coulomb_flat", "de_sitter"])
def test_covariance_for_default_gauges(catalog, name):
    sc = wiggly_gamma(catalog[name])
    gauges = ga.default_gauges(sc)
    assert [g.label for g in gauges][:2] == ["identity", "constant(rho=2, Lambda=1.0472)"]
    for g in gauges:
        rep = ga.covariance_suite(sc, g, points=sc.probe_points()[:2])
        for f, res in rep.results.items():
            for k, v in res.items():
                tol = 1e-10 if k in INVARIANT else 1e-9
                assert v < tol, (g.label, f, k, v)
        assert rep.passed(1e-9)


def test_identity_gauge_changes_nothing(catalog):
    sc = catalog["coulomb_flat"]
    p = sc.probe_points()[0]
    res = ga.covariance_residuals(sc, GaugeTransform.identity(), p, sa.GAMMA)
    assert max(res.values()) < 1e-14


def test_metric_spinor_transforms_by_determinant():
    g = GaugeTransform.constant(2.0, 0.25)
    m = sa.SpinMetric(sa.GAMMA, 1.5 + 0.0j)
    moved = ga.apply_gauge(m, g, point=(0, 0, 0, 0), order=1)
    assert moved.gamma == pytest.approx(1.5 * 2.0 * np.exp(0.5j))
    e = sa.SpinMetric(sa.EPSILON)
    assert ga.apply_gauge(e, g, point=(0, 0, 0, 0)) is e


def test_spinor_slot_factors():
    g = GaugeTransform.constant(4.0, 0.1)
    f = sa.SpinorField(np.array([1.0, 0.0], dtype=complex), ("s_",), sa.ZERO_WEIGHT, sa.GAMMA)
    moved = ga.apply_gauge(f, g, point=(0, 0, 0, 0), order=0)
    assert moved.components[0] == pytest.approx(2.0 * np.exp(0.1j))
    fp = sa.SpinorField(np.array([1.0, 0.0], dtype=complex), ("p^",), sa.ZERO_WEIGHT, sa.GAMMA)
    assert ga.apply_gauge(fp, g, point=(0, 0, 0, 0), order=0).components[0] == pytest.approx(0.5 * np.exp(0.1j))
    # an epsilon-invariant field keeps its components
    w = sa.invariant_weight(("s_",), sa.EPSILON)
    fe = sa.SpinorField(np.array([1.0, 0.0], dtype=complex), ("s_",), w, sa.EPSILON)
    assert ga.apply_gauge(fe, g, point=(0, 0, 0, 0), order=0).components[0] == pytest.approx(1.0)


def test_determinant_identity(catalog):
    sc = wiggly_gamma(catalog["schwarzschild"])
    p = sc.probe_points()[0]
    geom = build_geometry(sc, p, sa.GAMMA, order=2)
    g = ga.default_gauges()[2]
    assert ga.determinant_identity(geom.metric, g, p) < 1e-12


@pytest.mark.parametrize("formalism", sa.FORMALISMS)
def test_group_law(catalog, formalism):
    sc = wiggly_gamma(catalog["coulomb_flat"])
    g1, g2 = ga.default_gauges()[1:3]
    res = ga.group_law_residuals(sc, g1, g2, sc.probe_points()[0], formalism)
    assert max(res.values()) < 1e-10


def test_compose_multiplies_moduli():
    g = GaugeTransform.constant(2.0, 0.1).compose(GaugeTransform.constant(3.0, 0.2))
    rho, lam = g.jets((0, 0, 0, 0), 1)
    assert complex(rho.value) == pytest.approx(6.0)
    assert complex(lam.value) == pytest.approx(0.3)


def test_field_strength_and_upsilon_invariant(catalog):
    sc = wiggly_gamma(catalog["coulomb_flat"])
    p = sc.probe_points()[0]
    for g in ga.default_gauges():
        assert ga.field_strength_invariance(sc, g, p) < 1e-10
        assert wv.upsilon_gauge_discrepancy(sc, g, p) < 1e-10


def test_non_invariant_object_does_change(catalog):
    # the metric spinor moves with the gauge, chi does not
    sc = catalog["coulomb_flat"]
    p = sc.probe_points()[0]
    g = ga.default_gauges()[2]
    base = ga.tracked_fields(build_geometry(sc, p, sa.GAMMA, order=3))
    moved = ga.tracked_fields(build_geometry(sc, p, sa.GAMMA, order=3, gauge=g))
    assert ga.discrepancy(moved["M_AB"].components, base["M_AB"].components) > 1e-2
    assert ga.discrepancy(moved["chi"].components, base["chi"].components) < 1e-12


def test_bad_gauges_rejected():
    with pytest.raises(ConfigurationError):
        GaugeTransform.constant(-1.0, 0.0)
    g = GaugeTransform(lambda x: x[0] * 0.0 - 1.0, lambda x: 0.0, "negative")
    with pytest.raises(ConfigurationError):
        g.jets((0.1, 0, 0, 0), 1)


def test_gauge_scenario_matches_gauged_geometry(catalog):
    sc = wiggly_gamma(catalog["coulomb_flat"])
    g = ga.default_gauges()[2]
    p = sc.probe_points()[0]
    a = build_geometry(sc, p, sa.GAMMA, order=3, gauge=g)
    b = build_geometry(ga.gauge_scenario(sc, g), p, sa.GAMMA, order=3)
    assert np.allclose(a.spin.theta.value, b.spin.theta.value, atol=1e-14)
    assert abs(complex(a.gamma.value) - complex(b.gamma.value)) < 1e-14
    assert math.isclose(abs(complex(a.gamma.value)), abs(complex(b.gamma.value)))
