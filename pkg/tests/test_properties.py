"""Randomised checks of the structural invariants."""

import cmath
import math

import numpy as np
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as hs

from spincurv import chart_fields as cf
from spincurv import gauge as ga
from spincurv import spacetimes as st
from spincurv import spin_algebra as sa
from spincurv import wave as wv
from spincurv.chart_fields import Jet
from spincurv.connection import build_geometry
from spincurv.spin_algebra import DensityWeight, SpinMetric, SpinorField

SLOW = settings(max_examples=12, deadline=None, suppress_health_check=[HealthCheck.too_slow])
FAST = settings(max_examples=60, deadline=None)

coord = hs.floats(-0.9, 0.9)
point = hs.tuples(coord, coord, coord, coord)
nonzero = hs.complex_numbers(min_magnitude=0.2, max_magnitude=5.0, allow_nan=False, allow_infinity=False)
halves = hs.integers(-4, 4).map(lambda k: k / 2)
weights = hs.builds(DensityWeight, halves, halves, halves, hs.integers(-2, 2))


@FAST
@given(point, hs.floats(-2, 2), hs.floats(-2, 2))
def test_jet_product_and_chain_rules(p, a, b):
    x = Jet.variables(p, 2)
    f = cf.sin(x[0] * a + x[1])
    g = cf.exp(x[2] * b) + x[3] * x[3]
    lhs = (f * g).grad().value
    rhs = f.grad().value * g.value + f.value * g.grad().value
    assert np.allclose(lhs, rhs, atol=1e-12)
    e = cf.exp(x[0] * a) * cf.exp(x[1] * b) - cf.exp(x[0] * a + x[1] * b)
    assert np.max(np.abs(e.c)) < 1e-12 * max(1.0, math.exp(abs(a) + abs(b)))


@FAST
@given(weights, weights, hs.floats(0.1, 10), hs.floats(-3, 3))
def test_weights_compose_and_compare(w1, w2, rho, lam):
    f12 = (w1 + w2).gauge_factor(rho, lam)
    assert cmath.isclose(f12, w1.gauge_factor(rho, lam) * w2.gauge_factor(rho, lam), rel_tol=1e-9)
    assert w1.conjugate().conjugate() == w1
    assert cmath.isclose(w1.conjugate().gauge_factor(rho, lam), np.conj(w1.gauge_factor(rho, lam)), rel_tol=1e-9)
    if w1.same_gauge_behaviour(w2):
        assert cmath.isclose(w1.gauge_factor(rho, lam), w2.gauge_factor(rho, lam), rel_tol=1e-9)


@FAST
@given(nonzero, hs.lists(hs.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False), min_size=4, max_size=4))
def test_raise_lower_round_trip(gamma, vals):
    metric = SpinMetric(sa.GAMMA, gamma)
    f = SpinorField(np.array(vals).reshape(2, 2), ("s_", "p_"), sa.ZERO_WEIGHT, sa.GAMMA)
    for slot in (0, 1):
        back = sa.adjust_index(sa.adjust_index(f, slot, "raise", metric), slot, "lower", metric)
        assert np.allclose(back.components, f.components, atol=1e-12)
    # nu^A nu_A = 0 for every spinor
    v = SpinorField(np.array(vals[:2]), ("s_",), sa.ZERO_WEIGHT, sa.GAMMA)
    up = sa.adjust_index(v, 0, "raise", metric).components
    assert abs(np.sum(up * v.components)) < 1e-12 * (1 + np.sum(np.abs(v.components)) ** 2 / abs(gamma))


@SLOW
@given(nonzero, hs.integers(0, 11))
def test_algebra_for_any_constant_gamma(gamma, k):
    sc = st.catalog_get("schwarzschild", {"gamma_abs": repr(abs(gamma)), "gamma_phase": repr(cmath.phase(gamma))})
    geom = build_geometry(sc, sc.probe_points()[k], sa.GAMMA, order=2)
    assert max(sa.algebra_residuals(geom.conn).values()) < 1e-10


@SLOW
@given(hs.floats(0.2, 5.0), hs.floats(-3, 3), hs.integers(0, 11), hs.sampled_from(sa.FORMALISMS))
def test_constant_gauge_covariance(rho, lam, k, formalism):
    sc = st.catalog_get("coulomb_flat")
    g = ga.GaugeTransform.constant(rho, lam)
    res = ga.covariance_residuals(sc, g, sc.probe_points()[k], formalism)
    assert max(res.values()) < 1e-9, res


@SLOW
@given(hs.integers(0, 2**31 - 1), hs.sampled_from(sa.FORMALISMS), hs.sampled_from(range(len(wv.RANDOM_VALENCES))))
def test_commutator_for_random_fields(seed, formalism, which):
    sc = st.catalog_get("pp_wave", {"gamma_abs": "1 + 0.05*sin(u + x)", "gamma_phase": "0.3*cos(v*y)"})
    geom = build_geometry(sc, sc.probe_points()[seed % 12], formalism, order=3)
    slots, w = wv.RANDOM_VALENCES[which]
    fld = wv.random_field(slots, w, formalism, geom.point, 3, np.random.default_rng(seed))
    assert wv.commutator_check(fld, geom).max() < 1e-9


@FAST
@given(hs.lists(hs.floats(-5, 5), min_size=4, max_size=4), hs.integers(0, 11))
def test_world_spin_round_trip(u, k):
    sc = st.catalog_get("pp_wave")
    geom = build_geometry(sc, sc.probe_points()[k], sa.EPSILON, order=2)
    c = geom.conn
    conn = sa.ConnectingObjects(c.formalism, *(sa.value(o) for o in (c.up_spin, c.up_up, c.down_down, c.up_down)),
                                SpinMetric(sa.EPSILON), sa.value(c.g), sa.value(c.g_inv))
    f = SpinorField(np.array(u, dtype=complex), ("w_",), sa.ZERO_WEIGHT, sa.EPSILON)
    pair = sa.world_spin_translate(f, conn, "world->spin")
    # real vectors become Hermitian pairs
    assert np.allclose(pair.components, np.conj(pair.components.T), atol=1e-12)
    assert np.allclose(sa.world_spin_translate(pair, conn, "spin->world").components, u, atol=1e-12)


@FAST
@given(hs.floats(-1e6, 1e6, allow_nan=False))
def test_expression_literals_round_trip(v):
    f = st.compile_expression(repr(v), ("t", "x", "y", "z"))
    assert f(None) == v


@FAST
@given(hs.integers(0, 10**6), hs.integers(1, 30))
def test_probe_points_inside_chart(seed, count):
    sc = st.catalog_get("schwarzschild")
    pts = sc.probe_points(count, seed)
    assert len(pts) == count
    assert all(sc.chart.contains(p) for p in pts)
