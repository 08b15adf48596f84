from fractions import Fraction

import numpy as np
import pytest

from spincurv import spin_algebra as sa
from spincurv.connection import build_geometry
from spincurv.errors import FormalismInconsistencyError, InconsistentScenarioError
from spincurv.spin_algebra import DensityWeight, SpinMetric, SpinorField


@pytest.mark.parametrize("name", ["minkowski", "schwarzschild", "de_sitter", "frw_conformal", "pp_wave", "coulomb_flat"])
@pytest.mark.parametrize("formalism", sa.FORMALISMS)
def test_algebra_identities_on_catalog(catalog, name, formalism):
    sc = catalog[name]
    for p in sc.probe_points()[:3]:
        geom = build_geometry(sc, p, formalism, order=2)
        res = sa.algebra_residuals(geom.conn)
        assert set(res) >= {"inverse_metric", "anticommutator", "metric_reproduction", "hermiticity", "completeness"}
        assert max(res.values()) < 1e-10, res


def test_metric_spinor_components():
    m = SpinMetric(sa.GAMMA, 2.0 * np.exp(0.3j))
    assert m.lower[0, 1] == pytest.approx(2.0 * np.exp(0.3j))
    assert np.allclose(m.upper @ m.lower.T, np.eye(2))
    assert m.gamma_abs == pytest.approx(2.0)
    e = SpinMetric(sa.EPSILON)
    assert np.array_equal(e.lower, sa.EPS)


def test_raise_then_lower_restores_field_and_weight():
    rng = np.random.default_rng(2)
    metric = SpinMetric(sa.EPSILON)
    comps = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    f = SpinorField(comps, ("s_", "p_"), sa.ZERO_WEIGHT, sa.EPSILON)
    up = sa.adjust_index(f, 0, "raise", metric)
    assert up.slots == ("s^", "p_")
    assert up.dweight.weight == 1
    back = sa.adjust_index(up, 0, "lower", metric)
    assert np.allclose(back.components, comps)
    assert back.dweight.is_zero
    up_p = sa.adjust_index(f, 1, "raise", metric)
    assert up_p.dweight.antiweight == 1


def test_gamma_raising_carries_no_weight():
    metric = SpinMetric(sa.GAMMA, 0.5 + 0.5j)
    f = SpinorField(np.array([1.0, 2.0j]), ("s_",), sa.ZERO_WEIGHT, sa.GAMMA)
    up = sa.adjust_index(f, 0, "raise", metric)
    assert up.dweight.is_zero
    # nu^A nu_A = 0 for any spinor
    assert abs(np.sum(up.components * f.components)) < 1e-15


def test_formalism_mismatch_rejected():
    f = SpinorField(np.ones(2), ("s_",), sa.ZERO_WEIGHT, sa.GAMMA)
    with pytest.raises(FormalismInconsistencyError):
        sa.adjust_index(f, 0, "raise", SpinMetric(sa.EPSILON))


def test_slot_parsing():
    assert sa.parse_slots("w^ s_ p_") == ("w^", "s_", "p_")
    with pytest.raises(ValueError):
        sa.parse_slots("s_ w^")
    with pytest.raises(ValueError):
        sa.parse_slots("q_")
    v = sa.valence_of("w_ w_ s^ p_ p_")
    assert v.as_tuple() == (0, 2, 1, 0, 0, 2)
    assert v.size == 16 * 2 * 4


def test_field_shape_checked():
    with pytest.raises(ValueError):
        SpinorField(np.ones((2, 2)), ("w_", "s_"), sa.ZERO_WEIGHT, sa.EPSILON)


def test_weight_effective_pairs():
    a = DensityWeight(1, 1, 0)
    b = DensityWeight(0, 0, 2)
    assert a != b
    assert a.same_gauge_behaviour(b)
    assert DensityWeight(0.5, 0, 0).weight == Fraction(1, 2)
    assert (a + (-a)).is_zero
    assert DensityWeight(1, 0, 0).conjugate() == DensityWeight(0, 1, 0)


def test_gauge_factor_of_weight():
    w = DensityWeight(1, 0, 0)
    rho, lam = 2.0, 0.4
    assert w.gauge_factor(rho, lam) == pytest.approx(rho * np.exp(2j * lam))
    assert DensityWeight(0, 0, 1).gauge_factor(rho, lam) == pytest.approx(rho)


def test_invariant_weight_rule():
    assert sa.invariant_weight("s_ p_", sa.GAMMA).is_zero
    w = sa.invariant_weight("s_ s^ s_ p_", sa.EPSILON)
    assert (w.weight, w.antiweight) == (Fraction(-1, 2), Fraction(-1, 2))


def test_alternating_tensor_is_volume_form(catalog):
    # e_abcd = -sqrt(-g) [abcd] with the sign fixed by e_0123 < 0
    for name in ("minkowski", "schwarzschild", "pp_wave"):
        sc = catalog[name]
        p = sc.probe_points()[0]
        for f in sa.FORMALISMS:
            geom = build_geometry(sc, p, f, order=2)
            e = sa.alternating_world(geom.metric, geom.conn)
            vol = np.sqrt(-np.linalg.det(geom.g.value.real))
            assert np.max(np.abs(e + vol * sa.levi_civita())) < 1e-12 * vol


def test_alternating_spinor_weight():
    assert sa.alternating_spinor(SpinMetric(sa.EPSILON)).dweight == DensityWeight(-2, -2, 0, 0)
    assert sa.alternating_spinor(SpinMetric(sa.GAMMA, 1.5)).dweight.is_zero


def test_world_spin_round_trip(catalog):
    sc = catalog["schwarzschild"]
    geom = build_geometry(sc, sc.probe_points()[1], sa.EPSILON, order=2)
    conn = geom.conn
    conn_v = sa.ConnectingObjects(
        conn.formalism, *(sa.value(o) for o in (conn.up_spin, conn.up_up, conn.down_down, conn.up_down)),
        SpinMetric(sa.EPSILON), sa.value(conn.g), sa.value(conn.g_inv),
    )
    rng = np.random.default_rng(5)
    u = rng.normal(size=4)
    f = SpinorField(u.astype(complex), ("w^",), sa.ZERO_WEIGHT, sa.EPSILON)
    s = sa.world_spin_translate(f, conn_v, "world->spin")
    assert s.slots == ("s^", "p^")
    assert np.allclose(s.components, np.conj(s.components.T))
    back = sa.world_spin_translate(s, conn_v, "spin->world")
    assert np.allclose(back.components, u)
    assert back.dweight.is_zero


def test_tetrad_metric_mismatch_raises():
    tet = np.eye(4)
    g = np.diag([1.0, -2.0, -1.0, -1.0])
    with pytest.raises(InconsistentScenarioError):
        sa.connecting_from_tetrad(tet, g, sa.EPSILON)


def test_hermitian_conjugate_of_hermitian_pair():
    a = np.array([[1.0, 2 + 1j], [2 - 1j, 3.0]])
    f = SpinorField(a, ("s^", "p^"), sa.ZERO_WEIGHT, sa.EPSILON, hermitian=True)
    assert f.symmetry_residual() == 0.0
