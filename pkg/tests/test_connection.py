import math

import numpy as np
import pytest

from spincurv import chart_fields as cf
from spincurv import connection as cn
from spincurv import spin_algebra as sa
from spincurv.errors import InsufficientOrderError
from spincurv.spin_algebra import SpinorField

from conftest import wiggly_gamma


def test_schwarzschild_christoffel_closed_form(catalog):
    sc = catalog["schwarzschild"]
    for p in sc.probe_points()[:4]:
        t, r, th, ph = p
        G = cn.build_geometry(sc, p, sa.EPSILON, order=2).world.Gamma.value
        f = 1 - 2 / r
        assert G[0, 0, 1] == pytest.approx(f / r**2, rel=1e-13)
        assert G[0, 1, 0] == pytest.approx(1 / (r * (r - 2)), rel=1e-13)
        assert G[1, 1, 1] == pytest.approx(-1 / (r * (r - 2)), rel=1e-13)
        assert G[2, 2, 1] == pytest.approx(-(r - 2), rel=1e-13)
        assert G[3, 3, 2] == pytest.approx(-math.sin(th) * math.cos(th), rel=1e-12)
        assert G[1, 2, 2] == pytest.approx(1 / r, rel=1e-13)


def test_kretschmann_scalar(catalog):
    sc = catalog["schwarzschild"]
    p = sc.probe_points()[2]
    geom = cn.build_geometry(sc, p, sa.EPSILON, order=2)
    R = cn.riemann_world(geom.world).value  # R[a, b, c]^d
    gi = geom.g_inv.value
    g = geom.g.value
    Rl = np.einsum("abcd,de->abce", R, g)
    K = np.einsum("abcd,ae,bf,cg,dh,efgh->", Rl, gi, gi, gi, gi, Rl)
    assert K.real == pytest.approx(48 / p[1] ** 6, rel=1e-11)


def test_de_sitter_ricci_scalar(catalog):
    sc = catalog["de_sitter"]
    geom = cn.build_geometry(sc, sc.probe_points()[0], sa.EPSILON, order=2)
    ric = cn.ricci_world(cn.riemann_world(geom.world)).value
    R = np.einsum("ab,ab->", ric, geom.g_inv.value)
    assert R.real == pytest.approx(4 * sc.lam, rel=1e-12)


def test_minkowski_affinities_vanish(catalog):
    sc = catalog["minkowski"]
    for f in sa.FORMALISMS:
        geom = cn.build_geometry(sc, sc.probe_points()[0], f, order=3)
        assert np.max(np.abs(geom.world.Gamma.c)) == 0
        assert np.max(np.abs(geom.spin.theta.c)) < 1e-15


@pytest.mark.parametrize("name", ["schwarzschild", "de_sitter", "frw_conformal", "pp_wave", "coulomb_flat"])
@pytest.mark.parametrize("formalism", sa.FORMALISMS)
def test_constancy_with_wiggly_gamma(catalog, name, formalism):
    sc = wiggly_gamma(catalog[name])
    rep = cn.constancy_suite(sc, formalism, sc.probe_points()[:3])
    assert rep.passed(1e-9), rep.residuals
    if formalism == sa.GAMMA:
        assert {"gamma_modulus", "gamma_pair", "gamma_eigenvalue", "mu_consistency"} <= set(rep.residuals)


def test_scalar_derivative_is_gradient(catalog):
    sc = wiggly_gamma(catalog["schwarzschild"])
    p = sc.probe_points()[0]
    geom = cn.build_geometry(sc, p, sa.GAMMA, order=2)
    x = cf.Jet.variables(tuple(p), 2)
    phi = cf.sin(x[1]) * x[2]
    d = cn.covariant_derivative(SpinorField(phi, (), sa.ZERO_WEIGHT, sa.GAMMA), geom).components
    assert np.allclose(d.value, phi.grad().value)


def test_gamma_affinity_pieces(catalog):
    # trace = d log|gamma| - 2i Phi, beta = d(phase) + 2 Phi, by hand for the Coulomb case
    sc = wiggly_gamma(catalog["coulomb_flat"])
    p = sc.probe_points()[0]
    t, x, y, z = p
    geom = cn.build_geometry(sc, p, sa.GAMMA, order=2)
    r = math.sqrt(x * x + y * y + z * z)
    mod = 1 + 0.05 * math.sin(t + x)
    dlog = np.array([0.05 * math.cos(t + x), 0.05 * math.cos(t + x), 0, 0]) / mod
    pot = np.array([0.5 / r, 0, 0, 0])
    dphase = np.array([0, 0, -0.3 * math.sin(y * z) * z, -0.3 * math.sin(y * z) * y])
    assert np.allclose(geom.spin.trace.value, dlog - 2j * pot, atol=1e-14)
    assert np.allclose(geom.spin.beta.value, dphase + 2 * pot, atol=1e-14)
    assert np.allclose(np.einsum("aBB->a", geom.spin.theta.value), geom.spin.trace.value)


def test_order_guard(catalog):
    with pytest.raises(InsufficientOrderError):
        cn.build_geometry(catalog["minkowski"], (0, 0, 0, 0), sa.GAMMA, order=1)


def test_epsilon_limit_order(catalog):
    sc = catalog["schwarzschild"]
    rep = cn.epsilon_limit(sc, sc.probe_points()[:2])
    assert max(rep.exact_at_zero.values()) < 1e-12
    for k, s in rep.slopes.items():
        assert s >= 1.0, (k, rep.differences[k])
    # first-order convergence: each decade cuts the gap by about ten
    d = rep.differences["contracted_affinity"]
    assert d[0] / d[1] == pytest.approx(10, rel=0.05)


def test_finite_gamma_correspondences(catalog):
    for name in ("schwarzschild", "coulomb_flat"):
        sc = catalog[name]
        res = cn.finite_gamma_correspondences(sc, sc.probe_points()[:2])
        assert max(res.values()) < 1e-9, res


def test_christoffel_batch(catalog):
    sc = catalog["de_sitter"]
    out = cn.christoffel(sc, sc.probe_points()[:2])
    assert len(out) == 2
    H = math.sqrt(sc.lam / 3)
    # Gamma_xx^t = H a^2
    t = sc.probe_points()[0][0]
    assert out[0].Gamma.value[1, 1, 0] == pytest.approx(H * math.exp(2 * H * t), rel=1e-13)
