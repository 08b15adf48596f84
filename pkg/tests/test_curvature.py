import numpy as np
import pytest

from spincurv import curvature as cv
from spincurv import spin_algebra as sa
from spincurv.connection import build_geometry

from conftest import perturbed_schwarzschild, wiggly_gamma


def psi_square(b, geom):
    Mu = sa.value(geom.metric.upper)
    P = sa.value(b.Psi)
    return complex(np.einsum("ABCD,AE,BF,CG,DH,EFGH->", P, Mu, Mu, Mu, Mu, P))


@pytest.mark.parametrize("formalism", sa.FORMALISMS)
def test_schwarzschild_weyl_invariant(catalog, formalism):
    # Psi_ABCD Psi^ABCD = 6 Psi_2^2 with Psi_2 = -M / r^3
    sc = catalog["schwarzschild"]
    for p in sc.probe_points()[:3]:
        geom = build_geometry(sc, p, formalism, order=3)
        b = cv.curvature_bundle(geom)
        assert psi_square(b, geom) == pytest.approx(6 / p[1] ** 6, rel=1e-11)
        assert sa.max_abs(b.Xi) < 1e-12 * sa.max_abs(b.Psi)
        assert abs(b.chi.value) < 1e-12 * sa.max_abs(b.Psi)


def test_de_sitter_is_conformally_flat(catalog):
    sc = catalog["de_sitter"]
    for f in sa.FORMALISMS:
        b = cv.curvature_bundle(build_geometry(sc, sc.probe_points()[0], f, order=3))
        assert complex(b.chi.value) == pytest.approx(sc.lam / 2, rel=1e-12)
        assert sa.max_abs(b.Psi) < 1e-14
        assert sa.max_abs(b.Xi) < 1e-14


def test_pp_wave_is_null(catalog):
    sc = catalog["pp_wave"]
    geom = build_geometry(sc, sc.probe_points()[0], sa.EPSILON, order=3)
    b = cv.curvature_bundle(geom)
    assert sa.max_abs(b.Psi) > 0.1
    assert abs(psi_square(b, geom)) < 1e-14
    assert sa.max_abs(b.Xi) < 1e-14


def test_frw_radiation_ricci(catalog):
    # a = eta: scalar curvature 6 a''/a^3 vanishes, trace-free Ricci does not
    sc = catalog["frw_conformal"]
    b = cv.curvature_bundle(build_geometry(sc, sc.probe_points()[0], sa.GAMMA, order=3))
    assert abs(b.chi.value) < 1e-14
    assert sa.max_abs(b.Xi) > 1e-2
    assert sa.max_abs(b.Psi) < 1e-14


def test_coulomb_photon_invariant(catalog):
    # phi_AB phi^AB = F_ab F^ab / 4 = -E^2 / 2 for a pure electric field
    sc = catalog["coulomb_flat"]
    for p in sc.probe_points()[:3]:
        r2 = p[1] ** 2 + p[2] ** 2 + p[3] ** 2
        E = 0.5 / r2
        for f in sa.FORMALISMS:
            geom = build_geometry(sc, p, f, order=3)
            b = cv.curvature_bundle(geom)
            Mu = sa.value(geom.metric.upper)
            ph = sa.value(b.phi)
            inv = np.einsum("AB,AC,BD,CD->", ph, Mu, Mu, ph)
            assert inv == pytest.approx(-(E**2) / 2, rel=1e-12)


@pytest.mark.parametrize("name", ["schwarzschild", "de_sitter", "frw_conformal", "pp_wave", "coulomb_flat"])
@pytest.mark.parametrize("formalism", sa.FORMALISMS)
def test_identities_hold(catalog, name, formalism):
    sc = wiggly_gamma(catalog[name])
    for p in sc.probe_points()[:2]:
        geom = build_geometry(sc, p, formalism, order=3)
        res = cv.identity_residuals(geom)
        assert max(res.values()) < 1e-9, res
        assert max(cv.maxwell_fields(geom).residuals.values()) < 1e-9
        assert max(cv.einstein_residuals(geom).values()) < 1e-9


def test_charged_schwarzschild_two_routes(catalog):
    from spincurv import spacetimes as st

    sc = st.catalog_get("schwarzschild", {"q": 0.3})
    geom = build_geometry(sc, sc.probe_points()[0], sa.GAMMA, order=3)
    mx = cv.maxwell_fields(geom)
    assert max(mx.residuals.values()) < 1e-12
    # g_tt g_rr = -1, so the invariant is still -E^2 / 2 with E = q / r^2
    b = cv.curvature_bundle(geom)
    Mu = sa.value(geom.metric.upper)
    ph = sa.value(b.phi)
    E = 0.3 / geom.point[1] ** 2
    assert np.einsum("AB,AC,BD,CD->", ph, Mu, Mu, ph) == pytest.approx(-(E**2) / 2, rel=1e-11)


def test_einstein_check_catches_perturbation():
    sc = perturbed_schwarzschild()
    worst = 0.0
    for p in sc.probe_points()[:4]:
        geom = build_geometry(sc, p, sa.EPSILON, order=3)
        e = cv.einstein_residuals(geom)
        worst = max(worst, e["trace_free_ricci"])
        # the identity part of the check still holds
        assert e["einstein_tensor"] < 1e-9
        assert max(cv.identity_residuals(geom).values()) < 1e-9
    assert worst > 1e-4


def test_wrong_lambda_fails_cosmological(catalog):
    sc = catalog["de_sitter"]
    geom = build_geometry(sc, sc.probe_points()[0], sa.EPSILON, order=3)
    assert cv.einstein_residuals(geom)["cosmological"] < 1e-12
    assert cv.einstein_residuals(geom, lam=0.31)["cosmological"] > 1e-3


def test_bundle_is_cached(catalog):
    sc = catalog["minkowski"]
    geom = build_geometry(sc, sc.probe_points()[0], sa.GAMMA, order=3)
    assert cv.curvature_bundle(geom) is cv.curvature_bundle(geom)
