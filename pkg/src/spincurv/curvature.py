"""Mixed curvature, curvature spinors and their irreducible pieces.

Index storage (all spinor indices down unless noted):

* ``W[a, b, A, B]`` is ``W_ab A^B`` with ``[nabla_a, nabla_b] zeta^B =
  W_ab A^B zeta^A``.
* ``omega[A, B, C, D]`` and ``omega_primed[C, D, A', B']``; the primed pair
  of the second object is stored last so that ``Xi[C, D, A', B']`` reads as
  ``Xi_{C A' D B'}``.
* Spinor-indexed Riemann tensors are stored ``[A, B, C, D, A', B', C', D']``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import chart_fields as cf
from . import spin_algebra as sa
from .chart_fields import Jet
from .errors import FormalismInconsistencyError, InsufficientOrderError

IM_CHI_LIMIT = 1e-8


@dataclass(frozen=True)
class CurvatureBundle:
    formalism: str
    W: Jet  # [a, b, A, B]
    W_bar: Jet  # primed analogue, conjugate of W
    W_lower: Jet  # [a, b, C, D] = W_abC^M M_MD
    omega: Jet  # [A, B, C, D]
    omega_primed: Jet  # [C, D, A', B']
    X: Jet
    Xi: Jet  # [C, D, A', B']
    chi: Jet  # scalar
    Psi: Jet
    phi: Jet  # [A, B]
    phi_bar: Jet  # [A', B']
    F: Jet  # [a, b]


def mixed_curvature(spin) -> Jet:
    """W_abA^B from the spin affinity ``theta[a, B, A]``."""
    th = spin.theta
    if th.order < 1:
        raise InsufficientOrderError("mixed curvature needs first derivatives of the affinity")
    dth = th.grad()  # [a, b, A, B] = d_a theta_bA^B
    prod = cf.einsum("aAC,bCB->abAB", th, th)
    return (
        cf.einsum("abAB->abAB", dth)
        - cf.einsum("baAB->abAB", dth)
        - prod
        + cf.einsum("baAB->abAB", prod)
    )


def field_strength(potential: Jet) -> Jet:
    """F_ab = d_a Phi_b - d_b Phi_a."""
    dp = potential.grad()
    return dp - cf.einsum("ba->ab", dp)


def curvature_spinors(W: Jet, conn: sa.ConnectingObjects) -> tuple[Jet, Jet]:
    """(omega_ABCD, omega_{A'B'CD}) from the lowered mixed curvature."""
    M = conn.metric.lower
    Mb = conn.metric.lower_bar
    W_lower = cf.einsum("abCM,MD->abCD", W, M)
    s_B = cf.einsum("bMP,MB->bBP", conn.up_up, M)  # S_B^{bA'}
    s_Bp = cf.einsum("bAM,MQ->bAQ", conn.up_up, Mb)  # S_{B'}^{bA}
    omega = cf.einsum("aAP,bBP,abCD->ABCD", conn.up_down, s_B, W_lower) * 0.5
    omega_p = cf.einsum("aAP,bAQ,abCD->CDPQ", conn.up_down, s_Bp, W_lower) * 0.5
    return omega, omega_p


def decompose(omega: Jet, omega_primed: Jet, metric: sa.SpinMetric, F: Jet | None = None, W=None, W_lower=None) -> CurvatureBundle:
    """Split the curvature spinors into X, Xi, chi, Psi and the photon pieces."""
    Mu = metric.upper
    X = sa.symmetrize(omega, (2, 3))
    Xi = sa.symmetrize(omega_primed, (0, 1))
    chi = cf.einsum("AE,BF,ABEF->", Mu, Mu, X) * 0.5
    if abs(complex(chi.value).imag) > IM_CHI_LIMIT:
        raise FormalismInconsistencyError(f"chi has imaginary part {complex(chi.value).imag:.3e}")
    Psi = sa.symmetrize(X, (0, 1, 2, 3))
    phi = cf.einsum("CE,ABCE->AB", Mu, omega) * 0.5j
    phi_bar = cf.einsum("CE,CEPQ->PQ", Mu, omega_primed) * 0.5j
    formalism = metric.formalism
    if F is None:
        F = Jet.constant(np.zeros((4, 4)), omega.order)
    return CurvatureBundle(
        formalism, W, None if W is None else W.conj(), W_lower, omega, omega_primed, X, Xi, chi, Psi, phi, phi_bar, F
    )


def curvature_bundle(geom) -> CurvatureBundle:
    """Full curvature bundle of a geometry, cached on it."""
    hit = geom.cache.get("curvature")
    if hit is not None:
        return hit
    W = mixed_curvature(geom.spin)
    omega, omega_p = curvature_spinors(W, geom.conn)
    W_lower = cf.einsum("abCM,MD->abCD", W, geom.conn.metric.lower)
    F = field_strength(geom.spin.potential)
    bundle = decompose(omega, omega_p, geom.conn.metric, F=F.truncate(omega.order), W=W, W_lower=W_lower)
    geom.cache["curvature"] = bundle
    return bundle


# ---------------------------------------------------------------------------
# Riemann reconstruction


def spinor_riemann(bundle: CurvatureBundle, geom) -> Jet:
    """R_{AA'BB'CC'DD'} assembled from X and Xi, stored [A,B,C,D,A',B',C',D']."""
    M = geom.conn.metric.lower
    Mb = geom.conn.metric.lower_bar
    t1 = cf.einsum("PQ,RS,ABCD->ABCDPQRS", Mb, Mb, bundle.X)
    t2 = cf.einsum("AB,RS,CDPQ->ABCDPQRS", M, Mb, bundle.Xi)
    half = t1 + t2
    return half + cf.einsum("PQRSABCD->ABCDPQRS", half.conj())


def reconstruct_riemann(bundle: CurvatureBundle, geom) -> Jet:
    """World R_abcd (all indices down) from the spinor route."""
    S = geom.conn.up_spin
    Rs = spinor_riemann(bundle, geom)
    return cf.einsum("aAP,bBQ,cCR,dDS,ABCDPQRS->abcd", S, S, S, S, Rs)


def world_riemann_lower(geom) -> Jet:
    """World R_abcd = R_abc^e g_ed from the Christoffel route."""
    from .connection import riemann_world

    R = riemann_world(geom.world)
    return cf.einsum("abce,ed->abcd", R, geom.g.truncate(R.order))


def spinor_ricci(bundle: CurvatureBundle, geom) -> Jet:
    """R_{AA'BB'} = 2 (chi M_AB M_A'B' - Xi_{AA'BB'}), stored [A, B, A', B']."""
    M = geom.conn.metric.lower
    Mb = geom.conn.metric.lower_bar
    return (cf.einsum(",AB,PQ->ABPQ", bundle.chi, M, Mb) - bundle.Xi) * 2.0


def world_from_pair(t: Jet, geom) -> Jet:
    """T_ab = S_a^{AA'} S_b^{BB'} T_{AA'BB'} for T stored [A, B, A', B']."""
    S = geom.conn.up_spin
    return cf.einsum("aAP,bBQ,ABPQ->ab", S, S, t)


def weyl_world(R_lower: Jet, g: Jet, g_inv: Jet) -> Jet:
    """Weyl tensor C_abcd from the all-lower Riemann tensor."""
    g = g.truncate(R_lower.order)
    g_inv = g_inv.truncate(R_lower.order)
    ric = cf.einsum("ahbk,hk->ab", R_lower, g_inv)
    scal = cf.einsum("ab,ab->", ric, g_inv)
    term = (
        cf.einsum("ac,bd->abcd", g, ric)
        - cf.einsum("ad,bc->abcd", g, ric)
        - cf.einsum("bc,ad->abcd", g, ric)
        + cf.einsum("bd,ac->abcd", g, ric)
    )
    gg = cf.einsum("ac,bd->abcd", g, g) - cf.einsum("ad,bc->abcd", g, g)
    # the signs follow from R_ab = R_ahb^h with the lowered last slot
    return R_lower - term * 0.5 + cf.einsum(",abcd->abcd", scal, gg) * (1.0 / 6.0)


def weyl_spinor_route(bundle: CurvatureBundle, geom) -> Jet:
    """C_abcd from Psi: M_A'B' M_C'D' Psi_ABCD + c.c."""
    Mb = geom.conn.metric.lower_bar
    half = cf.einsum("PQ,RS,ABCD->ABCDPQRS", Mb, Mb, bundle.Psi)
    Cs = half + cf.einsum("PQRSABCD->ABCDPQRS", half.conj())
    S = geom.conn.up_spin
    return cf.einsum("aAP,bBQ,cCR,dDS,ABCDPQRS->abcd", S, S, S, S, Cs)


# ---------------------------------------------------------------------------
# photon fields


@dataclass(frozen=True)
class MaxwellFields:
    F: Jet
    phi: Jet  # potential route, [A, B]
    phi_bar: Jet  # potential route, [A', B']
    Theta: Jet  # world divergence of the potential
    residuals: dict


def _mx(x) -> float:
    v = sa.value(x)
    return float(np.max(np.abs(v))) if np.size(v) else 0.0


def _rel(res, *refs, floor: float = 1e-13) -> float:
    return _mx(res) / max([_mx(r) for r in refs] + [floor])


def maxwell_fields(geom) -> MaxwellFields:
    """Photon fields from the potential, checked against the curvature route."""
    from .connection import covariant_derivative

    conn = geom.conn
    M = conn.metric.lower
    Mb = conn.metric.lower_bar
    Mbu = conn.metric.upper_bar
    Mu = conn.metric.upper
    pot = geom.spin.potential
    F = field_strength(pot)
    eps_form = geom.formalism == sa.EPSILON
    pot_spin = cf.einsum("bBQ,b->BQ", conn.up_down, pot)  # Phi_{BB'}
    w = sa.DensityWeight(0, 0, -1 if eps_form else 0, 0)
    d = covariant_derivative(sa.SpinorField(pot_spin, ("s_", "p_"), w, geom.formalism), geom).components
    # nabla_{AA'} Phi_{BB'} = S_a^{..} lowered: S^a_{AA'} d_a
    dd = cf.einsum("aAP,aBQ->ABPQ", conn.up_down, d)  # [A, B, A', B']
    # phi_AB = -nabla_(A^{C'} Phi_B)C' with X_A^{C'} = Mb^{C'E'} X_{AE'}
    phi = -sa.symmetrize(cf.einsum("CE,ABEC->AB", Mbu, dd), (0, 1))
    phi_bar = -sa.symmetrize(cf.einsum("CE,ECAB->AB", Mu, dd), (0, 1))
    Theta = cf.einsum("ab,ab->", geom.g_inv.truncate(d.order), cf.einsum("aBQ,bBQ->ab", d, conn.up_spin))
    Fo = F.truncate(d.order)
    bundle = curvature_bundle(geom)
    ssf = cf.einsum("aAP,bBQ,ab->ABPQ", conn.up_down, conn.up_down, Fo)
    recon = cf.einsum("PQ,AB->ABPQ", Mb, phi) + cf.einsum("AB,PQ->ABPQ", M, phi_bar)
    eps4 = _world_alternating(geom)
    Fu = cf.einsum("ac,bd,cd->ab", geom.g_inv.truncate(d.order), geom.g_inv.truncate(d.order), Fo)
    Fstar = cf.einsum("abcd,cd->ab", eps4, Fu) * 0.5
    ssfs = cf.einsum("aAP,bBQ,ab->ABPQ", conn.up_down, conn.up_down, Fstar)
    dual = (cf.einsum("AB,PQ->ABPQ", M, phi_bar) - cf.einsum("PQ,AB->ABPQ", Mb, phi)) * 1j
    o = bundle.phi.order
    residuals = {
        "bivector_expansion": _rel(ssf - recon, ssf),
        "dual_expansion": _rel(ssfs - dual, ssfs),
        "two_route_phi": _rel(phi.truncate(o) - bundle.phi, bundle.phi),
        "two_route_phi_bar": _rel(phi_bar.truncate(o) - bundle.phi_bar, bundle.phi_bar),
    }
    return MaxwellFields(Fo, phi, phi_bar, Theta, residuals)


def _world_alternating(geom) -> Jet:
    """e_abcd as a jet, built from the spinor alternating object."""
    m = geom.conn.metric
    mlo = m.lower
    mb = m.lower_bar
    first = cf.einsum("AC,BD,PS,QR->ABCDPQRS", mlo, mlo, mb, mb)
    second = cf.einsum("PR,QS,AD,BC->ABCDPQRS", mb, mb, mlo, mlo)
    e = (first - second) * 1j
    S = geom.conn.up_spin
    return cf.einsum("aAP,bBQ,cCR,dDS,ABCDPQRS->abcd", S, S, S, S, e)


# ---------------------------------------------------------------------------
# identities and Einstein residuals


def curvature_scale(bundle: CurvatureBundle, floor: float = 1e-13) -> float:
    return max(_mx(bundle.X), _mx(bundle.Xi), _mx(bundle.chi), _mx(bundle.F), floor)


def identity_residuals(geom) -> dict[str, float]:
    """Algebraic curvature identities at one point (relative residuals)."""
    b = curvature_bundle(geom)
    conn = geom.conn
    M = conn.metric.lower
    Mu = conn.metric.upper
    Mb = conn.metric.lower_bar
    o = b.omega.order
    out = {}
    sc = curvature_scale(b)
    Rw = world_riemann_lower(geom).truncate(o)
    Rs = reconstruct_riemann(b, geom)
    rscale = max(_mx(Rw), _mx(b.F), 1e-13)
    out["riemann_roundtrip"] = _mx(Rs - Rw) / rscale
    g_inv = geom.g_inv.truncate(o)
    ric_w = cf.einsum("ahbk,hk->ab", Rw, g_inv)
    ric_s = world_from_pair(spinor_ricci(b, geom), geom)
    out["ricci_roundtrip"] = _mx(ric_s - ric_w) / rscale
    # [nabla_a, nabla_b] on a vector pair: 2 W + delta trace(W_bar) = S S R_ab^{cd}
    R_mixed = cf.einsum("abce,cAP,eBQ->abAPBQ", cf.einsum("abcd,de->abce", Rw, g_inv), conn.up_down, conn.up_spin)
    tr_bar = cf.einsum("abPP->ab", b.W_bar.truncate(o))
    tr = cf.einsum("abAA->ab", b.W.truncate(o))
    lhs = cf.einsum("abAB,PQ->abAPBQ", b.W.truncate(o), np.eye(2)) + cf.einsum(
        "abPQ,AB->abAPBQ", b.W_bar.truncate(o), np.eye(2)
    )
    out["mixed_riemann"] = _mx(lhs - R_mixed) / rscale
    full = cf.einsum("abAPBP->abAB", R_mixed) - cf.einsum("ab,AB->abAB", tr_bar, np.eye(2))
    out["mixed_riemann_contracted"] = _mx(b.W.truncate(o) * 2.0 - full) / rscale
    out["trace_real"] = _mx(tr.real) / rscale
    F = b.F.truncate(o)
    out["trace_is_field_strength"] = _rel(tr + F * 2j, F, floor=rscale)
    # omega reconstruction: S S W_lower = Mb omega + M omega'
    ssw = cf.einsum("aAP,bBQ,abCD->ABPQCD", conn.up_down, conn.up_down, b.W_lower.truncate(o))
    rec = cf.einsum("PQ,ABCD->ABPQCD", Mb, b.omega) + cf.einsum("AB,CDPQ->ABPQCD", M, b.omega_primed)
    out["bivector_reconstruction"] = _mx(ssw - rec) / max(_mx(ssw), 1e-13)
    out["omega_pair_symmetry"] = _mx(b.omega - cf.einsum("BACD->ABCD", b.omega)) / sc
    out["omega_primed_pair_symmetry"] = _mx(b.omega_primed - cf.einsum("CDQP->CDPQ", b.omega_primed)) / sc
    # M^{AD} X_ABCD = chi M_BC
    out["x_trace"] = _mx(cf.einsum("AD,ABCD->BC", Mu, b.X) - cf.einsum(",BC->BC", b.chi, M)) / sc
    out["x_double_trace"] = _mx(cf.einsum("AC,BD,ABCD->", Mu, Mu, b.X) - b.chi * 2.0) / sc
    out["im_chi"] = abs(complex(b.chi.value).imag) / sc
    # X = Psi - 2/3 chi M_A(C M_D)B
    mm = sa.symmetrize(cf.einsum("AC,DB->ABCD", M, M), (2, 3))
    out["x_reduction"] = _mx(b.X - (b.Psi - cf.einsum(",ABCD->ABCD", b.chi, mm) * (2.0 / 3.0))) / sc
    out["psi_symmetry"] = _mx(b.Psi - sa.symmetrize(b.Psi, (0, 1, 2, 3))) / sc
    out["xi_hermitian"] = _mx(b.Xi - cf.einsum("PQAB->ABPQ", b.Xi.conj())) / sc
    out["phi_symmetry"] = _mx(b.phi - cf.einsum("BA->AB", b.phi)) / sc
    # W_abAB = 1/2 S S R - i F M_AB  (Maxwell-free part plus electromagnetic part)
    R_up = cf.einsum("abcd,de->abce", Rw, g_inv)
    ssr = cf.einsum("abce,cAP,eMP,MB->abAB", R_up, conn.up_down, conn.up_spin, M)
    wl = ssr * 0.5 - cf.einsum("ab,AB->abAB", F, M) * 1j
    out["lowered_mixed"] = _mx(b.W_lower.truncate(o) - wl) / rscale
    # Weyl tensor through the Weyl spinor
    Cw = weyl_world(Rw, geom.g, geom.g_inv)
    Cs = weyl_spinor_route(b, geom)
    out["weyl_roundtrip"] = _mx(Cs - Cw) / rscale
    return out


def einstein_residuals(geom, lam: float | None = None) -> dict[str, float]:
    """Field-equation residuals relative to the curvature scale.

    For vacuum scenarios ``trace_free_ricci`` is ``|Xi|`` and ``scalar`` is
    ``|8 chi - 4 lambda|``.  ``einstein_tensor`` always compares the world
    Einstein tensor with ``-2 Xi - 2 chi M M`` (an identity).
    """
    b = curvature_bundle(geom)
    lam = geom.lam if lam is None else lam
    o = b.omega.order
    out = {}
    sc = max(curvature_scale(b), abs(lam))
    Rw = world_riemann_lower(geom).truncate(o)
    g_inv = geom.g_inv.truncate(o)
    g = geom.g.truncate(o)
    ric = cf.einsum("ahbk,hk->ab", Rw, g_inv)
    R = cf.einsum("ab,ab->", ric, g_inv)
    G = ric - cf.einsum(",ab->ab", R, g) * 0.5
    M = geom.conn.metric.lower
    Mb = geom.conn.metric.lower_bar
    Gs = world_from_pair(-(b.Xi + cf.einsum(",AB,PQ->ABPQ", b.chi, M, Mb)) * 2.0, geom)
    out["einstein_tensor"] = _mx(G - Gs) / max(_mx(G), sc)
    out["scalar_curvature"] = _mx(R - b.chi * 8.0) / max(_mx(R), sc)
    if geom.vacuum:
        out["trace_free_ricci"] = _mx(b.Xi) / sc
        out["cosmological"] = _mx(b.chi * 8.0 - 4.0 * lam) / sc
    return out
