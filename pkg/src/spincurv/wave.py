"""Second-order operators and field/wave-equation residuals.

Everything is assembled from nested applications of
:func:`spincurv.connection.covariant_derivative`, so the brute-force side of
each check never sees a curvature spinor.  Operator contractions use the
connecting objects as point values: ``Delta_AB f = S^a_{AC'} S_B^{bC'}
nabla_a nabla_b f`` symmetrised in ``AB``, which already absorbs the
beta-terms that appear when the raised operator is written out in the gamma
formalism.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import chart_fields as cf
from . import curvature as cv
from . import spin_algebra as sa
from .chart_fields import Jet
from .connection import Geometry, covariant_derivative, riemann_world
from .errors import InsufficientOrderError, PreconditionError, UsageError
from .spin_algebra import DensityWeight, SpinorField

RESIDUAL_FLOOR = 1e-13
# identities whose true value may vanish are compared against this fraction
# of the second-derivative magnitude, well above the ~1e-16 cancellation noise
CANCELLATION_FLOOR = 1e-6
LETTERS = "cdefghijklmnopqrstuvwxyCDEFGHIJKLMNOPQRSTUVWXY"


def _mx(x) -> float:
    v = sa.value(x)
    return float(np.max(np.abs(v))) if np.size(v) else 0.0


def _idx(n: int) -> str:
    return LETTERS[:n]


def _jet(x, order):
    return x.truncate(order) if isinstance(x, Jet) else Jet.constant(x, order)


# ---------------------------------------------------------------------------
# reports


@dataclass
class WaveResidualReport:
    equation: str
    formalism: str
    residual: float  # max |residual| over points
    scale: float  # max term magnitude over points
    relative: float  # max per-point relative residual
    per_point: list

    @classmethod
    def collect(cls, equation, formalism, items) -> "WaveResidualReport":
        items = list(items)
        res = max((r for r, _ in items), default=0.0)
        sc = max((s for _, s in items), default=0.0)
        rel = max((r / max(s, RESIDUAL_FLOOR) for r, s in items), default=0.0)
        return cls(equation, formalism, res, sc, rel, [r / max(s, RESIDUAL_FLOOR) for r, s in items])


class Terms(list):
    """Equation terms plus the magnitude of what cancels inside them."""

    def __init__(self, items=(), hint: float = 0.0):
        super().__init__(items)
        self.hint = hint

    def evaluate(self) -> tuple[float, float]:
        return _terms(*self, hint=self.hint)


def _terms(*terms, hint: float = 0.0) -> tuple[float, float]:
    """(|sum of terms|, max |term|) at one point.

    ``hint`` is the magnitude of quantities cancelling inside a single term,
    e.g. the second derivatives contracted into a box.
    """
    total = terms[0]
    for t in terms[1:]:
        total = total + t
    return _mx(total), max([_mx(t) for t in terms] + [hint])


# ---------------------------------------------------------------------------
# second derivatives and operators


def second_derivative(fld: SpinorField, geom: Geometry) -> SpinorField:
    """nabla_a nabla_b f, stored [a, b, ...]."""
    return covariant_derivative(covariant_derivative(fld, geom), geom)


def box(fld: SpinorField, geom: Geometry, d2: SpinorField | None = None) -> Jet:
    d2 = d2 or second_derivative(fld, geom)
    n = len(fld.slots)
    rest = _idx(n)
    return cf.einsum(f"ab,ab{rest}->{rest}", geom.g_inv.truncate(d2.components.order), d2.components)


def delta_projectors(geom: Geometry) -> tuple[Jet, Jet]:
    """P[A, B, a, b] and P'[A', B', a, b] with Delta_AB = P nabla nabla."""
    c = geom.conn
    Pu = cf.einsum("aAC,CD,bBD->ABab", c.up_down, c.metric.upper_bar, c.up_down)
    Pp = cf.einsum("aCP,CD,bDQ->PQab", c.up_down, c.metric.upper, c.up_down)
    return sa.symmetrize(Pu, (0, 1)), sa.symmetrize(Pp, (0, 1))


def box_and_delta(fld: SpinorField, geom: Geometry):
    """(box f, Delta_AB f, Delta_A'B' f); the Delta arrays carry [A, B] first."""
    comps = fld.components
    if isinstance(comps, Jet) and comps.order < 2:
        raise InsufficientOrderError("second covariant derivatives need field jets of order 2")
    d2 = second_derivative(fld, geom)
    o = d2.components.order
    Pu, Pp = delta_projectors(geom)
    rest = _idx(len(fld.slots))
    du = cf.einsum(f"ABab,ab{rest}->AB{rest}", Pu.truncate(o), d2.components)
    dp = cf.einsum(f"ABab,ab{rest}->AB{rest}", Pp.truncate(o), d2.components)
    return box(fld, geom, d2), du, dp


def delta_upper(delta_lower: Jet, geom: Geometry, primed: bool = False) -> Jet:
    """Delta^{AB} = M^{AC} M^{BD} Delta_CD (on the two leading axes)."""
    m = geom.conn.metric
    up = m.upper_bar if primed else m.upper
    n = delta_lower.ndim - 2
    rest = _idx(n)
    o = delta_lower.order
    return cf.einsum(f"AC,BD,CD{rest}->AB{rest}", _jet(up, o), _jet(up, o), delta_lower)


# ---------------------------------------------------------------------------
# commutator check


def _slot_term(coef: Jet, comps: Jet, k: int, n: int, lead: str, upper: bool) -> Jet:
    """Contract a curvature object [lead..., i, j] into slot k of the field.

    ``upper`` slots take ``coef[..., z, new]``; lower slots ``-coef[..., new, z]``.
    """
    idx = list(_idx(n))
    new = idx[k]
    src = idx.copy()
    src[k] = "z"
    pair = f"z{new}" if upper else f"{new}z"
    t = cf.einsum(f"{lead}{pair},{''.join(src)}->{lead}{''.join(idx)}", coef, comps)
    return t if upper else -t


@dataclass
class CommutatorReport:
    world: float  # [nabla_a, nabla_b] f against the W/R contraction
    delta_unprimed: float  # Delta_AB f against the omega contraction
    delta_primed: float
    splitting: float  # nabla_A'^C nabla^AA' = Delta^AC - 1/2 M^AC box

    def max(self) -> float:
        return max(self.world, self.delta_unprimed, self.delta_primed, self.splitting)


def _curv_objects(geom):
    b = cv.curvature_bundle(geom)
    m = geom.conn.metric
    Mu, Mbu = m.upper, m.upper_bar
    om_up = cf.einsum("ABMN,XN->ABMX", b.omega, Mu)  # omega_ABM^X
    obar = cf.einsum("MNAB->ABMN", b.omega_primed.conj())  # Delta_AB on primed slots
    obar_up = cf.einsum("ABMN,XN->ABMX", obar, Mbu)
    op = cf.einsum("MNPQ->PQMN", b.omega_primed)  # omega_{A'B'MN}
    op_up = cf.einsum("PQMN,XN->PQMX", op, Mu)
    opb = b.omega.conj()  # Delta_A'B' on primed slots
    opb_up = cf.einsum("PQMN,XN->PQMX", opb, Mbu)
    return b, om_up, obar_up, op_up, opb_up


def commutator_rhs_world(fld: SpinorField, geom: Geometry, order: int) -> Jet:
    """Sum of R/W terms per slot plus the density term 2 i (a - b) F_ab f."""
    b = cv.curvature_bundle(geom)
    R = riemann_world(geom.world).truncate(order)
    W = b.W.truncate(order)
    Wb = b.W_bar.truncate(order)
    comps = _jet(fld.components, order)
    n = len(fld.slots)
    out = None
    for k, slot in enumerate(fld.slots):
        coef = {"w": R, "s": W, "p": Wb}[slot[0]]
        t = _slot_term(coef, comps, k, n, "ab", slot[1] == "^")
        out = t if out is None else out + t
    dw = fld.dweight
    rest = _idx(n)
    q = complex(2j * float(dw.weight - dw.antiweight))
    if q:
        t = cf.einsum(f"ab,{rest}->ab{rest}", b.F.truncate(order) * q, comps)
        out = t if out is None else out + t
    if out is None:
        out = Jet.constant(np.zeros((4, 4)), order)
    return out


def delta_rhs(fld: SpinorField, geom: Geometry, order: int, primed: bool) -> Jet:
    """omega contractions for Delta_AB f (or Delta_A'B' f with ``primed``)."""
    _, om_up, obar_up, op_up, opb_up = _curv_objects(geom)
    Pu, Pp = delta_projectors(geom)
    P = (Pp if primed else Pu).truncate(order)
    R = riemann_world(geom.world).truncate(order)
    un, pr = (op_up, opb_up) if primed else (om_up, obar_up)
    un, pr = un.truncate(order), pr.truncate(order)
    comps = _jet(fld.components, order)
    n = len(fld.slots)
    rest = _idx(n)
    out = None
    PR = cf.einsum("ABab,abcd->ABcd", P, R) * 0.5
    for k, slot in enumerate(fld.slots):
        coef = {"w": PR, "s": un, "p": pr}[slot[0]]
        t = _slot_term(coef, comps, k, n, "AB", slot[1] == "^")
        out = t if out is None else out + t
    dw = fld.dweight
    tr_un = cf.einsum("ABCC->AB", un)
    tr_pr = cf.einsum("ABCC->AB", pr)
    dens = tr_un * float(dw.weight) + tr_pr * float(dw.antiweight) + (tr_un + tr_pr) * (0.5 * float(dw.absolute))
    t = -cf.einsum(f"AB,{rest}->AB{rest}", dens, comps)
    out = t if out is None else out + t
    return out


def commutator_check(fld: SpinorField, geom: Geometry) -> CommutatorReport:
    """Brute-force commutators against curvature contractions (relative errors)."""
    d2 = second_derivative(fld, geom)
    o = d2.components.order
    n = len(fld.slots)
    rest = _idx(n)
    D = d2.components
    lhs = D - cf.einsum(f"ba{rest}->ab{rest}", D)
    rhs = commutator_rhs_world(fld, geom, o)
    floor = max(CANCELLATION_FLOOR * _mx(D), RESIDUAL_FLOOR)

    def rel(a, b):
        return _mx(a - b) / max(_mx(a), _mx(b), floor)

    Pu, Pp = delta_projectors(geom)
    du = cf.einsum(f"ABab,ab{rest}->AB{rest}", Pu.truncate(o), D)
    dp = cf.einsum(f"ABab,ab{rest}->AB{rest}", Pp.truncate(o), D)
    # operator splitting: S_{A'}^{aC} S^{bAA'} nabla_a nabla_b = Delta^{AC} - 1/2 M^{AC} box
    c = geom.conn
    s_low = cf.einsum("CD,aDP->aCP", c.metric.upper, c.up_down)  # S_{A'}^{aC}
    lhs_split = cf.einsum(f"aCP,bAP,ab{rest}->AC{rest}", s_low.truncate(o), c.up_up.truncate(o), D)
    bx = box(fld, geom, d2)
    rhs_split = delta_upper(du, geom) - cf.einsum(f"AC,{rest}->AC{rest}", _jet(c.metric.upper, o), bx) * 0.5
    return CommutatorReport(
        world=rel(lhs, rhs),
        delta_unprimed=rel(du, delta_rhs(fld, geom, o, False)),
        delta_primed=rel(dp, delta_rhs(fld, geom, o, True)),
        splitting=_mx(lhs_split - rhs_split) / max(_mx(lhs_split), _mx(rhs_split), floor),
    )


def splitting_rules(fld: SpinorField, geom: Geometry) -> dict[str, float]:
    """2 nabla_[C^{A'} nabla_A]A' = M_AC box and 2 nabla_A'^[C nabla^A]A' = M^CA box."""
    d2 = second_derivative(fld, geom).components
    o = d2.order
    rest = _idx(len(fld.slots))
    c = geom.conn
    M, Mu = _jet(c.metric.lower, o), _jet(c.metric.upper, o)
    s_dn = c.up_down.truncate(o)  # S^a_{AA'}
    s_up = c.up_up.truncate(o)  # S^{aAA'}
    s_cu = cf.einsum("aMP,MC->aCP", s_up, M)  # S_C^{aA'}
    s_pu = cf.einsum("CD,aDP->aCP", Mu, s_dn)  # S_{A'}^{aC}
    bx = box(fld, geom, second_derivative(fld, geom))
    floor = max(CANCELLATION_FLOOR * _mx(d2), RESIDUAL_FLOOR)
    t = cf.einsum(f"aCP,bAP,ab{rest}->AC{rest}", s_cu, s_dn, d2)
    lhs = t - cf.einsum(f"AC{rest}->CA{rest}", t)
    rhs = cf.einsum(f"AC,{rest}->AC{rest}", M, bx)
    u = cf.einsum(f"aCP,bAP,ab{rest}->CA{rest}", s_pu, s_up, d2)
    lhs_u = u - cf.einsum(f"CA{rest}->AC{rest}", u)
    rhs_u = cf.einsum(f"CA,{rest}->CA{rest}", Mu, bx)
    return {
        "rule_lower": _mx(lhs - rhs) / max(_mx(lhs), _mx(rhs), floor),
        "rule_upper": _mx(lhs_u - rhs_u) / max(_mx(lhs_u), _mx(rhs_u), floor),
    }


def delta_antisymmetry(geom: Geometry) -> float:
    """Delta^{A[C} phi_A^{B]} vanishes for the photon field of the geometry."""
    b = cv.curvature_bundle(geom)
    mixed = raise_all(b.phi, geom, [1])
    fld = _field(mixed, ("s_", "s^"), geom)
    d2 = second_derivative(fld, geom).components
    o = d2.order
    Pu, _ = delta_projectors(geom)
    du = cf.einsum("XYab,abAB->XYAB", Pu.truncate(o), d2)
    up = delta_upper(du, geom)  # Delta^{XY} phi_A^B
    t = cf.einsum("AYAB->YB", up)
    anti = (t - cf.einsum("YB->BY", t)) * 0.5
    return _mx(anti) / max(_mx(t), CANCELLATION_FLOOR * _mx(d2), RESIDUAL_FLOOR)


def random_field(slots, dweight: DensityWeight, formalism: str, point, order: int, rng: np.random.Generator) -> SpinorField:
    """A field with random Taylor coefficients (analytic near the point)."""
    slots = sa.parse_slots(slots)
    shape = tuple(4 if s[0] == "w" else 2 for s in slots)
    size = cf.jet_size(order)
    coeffs = rng.normal(size=shape + (size,)) + 1j * rng.normal(size=shape + (size,))
    return SpinorField(Jet(coeffs, order), slots, dweight, formalism)


RANDOM_VALENCES = (
    ((), DensityWeight(1, 0, 0, 0)),
    (("s^",), DensityWeight(0, 0, 0, 0)),
    (("s_",), DensityWeight(0, 0, 0, 0)),
    (("p^",), DensityWeight(0, -1, 0, 0)),
    (("s_", "s_"), DensityWeight(-1, 0, 0, 0)),
    (("s^", "p_"), DensityWeight(0, 0, 1, 0)),
    (("w^",), DensityWeight(0, 0, 0, 0)),
    (("w_", "s^"), DensityWeight(0.5, 0, 0, 0)),
    (("s_", "p_", "p^"), DensityWeight(-0.5, 0.5, 0, 0)),
    (("w^", "w_", "s^", "p^"), DensityWeight(2, -1, 1, 0)),
)


def random_commutator_suite(geom: Geometry, count: int = 10, seed: int = 0) -> list[CommutatorReport]:
    rng = np.random.default_rng(seed)
    out = []
    for k in range(count):
        slots, w = RANDOM_VALENCES[k % len(RANDOM_VALENCES)]
        fld = random_field(slots, w, geom.formalism, geom.point, geom.order, rng)
        out.append(commutator_check(fld, geom))
    return out


def hermitian_delta_residual(geom: Geometry, rng: np.random.Generator | None = None) -> float:
    """2 Re(S_a^{A}{}_{B'} Delta_AB u^{BB'}) = R_ab u^b for a real world vector u."""
    rng = rng or np.random.default_rng(1)
    o = geom.order
    size = cf.jet_size(o)
    u = Jet(rng.normal(size=(4, size)).astype(complex), o)
    c = geom.conn
    u_sp = cf.einsum("bBP,b->BP", c.up_spin, u)
    w = sa.invariant_weight(("s^", "p^"), geom.formalism)
    fld = SpinorField(u_sp, ("s^", "p^"), w, geom.formalism)
    d2 = second_derivative(fld, geom).components
    oo = d2.order
    Pu, _ = delta_projectors(geom)
    du = cf.einsum("ABab,abCQ->ABCQ", Pu.truncate(oo), d2)
    sig = cf.einsum("aAC,CB->aAB", c.up_spin, c.metric.lower_bar).truncate(oo)
    lhs = cf.einsum("aAQ,ABBQ->a", sig, du)
    lhs = (lhs + lhs.conj())
    R = riemann_world(geom.world).truncate(oo)
    ric = cf.einsum("ahbh->ab", R)
    rhs = cf.einsum("ab,b->a", ric, u.truncate(oo))
    return _mx(lhs - rhs) / max(_mx(lhs), _mx(rhs), CANCELLATION_FLOOR * _mx(d2), RESIDUAL_FLOOR)


# ---------------------------------------------------------------------------
# fields built from the curvature bundle


def _field(comps, slots, geom, weight=None) -> SpinorField:
    slots = sa.parse_slots(slots)
    w = sa.invariant_weight(slots, geom.formalism) if weight is None else weight
    return SpinorField(comps, slots, w, geom.formalism)


def beta_spinor(geom: Geometry, upper: bool = True) -> Jet:
    """beta^{AA'} (or beta_{AA'}) as [A, A']; zero in the epsilon formalism."""
    c = geom.conn
    beta = geom.spin.beta if geom.spin.beta is not None else Jet.constant(np.zeros(4), geom.spin.trace.order)
    obj = c.up_up if upper else c.up_down
    return cf.einsum("a,aAP->AP", beta, obj.truncate(beta.order))


@dataclass(frozen=True)
class UpsilonScalars:
    P: complex
    G: complex
    beta_sq: complex

    @property
    def P_bar(self):
        return np.conj(self.P)

    @property
    def G_bar(self):
        return np.conj(self.G)


def upsilon_jets(geom: Geometry) -> tuple[Jet, Jet]:
    """(Upsilon_P, Upsilon_G) as jets; both vanish in the epsilon formalism."""
    o = geom.spin.trace.order - 1
    if geom.formalism == sa.EPSILON:
        z = Jet.constant(0.0, o)
        return z, z
    beta = geom.spin.beta
    g_inv = geom.g_inv
    bsq = cf.einsum("ab,a,b->", g_inv.truncate(beta.order), beta, beta).truncate(o)
    phase = _field(geom.phase, (), geom, sa.ZERO_WEIGHT)
    box_phase = box(phase, geom)
    pot = _field(geom.potential, ("w_",), geom, sa.ZERO_WEIGHT)
    dpot = covariant_derivative(pot, geom).components
    div = cf.einsum("ab,ab->", g_inv.truncate(dpot.order), dpot)
    ups_p = bsq + (box_phase.truncate(o) + div.truncate(o) * 2.0) * 1j
    ups_g = (bsq + ups_p) * 2.0
    return ups_p, ups_g


def upsilon(geom: Geometry) -> UpsilonScalars:
    if geom.formalism == sa.EPSILON:
        return UpsilonScalars(0j, 0j, 0j)
    p, g = upsilon_jets(geom)
    beta = geom.spin.beta
    bsq = complex(np.einsum("ab,a,b->", geom.g_inv.value, beta.value, beta.value))
    return UpsilonScalars(complex(p.value), complex(g.value), bsq)


def _beta_dot_nabla(geom: Geometry, d1: Jet, nrest: int) -> Jet:
    """beta^h nabla_h f from a first derivative stored [h, ...]."""
    beta = geom.spin.beta
    o = d1.order
    rest = _idx(nrest)
    bu = cf.einsum("ab,b->a", geom.g_inv.truncate(beta.order), beta).truncate(o)
    return cf.einsum(f"h,h{rest}->{rest}", bu, d1)


def raise_all(comps: Jet, geom: Geometry, axes: Sequence[int], primed: bool = False) -> Jet:
    """Raise the given unprimed (or primed) axes with M^{AB}."""
    m = geom.conn.metric
    up = _jet(m.upper_bar if primed else m.upper, comps.order)
    out = comps
    n = comps.ndim
    for ax in axes:
        idx = list(_idx(n))
        src = idx.copy()
        src[ax] = "z"
        out = cf.einsum(f"{idx[ax]}z,{''.join(src)}->{''.join(idx)}", up, out)
    return out


def lower_all(comps: Jet, geom: Geometry, axes: Sequence[int], primed: bool = False) -> Jet:
    m = geom.conn.metric
    lo = _jet(m.lower_bar if primed else m.lower, comps.order)
    out = comps
    n = comps.ndim
    for ax in axes:
        idx = list(_idx(n))
        src = idx.copy()
        src[ax] = "z"
        out = cf.einsum(f"z{idx[ax]},{''.join(src)}->{''.join(idx)}", lo, out)
    return out


# ---------------------------------------------------------------------------
# massless field equations


def _require_vacuum(geom: Geometry, what: str):
    if not geom.vacuum:
        raise PreconditionError(f"{what} needs a vacuum scenario (trace-free Ricci part must vanish)")


def photon_divergence(geom: Geometry) -> dict[str, tuple[float, float]]:
    """nabla^{AB'} phi_AB, plain and with the beta-term of the gamma formalism."""
    b = cv.curvature_bundle(geom)
    phi = _field(b.phi, ("s_", "s_"), geom)
    d = covariant_derivative(phi, geom).components  # [a, A, B]
    o = d.order
    div = cf.einsum("aAP,aAB->PB", geom.conn.up_up.truncate(o), d)
    h = _mx(d)
    out = {"plain": _terms(div, hint=h)}
    if geom.formalism == sa.GAMMA:
        bphi = cf.einsum("AP,AB->PB", beta_spinor(geom).truncate(o), b.phi.truncate(o)) * 1j
        out["beta_form"] = _terms(div, -bphi, hint=h)
    else:
        out["beta_form"] = out["plain"]
    # mixed form nabla^{AB'} phi_A^B is invariant in both formalisms
    mixed = raise_all(b.phi, geom, [1])
    dm = covariant_derivative(_field(mixed, ("s_", "s^"), geom), geom).components
    out["mixed"] = _terms(cf.einsum("aAP,aAB->PB", geom.conn.up_up.truncate(dm.order), dm), hint=_mx(dm))
    return out


def _riemann_gradient(geom: Geometry) -> float:
    """|d R_abc^d|: the size at which Psi and Xi derivatives cancel."""
    R = riemann_world(geom.world)
    return _mx(R.grad()) if R.order >= 1 else 0.0


def graviton_divergence(geom: Geometry) -> tuple[float, float]:
    """nabla^{AA'} Psi_AB^{CD} (vacuum only)."""
    _require_vacuum(geom, "the Weyl-spinor field equation")
    b = cv.curvature_bundle(geom)
    psi_m = raise_all(b.Psi, geom, [2, 3])
    d = covariant_derivative(_field(psi_m, ("s_", "s_", "s^", "s^"), geom), geom).components
    o = d.order
    div = cf.einsum("aAP,aABCD->PBCD", geom.conn.up_up.truncate(o), d)
    return _terms(div, hint=max(_mx(d), _riemann_gradient(geom)))


def contracted_bianchi(geom: Geometry) -> tuple[float, float]:
    """(-8) nabla^{AA'} Xi_{AA'BB'} = nabla_{BB'} R with R = 8 chi."""
    b = cv.curvature_bundle(geom)
    d = covariant_derivative(_field(b.Xi, ("s_", "s_", "p_", "p_"), geom), geom).components
    o = d.order
    lhs = cf.einsum("aAP,aABPQ->BQ", geom.conn.up_up.truncate(o), d) * (-8.0)
    dchi = (b.chi * 8.0).grad().truncate(o)
    rhs = cf.einsum("a,aBQ->BQ", dchi, geom.conn.up_down.truncate(o))
    return _terms(lhs, -rhs, hint=8.0 * max(_mx(d), _riemann_gradient(geom)))


def massless_field_residual(scenario, which: str, formalism: str, points=None, order: int = 4) -> dict[str, WaveResidualReport]:
    """Field-equation residuals for the photon ("photon") or Weyl spinor ("graviton")."""
    from .connection import build_geometry

    points = scenario.probe_points() if points is None else points
    if which == "graviton" and not getattr(scenario, "vacuum", False):
        raise PreconditionError("the Weyl-spinor field equation needs a vacuum scenario")
    acc: dict[str, list] = {}
    for p in points:
        geom = build_geometry(scenario, p, formalism, order)
        if which == "photon":
            for k, v in photon_divergence(geom).items():
                acc.setdefault(f"photon_{k}", []).append(v)
        elif which == "graviton":
            acc.setdefault("graviton_divergence", []).append(graviton_divergence(geom))
        elif which == "contracted_bianchi":
            acc.setdefault("contracted_bianchi", []).append(contracted_bianchi(geom))
        else:
            raise UsageError(f"unknown field equation {which!r}")
    return {k: WaveResidualReport.collect(k, formalism, v) for k, v in acc.items()}


# ---------------------------------------------------------------------------
# wave equations


def _second(fld: SpinorField, geom: Geometry):
    d1 = covariant_derivative(fld, geom)
    d2 = covariant_derivative(d1, geom)
    return d1.components, d2.components


def _box_from(d2: Jet, geom: Geometry, n: int) -> Jet:
    rest = _idx(n)
    return cf.einsum(f"ab,ab{rest}->{rest}", geom.g_inv.truncate(d2.order), d2)


def photon_wave_terms(geom: Geometry, form: str) -> list[Jet]:
    """Terms of the photon wave equation in the requested index form.

    ``mixed``: (box + 8/3 chi) phi_A^B + 2 Psi_AD^{BC} phi_C^D.
    ``covariant``: (box [- 2 i beta.nabla - Ups_P] + 8/3 chi) phi_AB - 2 Psi_AB^{CD} phi_CD.
    ``contravariant``: (box [+ 2 i beta.nabla - conj Ups_P] + 8/3 chi) phi^AB - 2 Psi^AB_CD phi^CD.
    The bracketed pieces are present in the gamma formalism only.
    """
    b = cv.curvature_bundle(geom)
    gam = geom.formalism == sa.GAMMA
    if form == "mixed":
        comps = raise_all(b.phi, geom, [1])
        fld = _field(comps, ("s_", "s^"), geom)
    elif form == "covariant":
        comps = b.phi
        fld = _field(comps, ("s_", "s_"), geom)
    elif form == "contravariant":
        comps = raise_all(b.phi, geom, [0, 1])
        fld = _field(comps, ("s^", "s^"), geom)
    else:
        raise UsageError(f"unknown photon form {form!r}")
    d1, d2 = _second(fld, geom)
    o = d2.order
    bx = _box_from(d2, geom, 2)
    chi = b.chi.truncate(o)
    c = comps.truncate(o)
    terms = [bx, cf.einsum(",AB->AB", chi, c) * (8.0 / 3.0)]
    psi = b.Psi.truncate(o)
    if form == "mixed":
        psi_m = raise_all(psi, geom, [2, 3])  # Psi_AD^{BC}
        terms.append(cf.einsum("ADBC,CD->AB", psi_m, c) * 2.0)
    elif form == "covariant":
        psi_m = raise_all(psi, geom, [2, 3])
        terms.append(-cf.einsum("ABCD,CD->AB", psi_m, c) * 2.0)
    else:
        psi_m = raise_all(psi, geom, [0, 1])  # Psi^AB_CD
        terms.append(-cf.einsum("ABCD,CD->AB", psi_m, c) * 2.0)
    if gam and form != "mixed":
        ups_p, _ = upsilon_jets(geom)
        bn = _beta_dot_nabla(geom, d1.truncate(o), 2)
        if form == "covariant":
            terms += [bn * (-2j), -cf.einsum(",AB->AB", ups_p.truncate(o), c)]
        else:
            terms += [bn * 2j, -cf.einsum(",AB->AB", ups_p.truncate(o).conj(), c)]
    return Terms(terms, _mx(d2))


def _psi_square(psi: Jet, geom: Geometry) -> Jet:
    """Psi_MN(AB Psi_CD)^MN."""
    up = raise_all(psi, geom, [2, 3])  # Psi_CD^{MN}
    q = cf.einsum("MNAB,CDMN->ABCD", psi, up)
    return sa.symmetrize(q, (0, 1, 2, 3))


def graviton_wave_terms(geom: Geometry, form: str) -> list[Jet]:
    """Terms of the vacuum Weyl-spinor wave equation.

    ``covariant``: (box [- 4 i beta.nabla - Ups_G] + 4 chi) Psi_ABCD - 6 Psi_MN(AB Psi_CD)^MN.
    ``mixed``: (box + 4 chi) Psi_AB^CD - 6 Psi_MN^(CD Psi^EL)MN M_EA M_LB.
    ``contravariant``: (box [+ 4 i beta.nabla - conj Ups_G] + 4 chi) Psi^ABCD - 6 Psi_MN^(AB Psi^CD)MN.
    """
    _require_vacuum(geom, "the Weyl-spinor wave equation")
    b = cv.curvature_bundle(geom)
    gam = geom.formalism == sa.GAMMA
    if form == "covariant":
        comps = b.Psi
        fld = _field(comps, ("s_",) * 4, geom)
    elif form == "mixed":
        comps = raise_all(b.Psi, geom, [2, 3])
        fld = _field(comps, ("s_", "s_", "s^", "s^"), geom)
    elif form == "contravariant":
        comps = raise_all(b.Psi, geom, [0, 1, 2, 3])
        fld = _field(comps, ("s^",) * 4, geom)
    else:
        raise UsageError(f"unknown graviton form {form!r}")
    if comps.order < 2:
        raise InsufficientOrderError("the graviton wave equation needs geometry jets of order 4")
    d1, d2 = _second(fld, geom)
    o = d2.order
    bx = _box_from(d2, geom, 4)
    chi = b.chi.truncate(o)
    c = comps.truncate(o)
    terms = [bx, cf.einsum(",ABCD->ABCD", chi, c) * 4.0]
    sq = _psi_square(b.Psi.truncate(o), geom)  # all lower
    if form == "covariant":
        terms.append(-sq * 6.0)
    elif form == "mixed":
        terms.append(-raise_all(sq, geom, [2, 3]) * 6.0)
    else:
        terms.append(-raise_all(sq, geom, [0, 1, 2, 3]) * 6.0)
    if gam and form != "mixed":
        _, ups_g = upsilon_jets(geom)
        bn = _beta_dot_nabla(geom, d1.truncate(o), 4)
        if form == "covariant":
            terms += [bn * (-4j), -cf.einsum(",ABCD->ABCD", ups_g.truncate(o), c)]
        else:
            terms += [bn * 4j, -cf.einsum(",ABCD->ABCD", ups_g.truncate(o).conj(), c)]
    # Psi is the symmetric part of X, so its products cancel at the size of X
    x = _mx(b.X)
    return Terms(terms, max(_mx(d2), 4.0 * _mx(b.chi) * x, 6.0 * x * x))


def potential_wave_terms(geom: Geometry, with_ricci: bool = False) -> list[Jet]:
    """(box + R/4) Phi_AA' - nabla_AA' Theta, or box Phi + R_AA'^BB' Phi_BB' - nabla Theta."""
    c = geom.conn
    pot = geom.potential
    comps = cf.einsum("aAP,a->AP", c.up_down.truncate(pot.order), pot)
    fld = _field(comps, ("s_", "p_"), geom)
    d1, d2 = _second(fld, geom)
    o = d2.order
    bx = _box_from(d2, geom, 2)
    # Theta = nabla_{MM'} Phi^{MM'} from the world divergence
    wpot = _field(pot, ("w_",), geom, sa.ZERO_WEIGHT)
    dpot = covariant_derivative(wpot, geom).components
    theta = cf.einsum("ab,ab->", geom.g_inv.truncate(dpot.order), dpot)
    dtheta = cf.einsum("a,aAP->AP", theta.grad(), c.up_down.truncate(theta.order - 1)).truncate(o)
    b = cv.curvature_bundle(geom)
    cc = comps.truncate(o)
    if with_ricci:
        ric = cv.spinor_ricci(b, geom).truncate(o)  # [A, B, A', B']
        ric_m = raise_all(raise_all(ric, geom, [1]), geom, [3], primed=True)
        return Terms([bx, cf.einsum("ABPQ,BQ->AP", ric_m, cc), -dtheta], _mx(d2))
    return Terms([bx, cf.einsum(",AP->AP", b.chi.truncate(o) * 2.0, cc), -dtheta], _mx(d2))


EQUATIONS = {
    "photon_mixed": ("photon", "mixed"),
    "photon": ("photon", "covariant"),
    "photon_contravariant": ("photon", "contravariant"),
    "graviton": ("graviton", "covariant"),
    "graviton_mixed": ("graviton", "mixed"),
    "graviton_contravariant": ("graviton", "contravariant"),
    "potential": ("potential", False),
    "potential_ricci": ("potential", True),
}


def wave_terms(geom: Geometry, equation: str) -> Terms:
    if equation not in EQUATIONS:
        raise UsageError(f"unknown wave equation {equation!r}; choose from {sorted(EQUATIONS)}")
    kind, form = EQUATIONS[equation]
    if kind == "photon":
        return photon_wave_terms(geom, form)
    if kind == "graviton":
        return graviton_wave_terms(geom, form)
    return potential_wave_terms(geom, with_ricci=form)


def wave_residual(scenario, equation: str, formalism: str, points=None, order: int = 4) -> WaveResidualReport:
    """Relative residual of a wave equation over probe points."""
    from .connection import build_geometry

    if equation not in EQUATIONS:
        raise UsageError(f"unknown wave equation {equation!r}; choose from {sorted(EQUATIONS)}")
    if EQUATIONS[equation][0] == "graviton" and not getattr(scenario, "vacuum", False):
        raise PreconditionError("graviton wave equations need a vacuum scenario")
    points = scenario.probe_points() if points is None else points
    items = []
    for p in points:
        geom = build_geometry(scenario, p, formalism, order)
        items.append(wave_terms(geom, equation).evaluate())
    return WaveResidualReport.collect(equation, formalism, items)


def interchange_agreement(geom: Geometry, kind: str = "photon") -> float:
    """Raised covariant residual against the directly computed contravariant one."""
    if kind == "photon":
        cov = photon_wave_terms(geom, "covariant")
        con = photon_wave_terms(geom, "contravariant")
        axes = [0, 1]
    else:
        cov = graviton_wave_terms(geom, "covariant")
        con = graviton_wave_terms(geom, "contravariant")
        axes = [0, 1, 2, 3]
    rc = sum(cov[1:], cov[0])
    rk = sum(con[1:], con[0])
    raised = raise_all(rc, geom, axes)
    scale = max(cov.evaluate()[1], con.evaluate()[1], RESIDUAL_FLOOR)
    return _mx(raised - rk) / scale


# ---------------------------------------------------------------------------
# Dirac fields


@dataclass(frozen=True)
class DiracPair:
    """psi^A and chi_A' given as functions of coordinate jets, with rest mass m."""

    psi_fn: Callable
    chi_fn: Callable
    mass: float

    @property
    def mu(self) -> float:
        return self.mass / math.sqrt(2.0)


def plane_wave_pair(momentum: Sequence[float], spinor: Sequence[complex], formalism_conn=None) -> DiracPair:
    """Flat-space plane wave psi^A = u^A exp(-i p.x), chi_A' = p_AA' u^A / mu exp(-i p.x).

    ``momentum`` are the covariant components p_a on the Minkowski chart and
    ``mass = sqrt(p.p)``; the connecting object is the identity-tetrad one.
    """
    p = np.asarray(momentum, dtype=float)
    eta = np.diag([1.0, -1.0, -1.0, -1.0])
    p2 = float(p @ eta @ p)
    if p2 < 0:
        raise UsageError("plane-wave momentum must be timelike or null")
    mass = math.sqrt(p2)
    u = np.asarray(spinor, dtype=complex)
    conn = formalism_conn or sa.connecting_from_tetrad(np.eye(4), eta, sa.EPSILON)
    p_sp = np.einsum("a,aAP->AP", p, sa.value(conn.up_down))  # p_{AA'} = S^a_{AA'} p_a
    mu = mass / math.sqrt(2.0)
    v = np.einsum("AP,A->P", p_sp, u) / mu if mu > 0 else np.zeros(2, dtype=complex)

    def phase(x):
        arg = x[0] * p[0] + x[1] * p[1] + x[2] * p[2] + x[3] * p[3]
        return cf.exp(arg * (-1j))

    return DiracPair(lambda x: [phase(x) * u[0], phase(x) * u[1]], lambda x: [phase(x) * v[0], phase(x) * v[1]], mass)


def _dirac_fields(pair: DiracPair, geom: Geometry):
    x = Jet.variables(geom.point, geom.order)
    psi = cf.stack(pair.psi_fn(x), order=geom.order)
    chi = cf.stack(pair.chi_fn(x), order=geom.order)
    f_psi = _field(psi, ("s^",), geom)
    f_chi = _field(chi, ("p_",), geom)
    return f_psi, f_chi


def dirac_terms(pair: DiracPair, geom: Geometry) -> dict[str, Terms]:
    """Terms of the first-order equations, wave equations and off-shell identities."""
    f_psi, f_chi = _dirac_fields(pair, geom)
    c = geom.conn
    mu = pair.mu
    m2 = pair.mass**2
    b = cv.curvature_bundle(geom)
    out = {}
    dpsi = covariant_derivative(f_psi, geom).components  # [a, A]
    dchi = covariant_derivative(f_chi, geom).components  # [a, A']
    o1 = dpsi.order
    out["first_psi"] = Terms(
        [cf.einsum("aAP,aA->P", c.up_down.truncate(o1), dpsi), f_chi.components.truncate(o1) * (1j * mu)],
        _mx(dpsi),
    )
    out["first_chi"] = Terms(
        [cf.einsum("aAP,aP->A", c.up_up.truncate(o1), dchi), f_psi.components.truncate(o1) * (1j * mu)],
        _mx(dchi),
    )
    # wave equations
    d2psi = covariant_derivative(covariant_derivative(f_psi, geom), geom).components
    d2chi = covariant_derivative(covariant_derivative(f_chi, geom), geom).components
    o2 = d2psi.order
    R = (b.chi * 8.0).truncate(o2)
    psi = f_psi.components.truncate(o2)
    chi = f_chi.components.truncate(o2)
    bpsi = _box_from(d2psi, geom, 1)
    bchi = _box_from(d2chi, geom, 1)
    mixed_phi = raise_all(b.phi.truncate(o2), geom, [0])  # phi^A_B
    mixed_phib = raise_all(b.phi_bar.truncate(o2), geom, [1], primed=True)  # phi_A'^B'
    gam = geom.formalism == sa.GAMMA
    coup_psi = cf.einsum("AB,B->A", mixed_phi, psi) * (-2j) if gam else psi * 0.0
    coup_chi = cf.einsum("AB,B->A", mixed_phib, chi) * 2j if gam else chi * 0.0
    hp, hc = _mx(d2psi), _mx(d2chi)
    out["wave_psi"] = Terms([bpsi, cf.einsum(",A->A", R * 0.25, psi), psi * m2, -coup_psi], hp)
    out["wave_chi"] = Terms([bchi, cf.einsum(",A->A", R * 0.25, chi), chi * m2, -coup_chi], hc)
    # off-shell identities: 2 nabla^{AA'} nabla_{BA'} psi^B = (box + R/4) psi^A - coupling
    dd_psi = cf.einsum("aAP,bBP,abB->A", c.up_up.truncate(o2), c.up_down.truncate(o2), d2psi)
    out["identity_psi"] = Terms([dd_psi * -2.0, bpsi, cf.einsum(",A->A", R * 0.25, psi), -coup_psi], hp)
    dd_chi = cf.einsum("aAP,bAQ,abQ->P", c.up_down.truncate(o2), c.up_up.truncate(o2), d2chi)
    out["identity_chi"] = Terms([dd_chi * -2.0, bchi, cf.einsum(",A->A", R * 0.25, chi), -coup_chi], hc)
    out["coupling_psi"] = Terms([coup_psi])
    out["coupling_chi"] = Terms([coup_chi])
    return out


def dirac_residual(pair: DiracPair, scenario, formalism: str, points=None, order: int = 3) -> dict[str, WaveResidualReport]:
    from .connection import build_geometry

    points = scenario.probe_points() if points is None else points
    acc: dict[str, list] = {}
    for p in points:
        geom = build_geometry(scenario, p, formalism, order)
        for k, terms in dirac_terms(pair, geom).items():
            if k.startswith("coupling"):
                acc.setdefault(k, []).append((_mx(terms[0]), 1.0))
            else:
                acc.setdefault(k, []).append(terms.evaluate())
    return {k: WaveResidualReport.collect(k, formalism, v) for k, v in acc.items()}


def metric_switch_residual(pair: DiracPair, geom: Geometry) -> float:
    """Delta_AB psi_C - gamma_MC Delta_AB psi^M = 2 i phi_AB psi_C (gamma formalism)."""
    f_psi, _ = _dirac_fields(pair, geom)
    low = lower_all(f_psi.components, geom, [0])
    f_low = _field(low, ("s_",), geom)
    _, du_up, _ = box_and_delta(f_psi, geom)
    _, du_low, _ = box_and_delta(f_low, geom)
    o = du_up.order
    lowered = cf.einsum("MC,ABM->ABC", _jet(geom.conn.metric.lower, o), du_up)
    b = cv.curvature_bundle(geom)
    rhs = cf.einsum("AB,C->ABC", b.phi.truncate(o), low.truncate(o)) * 2j
    if geom.formalism == sa.EPSILON:
        rhs = rhs * 0.0
    lhs = du_low - lowered
    return _mx(lhs - rhs) / max(_mx(du_low), _mx(lowered), _mx(rhs), RESIDUAL_FLOOR)


def upsilon_gauge_discrepancy(scenario, g, point, order: int = 4) -> float:
    """Upsilon_P and Upsilon_G before and after a gauge change of the inputs."""
    from .connection import build_geometry
    from .gauge import gauge_scenario

    a = upsilon(build_geometry(scenario, point, sa.GAMMA, order))
    b = upsilon(build_geometry(gauge_scenario(scenario, g), point, sa.GAMMA, order))
    scale = max(abs(a.P), abs(a.G), abs(b.P), abs(b.G), RESIDUAL_FLOOR)
    return max(abs(a.P - b.P), abs(a.G - b.G)) / scale
