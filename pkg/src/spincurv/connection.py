"""World and spin affinities, the covariant-derivative engine, constancy checks.

All geometry lives in :class:`Geometry`, built once per (scenario, formalism,
point).  Its fields are jets, so every derivative used later is exact.

Storage conventions
-------------------
* ``Gamma[a, b, c]`` is the Christoffel symbol with the derivative index
  first: ``nabla_a u^c = d_a u^c + Gamma[a, b, c] u^b``.
* ``theta[a, B, A]`` is the spin affinity: ``nabla_a zeta^A = d_a zeta^A +
  theta[a, B, A] zeta^B`` and ``nabla_a xi_A = d_a xi_A - theta[a, A, B] xi_B``.
  Primed slots use the complex conjugate.
* The contracted affinity is ``trace_a = d_a log R - 2 i A_a`` where ``R`` is
  ``|gamma|`` (gamma formalism) or the scenario amplitude ``|E|`` (epsilon
  formalism, 1 unless supplied) and ``A_a`` the electromagnetic potential.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import chart_fields as cf
from . import spin_algebra as sa
from .chart_fields import Jet
from .errors import ConfigurationError, InsufficientOrderError, SingularMetricError
from .spin_algebra import DensityWeight, SpinorField

DEFAULT_ORDER = 3
LIMIT_NOISE = 1e-12  # ladder differences below this are roundoff


# ---------------------------------------------------------------------------
# world affinity


@dataclass(frozen=True)
class WorldAffinity:
    Gamma: Jet  # [a, b, c]
    trace: Jet  # Gamma_{ab}^b
    det: Jet  # determinant of g_ab


def christoffel_jets(g: Jet, g_inv: Jet | None = None) -> WorldAffinity:
    if g.order < 1:
        raise InsufficientOrderError("Christoffel symbols need first metric derivatives")
    if g_inv is None:
        g_inv = cf.inv(g)
    dg = g.grad()  # [e, x, y] = d_e g_xy
    # Gamma_ab^c = 1/2 g^{cd} (d_a g_db + d_b g_da - d_d g_ab)
    lowered = cf.einsum("adb->abd", dg) + cf.einsum("bda->abd", dg) - cf.einsum("dab->abd", dg)
    christ = cf.einsum("cd,abd->abc", g_inv, lowered) * 0.5
    trace = cf.einsum("abb->a", christ)
    det = _det4(g)
    return WorldAffinity(christ, trace, det)


def _det4(g: Jet) -> Jet:
    """Determinant of a 4x4 jet matrix by cofactor expansion."""
    import itertools

    total = None
    for perm in itertools.permutations(range(4)):
        term = g[0, perm[0]] * g[1, perm[1]] * g[2, perm[2]] * g[3, perm[3]]
        if sa._perm_sign(perm) < 0:
            term = -term
        total = term if total is None else total + term
    return total


def riemann_world(world: WorldAffinity) -> Jet:
    """R[a, b, c, d] with [nabla_a, nabla_b] v^d = R[a, b, c, d] v^c."""
    G = world.Gamma
    dG = G.grad()  # [e, a, b, c] = d_e Gamma_ab^c
    term = cf.einsum("abcd->abcd", dG) - cf.einsum("bacd->abcd", dG)
    quad = cf.einsum("aed,bce->abcd", G, G)
    return term + quad - cf.einsum("bacd->abcd", quad)


def ricci_world(riemann: Jet) -> Jet:
    """R_ab = R_{ahb}^h."""
    return cf.einsum("ahbh->ab", riemann)


# ---------------------------------------------------------------------------
# spin affinity


@dataclass(frozen=True)
class SpinAffinity:
    formalism: str
    theta: Jet  # [a, B, A]
    theta_bar: Jet
    real_part: Jet  # theta_a (gamma) or Pi_a (epsilon)
    potential: Jet  # Phi_a or phi_a
    trace: Jet  # theta[a, B, B]
    beta: Jet | None = None  # d_a Phi + 2 Phi_a, gamma formalism only


def traceless_affinity(conn: sa.ConnectingObjects, world: WorldAffinity) -> Jet:
    """Trace-free part of the spin affinity fixed by covariant constancy of S."""
    S = conn.up_spin
    dS = S.grad()  # [a, b, A, A']
    X = cf.einsum("abc,cAP->abAP", world.Gamma, S) - dS
    XS = cf.einsum("abAP,bCP->aAC", X, conn.up_down)  # 2 theta_C^A + delta tr
    tr = cf.einsum("aAA->a", XS)
    eye = np.eye(2)
    traceless = XS - cf.einsum("a,AC->aAC", tr, eye) * 0.5
    return cf.einsum("aAC->aCA", traceless) * 0.5


def spin_affinity(
    conn: sa.ConnectingObjects,
    world: WorldAffinity,
    potential: Jet,
    amplitude,
    phase=None,
) -> SpinAffinity:
    """Assemble the full spin affinity.

    ``amplitude`` is ``|gamma|`` in the gamma formalism and ``|E|`` in the
    epsilon formalism (a jet, or None for the constant 1).  ``phase`` is the
    polar angle of gamma (gamma formalism only, used for ``beta``).
    """
    tau = traceless_affinity(conn, world)
    order = tau.order
    pot = potential.truncate(order) if isinstance(potential, Jet) else Jet.constant(potential, order)
    if amplitude is None or not isinstance(amplitude, Jet):
        dlog = Jet.constant(np.zeros(4), order)
    else:
        dlog = cf.log(amplitude).grad().truncate(order)
    trace = dlog - pot * 2j
    theta = tau + cf.einsum("a,BA->aBA", trace, np.eye(2)) * 0.5
    beta = None
    if conn.formalism == sa.GAMMA:
        if phase is None:
            dphase = Jet.constant(np.zeros(4), order)
        elif isinstance(phase, Jet):
            dphase = phase.grad().truncate(order)
        else:
            dphase = Jet.constant(np.zeros(4), order)
        beta = dphase + pot * 2.0
    return SpinAffinity(conn.formalism, theta, theta.conj(), -dlog, pot, trace, beta)


def closed_form_symmetric_affinity(conn: sa.ConnectingObjects, world: WorldAffinity, g: Jet) -> Jet:
    """theta_a(BC) from the metric-derivative formula, as an independent check.

    theta_a(BC) = Theta_aBC + 1/2 S_h(B^{B'} d_a S^h_C)B', with
    2 Theta_aBC = S_a^{..} ... written here with the derivative of g_ab.
    Returns an array [a, B, C] (both spinor indices down, symmetrised).
    """
    M = conn.metric.lower
    # S_{hB}^{B'} = S_h^{AB'} M_AB
    s_mixed = cf.einsum("hAP,AB->hBP", conn.up_spin, M)
    # S^h_{CB'} with the primed index lowered already: up_down[h, C, B']
    d_down = conn.up_down.grad()  # [a, h, C, B']
    term = cf.einsum("hBP,ahCP->aBC", s_mixed, d_down) * 0.5
    # Theta_aBC: 2 Theta_{AA'BC} = S_AA'^a S_(B^{bD'} d_C)D' g_ab
    dg = g.grad()  # [c, a, b]
    # d_{CD'} = S^c_{CD'} d_c
    dspin = cf.einsum("cCP,cab->abCP", conn.up_down, dg)  # d_{CD'} g_ab
    s_bD = cf.einsum("bMP,MB->bBP", conn.up_spin, M)  # S_B^{bD'}
    theta_spin = cf.einsum("bBP,abCP->aBC", s_bD, dspin) * 0.5
    total = theta_spin + term
    return sa.symmetrize(total, (1, 2))


# ---------------------------------------------------------------------------
# geometry pipeline


@dataclass
class Geometry:
    """Every jet-valued object needed at one probe point in one formalism."""

    formalism: str
    point: tuple
    order: int
    g: Jet
    g_inv: Jet
    tetrad: Jet
    gamma: object  # jet (gamma formalism) or 1.0
    gamma_abs: object
    phase: object
    amplitude: object  # |E| for epsilon formalism
    potential: Jet
    world: WorldAffinity
    conn: sa.ConnectingObjects
    spin: SpinAffinity
    lam: float = 0.0
    kappa: float = 1.0
    vacuum: bool = False
    cache: dict = field(default_factory=dict)

    @property
    def metric(self) -> sa.SpinMetric:
        return self.conn.metric

    def weight_of_eps(self) -> DensityWeight:
        return DensityWeight(-1, 0, 0, 0)


def _stack(values, order):
    return cf.stack(values, order=order)


def _as_jet(v, order):
    return v.truncate(order) if isinstance(v, Jet) else Jet.constant(v, order)


def build_geometry(scenario, point: Sequence[float], formalism: str, order: int = DEFAULT_ORDER, gauge=None) -> Geometry:
    """Evaluate a scenario at one point and assemble the full affine structure.

    ``gauge`` (a :class:`~spincurv.gauge.GaugeTransform`) transforms the
    inputs before anything is computed: gamma -> Delta gamma, potential ->
    potential - d Lambda, |E| -> rho |E|.  The tetrad is gauge independent.
    """
    sa.check_formalism(formalism)
    if order < 2:
        raise InsufficientOrderError("the pipeline needs jets of order at least 2")
    point = tuple(float(v) for v in point)
    x = Jet.variables(point, order)
    with np.errstate(all="raise"):
        try:
            g = _stack(scenario.metric_fn(x), order)
            tetrad = _stack(scenario.tetrad_fn(x), order)
            potential = _stack(scenario.potential_fn(x), order)
            gabs = _as_jet(scenario.gamma_abs_fn(x), order)
            phase = _as_jet(scenario.gamma_phase_fn(x), order)
            amp = _as_jet(scenario.amplitude_fn(x), order)
        except (FloatingPointError, ZeroDivisionError) as exc:
            from .errors import EvaluationError

            raise EvaluationError(f"scenario not evaluable ({exc})", point=point) from exc
    if gauge is not None:
        x1 = Jet.variables(point, order + 1)
        lam1 = _as_jet(gauge.lambda_fn(x1), order + 1)
        rho = _as_jet(gauge.rho_fn(x), order)
        if np.any(rho.value.real <= 0):
            raise ConfigurationError("gauge modulus must be positive")
        potential = potential - lam1.grad()
        gabs = gabs * rho
        phase = phase + lam1.truncate(order) * 2.0
        amp = amp * rho
    if abs(complex(gabs.value)) == 0:
        raise SingularMetricError("gamma vanishes", point=point)
    g_inv = cf.inv(g)
    world = christoffel_jets(g, g_inv)
    if formalism == sa.GAMMA:
        gamma = gabs * cf.exp(phase * 1j)
        conn = sa.connecting_from_tetrad(tetrad, g, formalism, gamma, g_inv)
        spin = spin_affinity(conn, world, potential, gabs, phase)
    else:
        gamma = 1.0
        conn = sa.connecting_from_tetrad(tetrad, g, formalism, 1.0, g_inv)
        spin = spin_affinity(conn, world, potential, amp)
    return Geometry(
        formalism=formalism,
        point=point,
        order=order,
        g=g,
        g_inv=g_inv,
        tetrad=tetrad,
        gamma=gamma,
        gamma_abs=gabs,
        phase=phase,
        amplitude=amp,
        potential=potential,
        world=world,
        conn=conn,
        spin=spin,
        lam=float(getattr(scenario, "lam", 0.0)),
        kappa=float(getattr(scenario, "kappa", 1.0)),
        vacuum=bool(getattr(scenario, "vacuum", False)),
    )


def christoffel(scenario, points, order: int = 2) -> list[WorldAffinity]:
    """World affinity at each probe point (jets of order ``order - 1``)."""
    out = []
    for p in points:
        x = Jet.variables(tuple(p), order)
        g = _stack(scenario.metric_fn(x), order)
        if abs(np.linalg.det(g.value)) < 1e-300:
            raise SingularMetricError("degenerate metric", point=tuple(p))
        out.append(christoffel_jets(g))
    return out


# ---------------------------------------------------------------------------
# covariant derivative engine


def _letters(n, skip=""):
    pool = [c for c in "bcdefghijklmnopqrstuvwxyBCDEFGHIJKLMNOPQRSTUVWXY" if c not in skip]
    return pool[:n]


def covariant_derivative(fld: SpinorField, geom: Geometry, spin: SpinAffinity | None = None) -> SpinorField:
    """nabla_a of a field of any valence and density weight.

    The new lower world index is placed first.  ``spin`` overrides the
    geometry's affinity (used for shift-invariance tests).
    """
    if fld.dweight is None:
        raise ConfigurationError("density weight metadata missing")
    spin = spin or geom.spin
    comps = fld.components
    if not isinstance(comps, Jet):
        comps = Jet.constant(comps, geom.order)
    if comps.order < 1:
        raise InsufficientOrderError("field jet order too low for a covariant derivative")
    G = geom.world.Gamma
    th = spin.theta
    thb = spin.theta_bar
    n = len(fld.slots)
    idx = _letters(n, skip="aAz")
    base = "".join(idx)
    out = comps.grad()
    for k, slot in enumerate(fld.slots):
        kind, stair = slot
        mod = idx.copy()
        mod[k] = "z"
        src = "".join(mod)
        if kind == "w":
            if stair == "^":
                term = cf.einsum(f"az{idx[k]},{src}->a{base}", G, comps)
            else:
                term = -cf.einsum(f"a{idx[k]}z,{src}->a{base}", G, comps)
        else:
            aff = th if kind == "s" else thb
            if stair == "^":
                term = cf.einsum(f"az{idx[k]},{src}->a{base}", aff, comps)
            else:
                term = -cf.einsum(f"a{idx[k]}z,{src}->a{base}", aff, comps)
        out = out + term
    coeff = fld.dweight.connection_term(spin.trace, geom.world.trace)
    if coeff is not None:
        out = out - cf.einsum(f"a,{base}->a{base}", coeff, comps)
    return SpinorField(out, ("w_",) + fld.slots, fld.dweight, fld.formalism)


def nabla(fld: SpinorField, geom: Geometry) -> SpinorField:
    return covariant_derivative(fld, geom)


# ---------------------------------------------------------------------------
# constancy suite


def _mx(x) -> float:
    v = sa.value(x)
    return float(np.max(np.abs(v))) if np.size(v) else 0.0


def _rel(res, *refs) -> float:
    scale_ = max([_mx(r) for r in refs] + [1.0])
    return _mx(res) / scale_


def connecting_fields(geom: Geometry):
    """The four Hermitian connecting objects as fields with their weights."""
    conn = geom.conn
    eps = geom.formalism == sa.EPSILON
    w_up = DensityWeight(0, 0, 1 if eps else 0, 0)
    w_dn = DensityWeight(0, 0, -1 if eps else 0, 0)
    f = geom.formalism
    return {
        "S_a^AA'": SpinorField(conn.up_spin, ("w_", "s^", "p^"), w_up, f),
        "S^aAA'": SpinorField(conn.up_up, ("w^", "s^", "p^"), w_up, f),
        "S_aAA'": SpinorField(conn.down_down, ("w_", "s_", "p_"), w_dn, f),
        "S^a_AA'": SpinorField(conn.up_down, ("w^", "s_", "p_"), w_dn, f),
    }


def eps_field(geom: Geometry, primed: bool = False, upper: bool = False) -> SpinorField:
    eps = Jet.constant(sa.EPS, geom.order)
    kind = "p" if primed else "s"
    stair = "^" if upper else "_"
    w = 1 if upper else -1
    dw = DensityWeight(0, w, 0, 0) if primed else DensityWeight(w, 0, 0, 0)
    return SpinorField(eps, (kind + stair, kind + stair), dw, geom.formalism)


def metric_spinor_field(geom: Geometry) -> SpinorField:
    """M_AB as a field: a tensor in the gamma formalism, eps density otherwise."""
    if geom.formalism == sa.EPSILON:
        return eps_field(geom)
    lower = geom.conn.metric.lower
    return SpinorField(lower, ("s_", "s_"), sa.ZERO_WEIGHT, geom.formalism)


@dataclass
class ConstancyReport:
    formalism: str
    residuals: dict  # check id -> max relative residual over points

    def passed(self, tol: float = 1e-9) -> bool:
        return all(v < tol for v in self.residuals.values())


def constancy_residuals(geom: Geometry) -> dict[str, float]:
    """Covariant-constancy residuals at one point."""
    out = {}
    worst = 0.0
    for fld in connecting_fields(geom).values():
        d = covariant_derivative(fld, geom)
        worst = max(worst, _rel(d.components, fld.components.grad()))
    out["connecting_objects"] = worst
    e = eps_field(geom)
    out["eps_metric"] = _rel(covariant_derivative(e, geom).components)
    e_up = eps_field(geom, upper=True)
    out["eps_metric_upper"] = _rel(covariant_derivative(e_up, geom).components)
    ee = SpinorField(
        cf.einsum("AB,PQ->ABPQ", Jet.constant(sa.EPS, geom.order), sa.EPS),
        ("s_", "s_", "p_", "p_"),
        DensityWeight(-1, -1, 0, 0),
        geom.formalism,
    )
    out["eps_pair"] = _rel(covariant_derivative(ee, geom).components)
    gfield = SpinorField(geom.g, ("w_", "w_"), sa.ZERO_WEIGHT, geom.formalism)
    out["world_metric"] = _rel(covariant_derivative(gfield, geom).components, geom.g.grad())
    if geom.formalism == sa.GAMMA:
        gabs = SpinorField(geom.gamma_abs, (), DensityWeight(0, 0, 1, 0), geom.formalism)
        out["gamma_modulus"] = _rel(covariant_derivative(gabs, geom).components, geom.gamma_abs.grad())
        m = geom.conn.metric
        gg = cf.einsum("AB,PQ->ABPQ", m.lower, m.lower_bar)
        ggf = SpinorField(gg, ("s_", "s_", "p_", "p_"), sa.ZERO_WEIGHT, geom.formalism)
        out["gamma_pair"] = _rel(covariant_derivative(ggf, geom).components, gg.grad())
        # eigenvalue equation: nabla gamma_BC = i beta gamma_BC
        mf = metric_spinor_field(geom)
        d = covariant_derivative(mf, geom).components
        rhs = cf.einsum("a,BC->aBC", geom.spin.beta, mf.components) * 1j
        out["gamma_eigenvalue"] = _rel(d - rhs, d)
        # mu consistency: -4 theta_a = d_a log(mu sqrt(-g)), d log mu = S_h d S^h
        s_h = geom.conn.up_spin
        d_sh = geom.conn.up_down.grad()
        dlogmu = cf.einsum("hAP,ahAP->a", s_h, d_sh)
        res = geom.spin.real_part * (-4.0) - (dlogmu + geom.world.trace)
        out["mu_consistency"] = _rel(res, dlogmu, geom.world.trace)
    else:
        s_h = geom.conn.up_spin
        d_sh = geom.conn.up_down.grad()
        sds = cf.einsum("hAP,ahAP->a", s_h, d_sh)
        out["trace_condition"] = _rel(sds + geom.world.trace, sds)
    return out


def constancy_suite(scenario, formalism: str, points=None, order: int = 2) -> ConstancyReport:
    """Maximum constancy residuals over probe points."""
    if points is None:
        points = scenario.probe_points()
    agg: dict[str, float] = {}
    for p in points:
        geom = build_geometry(scenario, p, formalism, order=order)
        for k, v in constancy_residuals(geom).items():
            agg[k] = max(agg.get(k, 0.0), v)
    return ConstancyReport(formalism, agg)


# ---------------------------------------------------------------------------
# epsilon limit


@dataclass
class LimitReport:
    deltas: list
    differences: dict  # quantity -> list of max differences per delta
    slopes: dict  # quantity -> observed order in delta (two decimals)
    exact_at_zero: dict  # quantity -> difference at delta = 0
    correspondences: dict  # finite-gamma identities -> relative residual


def _limit_quantities(ge: Geometry, gg: Geometry) -> dict:
    from . import curvature as cv

    out = {}
    out["contracted_affinity"] = _mx(gg.spin.trace - ge.spin.trace)
    out["real_part"] = _mx(gg.spin.real_part - ge.spin.real_part)
    out["connecting_objects"] = _mx(gg.conn.up_spin - ge.conn.up_spin)
    we = cv.curvature_bundle(ge)
    wg = cv.curvature_bundle(gg)
    out["omega"] = _mx(wg.omega - we.omega)
    out["affinity"] = _mx(gg.spin.theta - ge.spin.theta)
    return out


def _with_gamma(scenario, abs_fn, phase_fn):
    return scenario.replace(gamma_abs_fn=abs_fn, gamma_phase_fn=phase_fn)


def epsilon_limit(
    scenario,
    points=None,
    deltas: Sequence[float] = (1e-3, 1e-4, 1e-5),
    shape_fn: Callable | None = None,
    phase_shape_fn: Callable | None = None,
    order: int = 3,
) -> LimitReport:
    """Carry the gamma formalism to the epsilon formalism as gamma -> 1.

    gamma = (1 + delta f(x)) exp(i delta h(x)); f and h default to smooth
    bounded functions of the coordinates.
    """
    if points is None:
        points = scenario.probe_points()[:3]
    f = shape_fn or (lambda x: cf.sin(x[0] * 0.7 + x[1] * 0.3) + 1.5)
    h = phase_shape_fn or (lambda x: cf.cos(x[2] * 0.5 + x[3] * 0.2))
    diffs: dict[str, list] = {}
    for d in deltas:
        scen_d = _with_gamma(scenario, lambda x, d=d: f(x) * d + 1.0, lambda x, d=d: h(x) * d)
        per = {}
        for p in points:
            ge = build_geometry(scenario, p, sa.EPSILON, order)
            gg = build_geometry(scen_d, p, sa.GAMMA, order)
            for k, v in _limit_quantities(ge, gg).items():
                per[k] = max(per.get(k, 0.0), v)
        for k, v in per.items():
            diffs.setdefault(k, []).append(v)
    slopes = {}
    for k, vals in diffs.items():
        vals = np.asarray(vals)
        if np.all(vals <= LIMIT_NOISE):
            # the quantity agrees to roundoff on every rung: exact convergence
            slopes[k] = float("inf")
        elif np.all(vals > 0):
            # observed order from the two finest rungs, to two decimals
            slope = np.log(vals[-2] / vals[-1]) / np.log(deltas[-2] / deltas[-1])
            slopes[k] = round(float(slope), 2)
        else:
            slopes[k] = float("inf")
    scen0 = _with_gamma(scenario, lambda x: 1.0, lambda x: 0.0)
    exact = {}
    for p in points:
        ge = build_geometry(scenario, p, sa.EPSILON, order)
        gg = build_geometry(scen0, p, sa.GAMMA, order)
        for k, v in _limit_quantities(ge, gg).items():
            exact[k] = max(exact.get(k, 0.0), v)
    corr = finite_gamma_correspondences(scenario, points, order=order)
    return LimitReport(list(deltas), diffs, slopes, exact, corr)


def finite_gamma_correspondences(scenario, points, gamma_value=2 * np.exp(0.3j), order: int = 3) -> dict:
    """Relations between the formalisms at a constant finite gamma."""
    from . import curvature as cv

    gabs = float(abs(gamma_value))
    ph = float(np.angle(gamma_value))
    scen_g = _with_gamma(scenario, lambda x: gabs, lambda x: ph)
    out = {"W_mixed": 0.0, "W_lowered": 0.0, "omega": 0.0, "omega_primed": 0.0, "riemann_spinor": 0.0, "symmetric_affinity": 0.0}
    for p in points:
        ge = build_geometry(scenario, p, sa.EPSILON, order)
        gg = build_geometry(scen_g, p, sa.GAMMA, order)
        be = cv.curvature_bundle(ge)
        bg = cv.curvature_bundle(gg)
        gam = gamma_value
        out["W_mixed"] = max(out["W_mixed"], _rel(bg.W - be.W, be.W))
        out["W_lowered"] = max(out["W_lowered"], _rel(bg.W_lower - be.W_lower * gam, be.W_lower))
        out["omega"] = max(out["omega"], _rel(bg.omega - be.omega * gam**2, be.omega * gam**2))
        out["omega_primed"] = max(
            out["omega_primed"], _rel(bg.omega_primed - be.omega_primed * abs(gam) ** 2, be.omega_primed * abs(gam) ** 2)
        )
        re = cv.spinor_riemann(be, ge)
        rg = cv.spinor_riemann(bg, gg)
        out["riemann_spinor"] = max(out["riemann_spinor"], _rel(rg - re * abs(gam) ** 4, re * abs(gam) ** 4))
        # symmetric affinity, both spinor indices down: gamma_a(BC) = gamma Gamma_a(BC)
        se = sa.symmetrize(cf.einsum("aBA,AC->aBC", ge.spin.theta, ge.metric.lower), (1, 2))
        sg = sa.symmetrize(cf.einsum("aBA,AC->aBC", gg.spin.theta, gg.metric.lower), (1, 2))
        out["symmetric_affinity"] = max(out["symmetric_affinity"], _rel(sg - se * gam, se * gam))
    return out
