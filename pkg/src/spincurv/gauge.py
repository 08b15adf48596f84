"""The diagonal Weyl gauge group and two-path covariance tests.

A gauge element is ``Lambda_A^B = sqrt(rho) exp(i Lambda) delta_A^B`` with
determinant ``D = rho exp(2 i Lambda)``.  Lower unprimed slots pick up
``sqrt(rho) exp(i Lambda)``, upper ones the inverse, primed slots the
conjugate, and densities the factor of their :class:`DensityWeight`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from . import chart_fields as cf
from . import spin_algebra as sa
from .chart_fields import Jet
from .errors import ConfigurationError

DISCREPANCY_FLOOR = 1e-12


def _const(v):
    return lambda x: v


@dataclass(frozen=True)
class GaugeTransform:
    rho_fn: Callable
    lambda_fn: Callable
    label: str = "gauge"

    @classmethod
    def identity(cls) -> "GaugeTransform":
        return cls(_const(1.0), _const(0.0), "identity")

    @classmethod
    def constant(cls, rho: float, lam: float) -> "GaugeTransform":
        if not rho > 0:
            raise ConfigurationError("gauge modulus must be positive")
        return cls(_const(float(rho)), _const(float(lam)), f"constant(rho={rho:g}, Lambda={lam:g})")

    @classmethod
    def from_spec(cls, spec) -> "GaugeTransform":
        return cls(spec.rho_fn, spec.lambda_fn, getattr(spec, "label", "gauge"))

    def compose(self, other: "GaugeTransform") -> "GaugeTransform":
        """Apply ``self`` first, then ``other``."""
        r1, r2, l1, l2 = self.rho_fn, other.rho_fn, self.lambda_fn, other.lambda_fn
        return GaugeTransform(
            lambda x: cf.as_jet(r1(x), x[0].order) * cf.as_jet(r2(x), x[0].order),
            lambda x: cf.as_jet(l1(x), x[0].order) + cf.as_jet(l2(x), x[0].order),
            f"{self.label}*{other.label}",
        )

    def jets(self, point: Sequence[float], order: int) -> tuple[Jet, Jet]:
        """(rho, Lambda) as jets of the given order at ``point``."""
        x = Jet.variables(tuple(float(v) for v in point), order)
        rho = cf.as_jet(self.rho_fn(x), order)
        lam = cf.as_jet(self.lambda_fn(x), order)
        if np.any(np.asarray(rho.value).real <= 0) or np.any(np.abs(np.asarray(rho.value).imag) > 0):
            raise ConfigurationError(f"gauge {self.label!r} has non-positive rho at {tuple(point)}")
        return rho, lam

    def determinant(self, point, order: int) -> Jet:
        rho, lam = self.jets(point, order)
        return rho * cf.exp(lam * 2j)

    def matrix(self, point, order: int) -> Jet:
        """Lambda_A^B as a 2x2 jet, stored [A, B]."""
        rho, lam = self.jets(point, order)
        lam_ = cf.sqrt(rho) * cf.exp(lam * 1j)
        return cf.einsum(",AB->AB", lam_, np.eye(2))


def default_gauges(scenario=None) -> list[GaugeTransform]:
    """Identity, a constant element and a coordinate-dependent one."""
    out = [GaugeTransform.identity(), GaugeTransform.constant(2.0, math.pi / 3)]
    out.append(
        GaugeTransform(
            lambda x: cf.as_jet(x[1], x[0].order) * 0.1 + 1.0,
            lambda x: cf.as_jet(x[2], x[0].order) * 0.2,
            "rho=1+0.1x1, Lambda=0.2x2",
        )
    )
    if scenario is not None:
        out += [GaugeTransform.from_spec(s) for s in getattr(scenario, "gauges", ())]
    return out


# ---------------------------------------------------------------------------
# transformation of objects


def _slot_factor(fld: sa.SpinorField, rho: Jet, lam: Jet) -> Jet:
    n_s = sum(1 for s in fld.slots if s == "s_") - sum(1 for s in fld.slots if s == "s^")
    n_p = sum(1 for s in fld.slots if s == "p_") - sum(1 for s in fld.slots if s == "p^")
    # sqrt(rho)^(n_s + n_p) exp(i Lambda (n_s - n_p))
    out = Jet.constant(1.0, rho.order)
    if n_s + n_p:
        out = out * cf.power(rho, 0.5 * (n_s + n_p))
    if n_s - n_p:
        out = out * cf.exp(lam * (1j * (n_s - n_p)))
    return out


def apply_gauge(obj, g: GaugeTransform, point: Sequence[float] | None = None, order: int | None = None):
    """Transform a spinor field, spin affinity or metric spinor.

    Jet-valued objects need the probe ``point``; the gauge functions are then
    evaluated to the object's order (one order more for affinities).
    """
    from .connection import SpinAffinity

    if isinstance(obj, sa.SpinMetric):
        if obj.formalism == sa.EPSILON:
            return obj
        gam = obj.gamma
        o = gam.order if isinstance(gam, Jet) else (order or 0)
        if point is None:
            raise ConfigurationError("apply_gauge needs the probe point")
        D = g.determinant(point, o)
        return sa.SpinMetric(obj.formalism, D * gam if isinstance(gam, Jet) else complex(D.value) * gam)
    if point is None:
        raise ConfigurationError("apply_gauge needs the probe point")
    if isinstance(obj, SpinAffinity):
        o = obj.theta.order
        rho1, lam1 = g.jets(point, o + 1)
        dlogrho = cf.log(rho1).grad()
        dlam = lam1.grad()
        dlogD = dlogrho + dlam * 2j
        theta = obj.theta + cf.einsum("a,BC->aBC", dlogD, np.eye(2)) * 0.5
        return replace(
            obj,
            theta=theta,
            theta_bar=theta.conj(),
            real_part=obj.real_part - dlogrho,
            potential=obj.potential - dlam,
            trace=obj.trace + dlogD,
        )
    if isinstance(obj, sa.SpinorField):
        comps = obj.components
        o = comps.order if isinstance(comps, Jet) else (order or 0)
        rho, lam = g.jets(point, o)
        fac = _slot_factor(obj, rho, lam)
        dens = obj.dweight.gauge_factor(rho, lam)
        if isinstance(dens, Jet):
            fac = fac * dens
        if isinstance(comps, Jet):
            new = _scale(fac, comps)
        else:
            new = complex(fac.value) * np.asarray(comps)
        return obj.with_components(new)
    raise TypeError(f"cannot gauge-transform {type(obj).__name__}")


def _scale(fac: Jet, comps: Jet) -> Jet:
    letters = "abcdefghijklmn"[: comps.ndim]
    return cf.einsum(f",{letters}->{letters}", fac, comps)


def affinity_long_form(theta: Jet, g: GaugeTransform, point) -> Jet:
    """theta' = L theta L^-1 + (d L) L^-1 with the full gauge matrix."""
    o = theta.order
    L1 = g.matrix(point, o + 1)
    L = L1.truncate(o)
    Linv = cf.inv(L)
    dL = L1.grad()
    return cf.einsum("BD,aDM,MC->aBC", L, theta, Linv) + cf.einsum("aBM,MC->aBC", dL, Linv)


def determinant_identity(metric: sa.SpinMetric, g: GaugeTransform, point, order: int = 1) -> float:
    """|Delta - 1/2 M^AB L_A^C L_B^D M_CD| relative to |Delta|."""
    L = g.matrix(point, order)
    D = g.determinant(point, order)
    rhs = cf.einsum("AB,AC,BD,CD->", metric.upper, L, L, metric.lower) * 0.5
    return _mx(rhs - D) / max(_mx(D), DISCREPANCY_FLOOR)


# ---------------------------------------------------------------------------
# two-path covariance testing


def _mx(x) -> float:
    v = sa.value(x)
    return float(np.max(np.abs(v))) if np.size(v) else 0.0


def discrepancy(a, b, scale: float | None = None) -> float:
    """max |a - b| over max(|a|, |b|, scale, floor)."""
    ref = max(_mx(a), _mx(b), scale or 0.0, DISCREPANCY_FLOOR)
    return _mx(sa.value(a) - sa.value(b)) / ref


def tracked_fields(geom) -> dict[str, sa.SpinorField]:
    """Fields compared between frames, with their weights."""
    from . import curvature as cv
    from .connection import connecting_fields, metric_spinor_field

    b = cv.curvature_bundle(geom)
    f = geom.formalism
    nat = lambda slots: sa.invariant_weight(slots, f)  # noqa: E731
    M_up = geom.conn.metric.upper
    phi_mixed = cf.einsum("BM,AM->AB", M_up, b.phi)
    out = dict(connecting_fields(geom))
    out["M_AB"] = metric_spinor_field(geom)
    out["W_abA^B"] = sa.SpinorField(b.W, ("w_", "w_", "s_", "s^"), sa.ZERO_WEIGHT, f)
    out["W_abAB"] = sa.SpinorField(b.W_lower, ("w_", "w_", "s_", "s_"), nat("s_ s_"), f)
    out["omega_ABCD"] = sa.SpinorField(b.omega, ("s_",) * 4, nat("s_ s_ s_ s_"), f)
    out["omega_A'B'CD"] = sa.SpinorField(b.omega_primed, ("s_", "s_", "p_", "p_"), nat("s_ s_ p_ p_"), f)
    out["X_ABCD"] = sa.SpinorField(b.X, ("s_",) * 4, nat("s_ s_ s_ s_"), f)
    out["Xi_AA'BB'"] = sa.SpinorField(b.Xi, ("s_", "s_", "p_", "p_"), nat("s_ s_ p_ p_"), f)
    out["Psi_ABCD"] = sa.SpinorField(b.Psi, ("s_",) * 4, nat("s_ s_ s_ s_"), f)
    out["phi_AB"] = sa.SpinorField(b.phi, ("s_", "s_"), nat("s_ s_"), f)
    out["phi_A^B"] = sa.SpinorField(phi_mixed, ("s_", "s^"), sa.ZERO_WEIGHT, f)
    out["chi"] = sa.SpinorField(b.chi, (), sa.ZERO_WEIGHT, f)
    out["F_ab"] = sa.SpinorField(b.F, ("w_", "w_"), sa.ZERO_WEIGHT, f)
    Rs = cv.spinor_riemann(b, geom)
    out["R_spinor"] = sa.SpinorField(Rs, ("s_",) * 4 + ("p_",) * 4, nat(["s_"] * 4 + ["p_"] * 4), f)
    return out


@dataclass
class CovarianceReport:
    label: str
    results: dict = field(default_factory=dict)  # formalism -> {check: max discrepancy}

    def max_discrepancy(self) -> float:
        vals = [v for per in self.results.values() for v in per.values()]
        return max(vals) if vals else 0.0

    def passed(self, tol: float = 1e-9) -> bool:
        return self.max_discrepancy() < tol


def covariance_residuals(scenario, g: GaugeTransform, point, formalism: str, order: int = 3) -> dict[str, float]:
    """Two-path discrepancies at one point in one formalism."""
    from . import curvature as cv
    from .connection import build_geometry, covariant_derivative, metric_spinor_field

    base = build_geometry(scenario, point, formalism, order)
    moved = build_geometry(scenario, point, formalism, order, gauge=g)
    out = {}
    f_old = tracked_fields(base)
    f_new = tracked_fields(moved)
    bscale = max(cv.curvature_scale(cv.curvature_bundle(base)), cv.curvature_scale(cv.curvature_bundle(moved)))
    curv = {"W_abA^B", "W_abAB", "omega_ABCD", "omega_A'B'CD", "X_ABCD", "Xi_AA'BB'", "Psi_ABCD", "chi", "phi_AB", "phi_A^B", "F_ab"}
    for name, fld in f_old.items():
        expect = apply_gauge(fld, g, point)
        out[name] = discrepancy(f_new[name].components, expect.components, bscale if name in curv else None)
    # affinities: short law and long form
    spin_exp = apply_gauge(base.spin, g, point)
    out["affinity"] = discrepancy(moved.spin.theta, spin_exp.theta)
    out["affinity_long_form"] = discrepancy(moved.spin.theta, affinity_long_form(base.spin.theta, g, point))
    out["contracted_affinity"] = discrepancy(moved.spin.trace, spin_exp.trace)
    out["potential"] = discrepancy(moved.spin.potential, spin_exp.potential)
    out["real_part"] = discrepancy(moved.spin.real_part, spin_exp.real_part)
    out["metric_spinor"] = discrepancy(moved.conn.metric.lower, apply_gauge(base.conn.metric, g, point).lower)
    out["determinant_identity"] = determinant_identity(base.conn.metric, g, point)
    if formalism == sa.GAMMA:
        out["beta"] = discrepancy(moved.spin.beta, base.spin.beta)
        rho, lam = g.jets(point, order)
        dphase_new = moved.phase.grad()
        out["phase_gradient"] = discrepancy(dphase_new, base.phase.grad() + lam.grad() * 2.0)
        # contracted derivatives of the metric spinor in both frames
        cd_new = _contracted_metric_derivative(moved)
        cd_old = _contracted_metric_derivative(base)
        # both sides are differences of terms of size |trace|; use that as the scale
        term_scale = max(_mx(moved.spin.trace), _mx(base.spin.trace))
        out["contracted_metric_derivative"] = discrepancy(cd_new, cd_old, term_scale)
        out["mixed_frame_sum"] = _mixed_frame_sum(base, moved)
        # nabla' gamma'_BC = Delta nabla gamma_BC
        d_new = covariant_derivative(metric_spinor_field(moved), moved).components
        d_old = covariant_derivative(metric_spinor_field(base), base).components
        D = g.determinant(point, d_old.order)
        out["metric_derivative_law"] = discrepancy(
            d_new, cf.einsum(",aBC->aBC", D, d_old), max(_mx(moved.gamma.grad()), _mx(base.gamma.grad()))
        )
    return out


def _contracted_metric_derivative(geom) -> Jet:
    """gamma^{BC} nabla_a gamma_BC."""
    from .connection import covariant_derivative, metric_spinor_field

    d = covariant_derivative(metric_spinor_field(geom), geom).components
    return cf.einsum("BC,aBC->a", geom.conn.metric.upper.truncate(d.order), d)


def _frame_derivative(metric: sa.SpinMetric, spin) -> tuple[Jet, Jet]:
    """(nabla gamma_BC, nabla gamma^BC) of ``metric`` using the affinity ``spin``."""
    lo = metric.lower
    up = metric.upper
    tr = spin.trace
    o = tr.order
    d_lo = lo.grad() - cf.einsum("a,BC->aBC", tr, lo.truncate(o))
    d_up = up.grad() + cf.einsum("a,BC->aBC", tr, up.truncate(o))
    return d_lo, d_up


def _mixed_frame_sum(base, moved) -> float:
    """gamma'^BC nabla gamma'_BC + gamma'_BC nabla gamma'^BC against the frame-swapped sum."""
    d_lo, d_up = _frame_derivative(moved.conn.metric, base.spin)
    o = d_lo.order
    lhs = cf.einsum("BC,aBC->a", moved.conn.metric.upper.truncate(o), d_lo) + cf.einsum(
        "BC,aBC->a", moved.conn.metric.lower.truncate(o), d_up
    )
    e_lo, e_up = _frame_derivative(base.conn.metric, moved.spin)
    rhs = cf.einsum("BC,aBC->a", base.conn.metric.upper.truncate(o), e_lo) + cf.einsum(
        "BC,aBC->a", base.conn.metric.lower.truncate(o), e_up
    )
    return discrepancy(lhs, rhs, 1.0)


def covariance_suite(scenario, g: GaugeTransform, formalisms=(sa.GAMMA, sa.EPSILON), points=None, order: int = 3) -> CovarianceReport:
    """Maximum two-path discrepancy per tracked object over probe points."""
    if isinstance(formalisms, str):
        formalisms = (formalisms,)
    if points is None:
        points = scenario.probe_points()
    rep = CovarianceReport(g.label)
    for f in formalisms:
        agg: dict[str, float] = {}
        for p in points:
            for k, v in covariance_residuals(scenario, g, p, f, order).items():
                if not np.isfinite(v):
                    from .errors import EvaluationError

                    raise EvaluationError(f"non-finite discrepancy for {k}", point=tuple(p))
                agg[k] = max(agg.get(k, 0.0), v)
        rep.results[f] = agg
    return rep


# ---------------------------------------------------------------------------
# group structure


def gauge_scenario(scenario, g: GaugeTransform):
    """The scenario seen in the frame reached by ``g`` (inputs transformed)."""
    abs_fn, phase_fn, pot_fn, amp_fn = scenario.gamma_abs_fn, scenario.gamma_phase_fn, scenario.potential_fn, scenario.amplitude_fn

    def order_of(x):
        return x[0].order if isinstance(x[0], Jet) else 0

    def new_abs(x):
        return cf.as_jet(abs_fn(x), order_of(x)) * cf.as_jet(g.rho_fn(x), order_of(x))

    def new_phase(x):
        return cf.as_jet(phase_fn(x), order_of(x)) + cf.as_jet(g.lambda_fn(x), order_of(x)) * 2.0

    def new_amp(x):
        return cf.as_jet(amp_fn(x), order_of(x)) * cf.as_jet(g.rho_fn(x), order_of(x))

    def new_pot(x):
        o = order_of(x)
        x1 = Jet.variables([complex(v.value).real for v in x], o + 1)
        dlam = cf.as_jet(g.lambda_fn(x1), o + 1).grad()
        pot = cf.stack(pot_fn(x), order=o)
        return pot - dlam

    return scenario.replace(gamma_abs_fn=new_abs, gamma_phase_fn=new_phase, potential_fn=new_pot, amplitude_fn=new_amp)


def group_law_residuals(scenario, g1: GaugeTransform, g2: GaugeTransform, point, formalism: str, order: int = 3) -> dict[str, float]:
    """g2 after g1 against the composed element, on objects and on the pipeline."""
    from .connection import build_geometry

    base = build_geometry(scenario, point, formalism, order)
    gc = g1.compose(g2)
    out = {}
    fields = tracked_fields(base)
    worst = 0.0
    for fld in fields.values():
        two = apply_gauge(apply_gauge(fld, g1, point), g2, point)
        one = apply_gauge(fld, gc, point)
        worst = max(worst, discrepancy(two.components, one.components))
    out["objects"] = worst
    a2 = apply_gauge(apply_gauge(base.spin, g1, point), g2, point)
    a1 = apply_gauge(base.spin, gc, point)
    out["affinity"] = discrepancy(a2.theta, a1.theta)
    chained = build_geometry(gauge_scenario(gauge_scenario(scenario, g1), g2), point, formalism, order)
    direct = build_geometry(scenario, point, formalism, order, gauge=gc)
    out["pipeline"] = max(
        discrepancy(chained.spin.theta, direct.spin.theta),
        discrepancy(chained.conn.up_spin, direct.conn.up_spin),
        discrepancy(chained.conn.metric.lower, direct.conn.metric.lower),
    )
    return out


def field_strength_invariance(scenario, g: GaugeTransform, point, order: int = 3) -> float:
    """F_ab from the potential in both frames (the gradient shift drops out)."""
    from . import curvature as cv
    from .connection import build_geometry

    a = build_geometry(scenario, point, sa.EPSILON, order)
    b = build_geometry(scenario, point, sa.EPSILON, order, gauge=g)
    return discrepancy(cv.field_strength(a.potential), cv.field_strength(b.potential))
