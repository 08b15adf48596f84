"""Command-line front end: run identity and residual suites, write reports.

    spincurv run --scenario catalog:schwarzschild --suite all --formalism both
    spincurv list
    spincurv check-file scenario.json
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Iterable

import numpy as np

from . import __version__
from . import curvature as cv
from . import gauge as ga
from . import spacetimes as st
from . import spin_algebra as sa
from . import wave as wv
from .connection import build_geometry, constancy_suite, epsilon_limit, riemann_world
from .errors import ConfigurationError, SpincurvError, UsageError

SUITES = ("algebra", "connection", "curvature", "gauge", "wave", "limit")
FORMALISMS = {"gamma": (sa.GAMMA,), "epsilon": (sa.EPSILON,), "both": (sa.GAMMA, sa.EPSILON)}
CSV_HEADER = ["check_id", "paper_ref", "residual", "tolerance", "pass"]

# Default tolerances, frozen per table version; --tol-scale multiplies them.
TOLERANCE_TABLE_VERSION = "1"
TOLERANCES = {
    "algebra": 1e-10,
    "connection": 1e-9,
    "curvature": 1e-9,
    "einstein": 1e-9,
    "gauge": 1e-9,
    "gauge_invariant": 1e-10,
    "group_law": 1e-10,
    "commutator": 1e-9,
    "splitting": 1e-9,
    "delta_antisymmetry": 1e-10,
    "field_equation": 1e-8,
    "photon": 1e-8,
    "potential": 1e-8,
    "graviton": 1e-7,
    "interchange": 1e-10,
    "dirac_first": 1e-10,
    "dirac_wave": 1e-9,
    "limit_exact": 1e-12,
    "limit_order": 1.0,  # lower bound on the observed order, not scaled
    "correspondence": 1e-9,
}

# equation tags: short descriptions of the identity each check exercises
TAGS = {
    "inverse_metric": "metric spinor inverse",
    "antisymmetric_product": "metric spinor antisymmetry",
    "anticommutator": "connecting-object anticommutator",
    "metric_reproduction": "world metric from connecting objects",
    "triple_antisymmetry": "two-dimensional spin space",
    "hermiticity": "connecting-object hermiticity",
    "completeness": "connecting-object completeness",
    "connecting_objects": "covariant constancy of S",
    "eps_metric": "covariant constancy of the metric spinor",
    "eps_metric_upper": "covariant constancy of the inverse metric spinor",
    "eps_pair": "covariant constancy of the metric spinor pair",
    "world_metric": "covariant constancy of g",
    "gamma_modulus": "covariant constancy of |gamma|",
    "gamma_pair": "covariant constancy of gamma gamma-bar",
    "gamma_eigenvalue": "metric spinor eigenvalue equation",
    "mu_consistency": "density consistency of |gamma|^4",
    "trace_condition": "trace of the connecting-object derivative",
    "riemann_roundtrip": "spinor Riemann reconstruction",
    "ricci_roundtrip": "spinor Ricci reconstruction",
    "mixed_riemann": "mixed world-spin curvature",
    "mixed_riemann_contracted": "contracted mixed curvature",
    "trace_real": "curvature trace reality",
    "trace_is_field_strength": "curvature trace is the field strength",
    "bivector_reconstruction": "bivector decomposition of W",
    "omega_pair_symmetry": "omega pair symmetry",
    "omega_primed_pair_symmetry": "mixed omega pair symmetry",
    "x_trace": "X contraction",
    "x_double_trace": "X double contraction",
    "im_chi": "reality of chi",
    "x_reduction": "X reduction formula",
    "psi_symmetry": "Weyl spinor total symmetry",
    "xi_hermitian": "Ricci spinor hermiticity",
    "phi_symmetry": "photon spinor symmetry",
    "lowered_mixed": "lowered mixed curvature",
    "weyl_roundtrip": "Weyl tensor from Psi",
    "einstein_tensor": "Einstein tensor from Xi and chi",
    "scalar_curvature": "scalar curvature R = 8 chi",
    "trace_free_ricci": "vacuum field equations (Xi = 0)",
    "cosmological": "vacuum field equations (8 chi = 4 lambda)",
    "bivector_expansion": "Maxwell bivector expansion",
    "dual_expansion": "Maxwell dual expansion",
    "two_route_phi": "photon spinor from potential",
    "two_route_phi_bar": "conjugate photon spinor from potential",
    "commutator_world": "covariant-derivative commutator",
    "commutator_delta": "Delta-operator action (unprimed)",
    "commutator_delta_primed": "Delta-operator action (primed)",
    "splitting": "operator splitting nabla nabla = Delta - M box / 2",
    "rule_lower": "antisymmetrised derivative rule (lower)",
    "rule_upper": "antisymmetrised derivative rule (upper)",
    "hermitian_delta": "Delta-derivative of hermitian quantities",
    "delta_antisymmetry": "Delta acting on the mixed photon spinor",
    "photon_plain": "source-free Maxwell equations",
    "photon_beta_form": "source-free Maxwell equations (beta form)",
    "photon_mixed": "source-free Maxwell equations (mixed form)",
    "graviton_divergence": "vacuum Bianchi identity for Psi",
    "contracted_bianchi": "contracted Bianchi identity",
    "photon_wave_mixed": "photon wave equation (mixed form)",
    "photon_wave": "photon wave equation",
    "photon_wave_contravariant": "photon wave equation (contravariant)",
    "graviton_wave": "graviton wave equation",
    "graviton_wave_mixed": "graviton wave equation (mixed form)",
    "graviton_wave_contravariant": "graviton wave equation (contravariant)",
    "potential_wave": "potential wave equation",
    "potential_wave_ricci": "potential wave equation with Ricci term",
    "interchange_photon": "interchange rule (photon)",
    "interchange_graviton": "interchange rule (graviton)",
    "dirac_first_psi": "Dirac first-order equation for psi",
    "dirac_first_chi": "Dirac first-order equation for chi",
    "dirac_wave_psi": "Dirac wave equation for psi",
    "dirac_wave_chi": "Dirac wave equation for chi",
    "dirac_identity_psi": "Dirac second-order identity for psi",
    "dirac_identity_chi": "Dirac second-order identity for chi",
    "metric_switch": "Delta with the metric spinor moved through",
    "upsilon_invariance": "gauge invariance of Upsilon",
    "field_strength_invariance": "gauge invariance of F",
    "group_law": "gauge group composition",
    "limit_exact": "epsilon formalism at gamma = 1",
    "limit_order": "gamma -> 1 convergence order",
    "correspondence": "finite-gamma correspondence",
}


# ---------------------------------------------------------------------------
# report types


@dataclass
class CheckResult:
    check_id: str
    module: str
    paper_ref: str
    formalism: str
    residual: float
    tolerance: float
    passed: bool
    lower_bound: bool = False  # pass means residual >= tolerance
    error: str | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["residual"] = _encode_float(self.residual)
        d["tolerance"] = _encode_float(self.tolerance)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "CheckResult":
        d = dict(d)
        d["residual"] = _decode_float(d["residual"])
        d["tolerance"] = _decode_float(d["tolerance"])
        return cls(**d)


@dataclass
class SuiteReport:
    scenario: str
    suite: str
    formalisms: list
    checks: list = field(default_factory=list)
    fingerprint: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "suite": self.suite,
            "formalisms": list(self.formalisms),
            "passed": self.passed,
            "fingerprint": self.fingerprint,
            "checks": [c.to_dict() for c in self.checks],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SuiteReport":
        return cls(
            d["scenario"],
            d["suite"],
            list(d["formalisms"]),
            [CheckResult.from_dict(c) for c in d["checks"]],
            dict(d["fingerprint"]),
        )


def _encode_float(x: float):
    x = float(x)
    if math.isfinite(x):
        return x
    return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")


def _decode_float(x) -> float:
    return float(x)


# ---------------------------------------------------------------------------
# suite runners


class _Collector:
    def __init__(self, tol_scale: float):
        self.tol_scale = tol_scale
        self.checks: list[CheckResult] = []

    def add(self, module: str, name: str, formalism: str, residual: float, tol_key: str, suffix: str = ""):
        lower = tol_key == "limit_order"
        tol = TOLERANCES[tol_key] if lower else TOLERANCES[tol_key] * self.tol_scale
        residual = float(residual)
        ok = residual >= tol if lower else residual < tol
        cid = f"{module}.{name}{suffix}[{formalism}]"
        self.checks.append(CheckResult(cid, module, TAGS.get(name, name), formalism, residual, tol, bool(ok), lower))

    def error(self, module: str, name: str, formalism: str, tol_key: str, exc: Exception):
        tol = TOLERANCES[tol_key] * (1.0 if tol_key == "limit_order" else self.tol_scale)
        cid = f"{module}.{name}[{formalism}]"
        msg = f"{type(exc).__name__}: {exc}"
        self.checks.append(CheckResult(cid, module, TAGS.get(name, name), formalism, float("nan"), tol, False, False, msg))

    def guarded(self, module: str, name: str, formalism: str, tol_key: str, fn: Callable[[], None]):
        try:
            fn()
        except (SpincurvError, ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
            self.error(module, name, formalism, tol_key, exc)


def _suite_algebra(col: _Collector, sc, formalism: str, points):
    def run():
        agg: dict[str, float] = {}
        for p in points:
            geom = build_geometry(sc, p, formalism, order=2)
            for k, v in sa.algebra_residuals(geom.conn).items():
                agg[k] = max(agg.get(k, 0.0), v)
        for k, v in agg.items():
            col.add("algebra", k, formalism, v, "algebra")

    col.guarded("algebra", "algebra", formalism, "algebra", run)


def _suite_connection(col: _Collector, sc, formalism: str, points):
    def run():
        rep = constancy_suite(sc, formalism, points, order=2)
        for k, v in rep.residuals.items():
            col.add("connection", k, formalism, v, "connection")

    col.guarded("connection", "constancy", formalism, "connection", run)


def _suite_curvature(col: _Collector, sc, formalism: str, points):
    def run():
        ident: dict[str, float] = {}
        ein: dict[str, float] = {}
        mx: dict[str, float] = {}
        for p in points:
            geom = build_geometry(sc, p, formalism, order=3)
            for k, v in cv.identity_residuals(geom).items():
                ident[k] = max(ident.get(k, 0.0), v)
            for k, v in cv.einstein_residuals(geom).items():
                ein[k] = max(ein.get(k, 0.0), v)
            for k, v in cv.maxwell_fields(geom).residuals.items():
                mx[k] = max(mx.get(k, 0.0), v)
        for k, v in ident.items():
            col.add("curvature", k, formalism, v, "curvature")
        for k, v in mx.items():
            col.add("curvature", k, formalism, v, "curvature")
        for k, v in ein.items():
            col.add("curvature", k, formalism, v, "einstein")

    col.guarded("curvature", "curvature", formalism, "curvature", run)


def _suite_gauge(col: _Collector, sc, formalism: str, points):
    gauges = ga.default_gauges(sc)
    for g in gauges:
        suffix = f"<{g.label}>"

        def run(g=g, suffix=suffix):
            rep = ga.covariance_suite(sc, g, (formalism,), points)
            for k, v in rep.results.get(formalism, {}).items():
                key = "gauge_invariant" if k in ("chi", "phi_A^B") else "gauge"
                col.add("gauge", k, formalism, v, key, suffix)
            col.add("gauge", "field_strength_invariance", formalism, ga.field_strength_invariance(sc, g, points[0]), "gauge_invariant", suffix)
            if formalism == sa.GAMMA:
                col.add("gauge", "upsilon_invariance", formalism, wv.upsilon_gauge_discrepancy(sc, g, points[0]), "gauge_invariant", suffix)

        col.guarded("gauge", f"covariance{suffix}", formalism, "gauge", run)

    def run_group():
        g1, g2 = gauges[1], gauges[2]
        res = ga.group_law_residuals(sc, g1, g2, points[0], formalism)
        col.add("gauge", "group_law", formalism, max(res.values()), "group_law")

    if len(gauges) >= 3:
        col.guarded("gauge", "group_law", formalism, "group_law", run_group)


def _is_flat_cartesian(sc, points) -> bool:
    for p in points[:3]:
        geom = build_geometry(sc, p, sa.EPSILON, order=2)
        if max(wv._mx(geom.world.Gamma), wv._mx(geom.potential), wv._mx(riemann_world(geom.world))) > 0.0:
            return False
    return True


def _sample_pair():
    """Plane-wave Dirac pair used on flat Cartesian scenarios."""
    return wv.plane_wave_pair([1.3, 0.2, -0.4, 0.5], [0.7, 0.2 - 0.5j])


def _test_pair():
    """Arbitrary smooth spinor pair for the off-shell identities."""
    from . import chart_fields as cf

    def psi(x):
        return [cf.exp(x[1] * 0.3j) * (0.4 + 0.1j) + x[2] * x[3] * 0.2, cf.sin(x[0]) * (0.3 - 0.2j) + 0.5]

    def chi(x):
        return [cf.cos(x[1]) * (1.0 + 0.5j), x[0] * x[3] * 0.3]

    return wv.DiracPair(psi, chi, 0.8)


def _suite_wave(col: _Collector, sc, formalism: str, points, seed: int):
    pts = points[: min(len(points), 4)]
    vacuum = bool(getattr(sc, "vacuum", False))

    def run_commutators():
        rng = np.random.default_rng(seed)
        worst = {"commutator_world": 0.0, "commutator_delta": 0.0, "commutator_delta_primed": 0.0, "splitting": 0.0}
        rules = {"rule_lower": 0.0, "rule_upper": 0.0}
        for k in range(10):
            geom = build_geometry(sc, points[k % len(points)], formalism, order=3)
            slots, w = wv.RANDOM_VALENCES[k % len(wv.RANDOM_VALENCES)]
            fld = wv.random_field(slots, w, formalism, geom.point, 3, rng)
            r = wv.commutator_check(fld, geom)
            for key, v in zip(worst, (r.world, r.delta_unprimed, r.delta_primed, r.splitting)):
                worst[key] = max(worst[key], v)
            for key, v in wv.splitting_rules(fld, geom).items():
                rules[key] = max(rules[key], v)
        for key, v in worst.items():
            col.add("wave", key, formalism, v, "commutator" if key != "splitting" else "splitting")
        for key, v in rules.items():
            col.add("wave", key, formalism, v, "splitting")
        herm = max(wv.hermitian_delta_residual(build_geometry(sc, p, formalism, order=3)) for p in pts)
        col.add("wave", "hermitian_delta", formalism, herm, "commutator")

    col.guarded("wave", "commutators", formalism, "commutator", run_commutators)

    def run_fields():
        for k, rep in wv.massless_field_residual(sc, "photon", formalism, pts).items():
            if k == "photon_plain" and formalism == sa.GAMMA:
                continue  # the plain divergence is not a gamma-formalism statement
            col.add("wave", k, formalism, rep.relative, "field_equation")
        rep = wv.massless_field_residual(sc, "contracted_bianchi", formalism, pts)["contracted_bianchi"]
        col.add("wave", "contracted_bianchi", formalism, rep.relative, "field_equation")
        if vacuum:
            rep = wv.massless_field_residual(sc, "graviton", formalism, pts)["graviton_divergence"]
            col.add("wave", "graviton_divergence", formalism, rep.relative, "field_equation")

    col.guarded("wave", "field_equations", formalism, "field_equation", run_fields)

    def run_waves():
        eqs = ["potential_ricci"]
        if vacuum:
            eqs += ["photon_mixed", "photon", "photon_contravariant", "potential", "graviton", "graviton_mixed", "graviton_contravariant"]
        for eq in eqs:
            rep = wv.wave_residual(sc, eq, formalism, pts)
            kind = wv.EQUATIONS[eq][0]
            name = eq.replace(kind, kind + "_wave", 1)
            col.add("wave", name, formalism, rep.relative, kind)
        anti = inter_p = inter_g = 0.0
        for p in pts:
            geom = build_geometry(sc, p, formalism, order=4)
            anti = max(anti, wv.delta_antisymmetry(geom))
            if vacuum and formalism == sa.GAMMA:
                inter_p = max(inter_p, wv.interchange_agreement(geom, "photon"))
                inter_g = max(inter_g, wv.interchange_agreement(geom, "graviton"))
        col.add("wave", "delta_antisymmetry", formalism, anti, "delta_antisymmetry")
        if vacuum and formalism == sa.GAMMA:
            col.add("wave", "interchange_photon", formalism, inter_p, "interchange")
            col.add("wave", "interchange_graviton", formalism, inter_g, "interchange")

    col.guarded("wave", "wave_equations", formalism, "graviton", run_waves)

    def run_dirac():
        reps = wv.dirac_residual(_test_pair(), sc, formalism, pts)
        for k in ("identity_psi", "identity_chi"):
            col.add("wave", f"dirac_{k}", formalism, reps[k].relative, "dirac_wave")
        switch = max(wv.metric_switch_residual(_test_pair(), build_geometry(sc, p, formalism, order=3)) for p in pts)
        col.add("wave", "metric_switch", formalism, switch, "dirac_wave")
        if _is_flat_cartesian(sc, points):
            reps = wv.dirac_residual(_sample_pair(), sc, formalism, pts)
            for k in ("first_psi", "first_chi"):
                col.add("wave", f"dirac_{k}", formalism, reps[k].relative, "dirac_first")
            for k in ("wave_psi", "wave_chi"):
                col.add("wave", f"dirac_{k}", formalism, reps[k].relative, "dirac_wave")

    col.guarded("wave", "dirac", formalism, "dirac_wave", run_dirac)


def _suite_limit(col: _Collector, sc, points):
    def run():
        rep = epsilon_limit(sc, points[:3])
        for k, v in rep.exact_at_zero.items():
            col.add("limit", "limit_exact", "both", v, "limit_exact", f"<{k}>")
        for k, v in rep.slopes.items():
            col.add("limit", "limit_order", "both", v, "limit_order", f"<{k}>")
        for k, v in rep.correspondences.items():
            col.add("limit", "correspondence", "both", v, "correspondence", f"<{k}>")

    col.guarded("limit", "limit", "both", "limit_exact", run)


def effective_seed(sc) -> int:
    """Probe seed in force: the environment override, else the scenario's."""
    env = os.environ.get(st.SEED_ENV)
    return int(env) if env not in (None, "") else int(sc.probe_seed)


def run_suite(scenario, suite: str = "all", formalism: str = "both", tol_scale: float = 1.0) -> SuiteReport:
    """Run the selected checks and collect them into a report."""
    if suite != "all" and suite not in SUITES:
        raise UsageError(f"unknown suite {suite!r}; choose from {', '.join(SUITES + ('all',))}")
    if formalism not in FORMALISMS:
        raise UsageError(f"unknown formalism selector {formalism!r}; choose gamma, epsilon or both")
    if not (tol_scale > 0 and math.isfinite(tol_scale)):
        raise UsageError("--tol-scale must be a positive number")
    if isinstance(scenario, str):
        scenario = st.resolve_scenario(scenario)
    points = scenario.probe_points()
    seed = effective_seed(scenario)
    col = _Collector(tol_scale)
    suites = SUITES if suite == "all" else (suite,)
    forms = FORMALISMS[formalism]
    for s in suites:
        if s == "limit":
            _suite_limit(col, scenario, points)
            continue
        for f in forms:
            if s == "algebra":
                _suite_algebra(col, scenario, f, points)
            elif s == "connection":
                _suite_connection(col, scenario, f, points)
            elif s == "curvature":
                _suite_curvature(col, scenario, f, points)
            elif s == "gauge":
                _suite_gauge(col, scenario, f, points)
            elif s == "wave":
                _suite_wave(col, scenario, f, points, seed)
    fingerprint = {
        "seed": seed,
        "probe_count": len(points),
        "tolerance_scale": tol_scale,
        "tolerance_table": TOLERANCE_TABLE_VERSION,
        "version": __version__,
    }
    return SuiteReport(scenario.name, suite, list(forms), col.checks, fingerprint)


# ---------------------------------------------------------------------------
# output


def _module_order(c: CheckResult):
    m = SUITES.index(c.module) if c.module in SUITES else len(SUITES)
    return (m, c.paper_ref, c.check_id)


def to_json(report: SuiteReport) -> str:
    return json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"


def from_json(text: str) -> SuiteReport:
    return SuiteReport.from_dict(json.loads(text))


def to_csv(report: SuiteReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for c in report.checks:
        w.writerow([c.check_id, c.paper_ref, repr(float(c.residual)), repr(float(c.tolerance)), "true" if c.passed else "false"])
    return buf.getvalue()


def to_text(report: SuiteReport) -> str:
    lines = [
        f"scenario {report.scenario}  suite {report.suite}  formalisms {', '.join(report.formalisms)}",
        "fingerprint " + " ".join(f"{k}={report.fingerprint[k]}" for k in sorted(report.fingerprint)),
    ]
    for c in sorted(report.checks, key=_module_order):
        status = "PASS" if c.passed else "FAIL"
        op = ">=" if c.lower_bound else "<"
        line = f"{status} {c.check_id:<60} {c.residual:.3e} {op} {c.tolerance:.1e}  [{c.paper_ref}]"
        if c.error:
            line += f"  error: {c.error}"
        lines.append(line)
    n_fail = len(report.failures())
    lines.append(f"{len(report.checks) - n_fail} passed, {n_fail} failed")
    return "\n".join(lines) + "\n"


FORMATS = {"text": to_text, "json": to_json, "csv": to_csv}


def emit(report: SuiteReport, fmt: str = "text", path=None) -> str:
    """Render a report; write it to ``path`` when given."""
    if fmt not in FORMATS:
        raise UsageError(f"unknown format {fmt!r}; choose text, json or csv")
    text = FORMATS[fmt](report)
    if path is not None:
        try:
            Path(path).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise ConfigurationError(f"cannot write report to {path}: {exc}") from exc
    return text


# ---------------------------------------------------------------------------
# command line


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="spincurv", description="Two-component spinor curvature checks.")
    sub = p.add_subparsers(dest="verb", required=True)
    r = sub.add_parser("run", help="run check suites on a scenario")
    r.add_argument("--scenario", required=True, help="catalog:<name> or a scenario JSON file")
    r.add_argument("--suite", default="all", choices=SUITES + ("all",))
    r.add_argument("--formalism", default="both", choices=tuple(FORMALISMS))
    r.add_argument("--out", default=None, help="write the report here instead of stdout")
    r.add_argument("--format", default="text", choices=tuple(FORMATS))
    r.add_argument("--tol-scale", type=float, default=1.0, help="multiply every default tolerance")
    sub.add_parser("list", help="list catalog scenarios")
    c = sub.add_parser("check-file", help="validate a scenario file without running suites")
    c.add_argument("file")
    return p


def _print_catalog(out) -> None:
    for name in st.CATALOG:
        out.write(f"{name:<15} {st.CATALOG_DOC.get(name, '')}\n")


def main(argv: Iterable[str] | None = None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(list(argv) if argv is not None else None)
    except SystemExit as exc:
        return int(exc.code or 0) if exc.code in (0, None) else 2
    try:
        if args.verb == "list":
            _print_catalog(sys.stdout)
            return 0
        if args.verb == "check-file":
            sc = st.load_scenario(args.file)
            sc.validate()
            sys.stdout.write(f"ok: {sc.name} ({len(sc.probe_points())} probe points)\n")
            return 0
        report = run_suite(st.resolve_scenario(args.scenario), args.suite, args.formalism, args.tol_scale)
        text = emit(report, args.format, args.out)
        if args.out is None:
            sys.stdout.write(text)
        else:
            n_fail = len(report.failures())
            sys.stdout.write(f"{len(report.checks) - n_fail} passed, {n_fail} failed -> {args.out}\n")
        return 0 if report.passed else 1
    except (SpincurvError, OSError) as exc:
        sys.stderr.write(f"spincurv: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
