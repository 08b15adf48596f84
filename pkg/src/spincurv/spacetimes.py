"""Analytic spacetime scenarios: a small catalog and a JSON scenario loader.

A scenario bundles a chart with functions of the four coordinates.  Each
function receives a list of coordinate jets and returns numbers or jets built
with the arithmetic of :mod:`spincurv.chart_fields`, which is what lets the
rest of the package differentiate them exactly.
"""

from __future__ import annotations

import ast
import json
import math
import os
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable

import numpy as np

from . import chart_fields as cf
from .chart_fields import Chart, Jet, ProbePoint, make_probe_set
from .errors import (
    ConfigurationError,
    EvaluationError,
    ExpressionError,
    InconsistentScenarioError,
    SingularMetricError,
    UsageError,
)

SEED_ENV = "SPINCURV_SEED"
DEFAULT_PROBES = 12
DEFAULT_SEED = 7


def _one(x):
    return 1.0


def _zero(x):
    return 0.0


def _no_potential(x):
    return [0.0, 0.0, 0.0, 0.0]


@dataclass(frozen=True)
class GaugeSpec:
    """Gauge functions rho(x) > 0 and Lambda(x), in the same calling convention."""

    rho_fn: Callable
    lambda_fn: Callable
    label: str = "gauge"


@dataclass(frozen=True)
class SpacetimeScenario:
    name: str
    chart: Chart
    metric_fn: Callable
    tetrad_fn: Callable
    gamma_abs_fn: Callable = _one
    gamma_phase_fn: Callable = _zero
    potential_fn: Callable = _no_potential
    amplitude_fn: Callable = _one
    lam: float = 0.0
    kappa: float = 1.0
    vacuum: bool = False
    gauges: tuple = ()
    probe_count: int = DEFAULT_PROBES
    probe_seed: int = DEFAULT_SEED
    params: dict = field(default_factory=dict)

    def replace(self, **changes) -> "SpacetimeScenario":
        return replace(self, **changes)

    def probe_points(self, count: int | None = None, seed: int | None = None) -> list[ProbePoint]:
        if seed is None:
            env = os.environ.get(SEED_ENV)
            seed = int(env) if env not in (None, "") else self.probe_seed
        return make_probe_set(self.chart, count or self.probe_count, seed)

    # plain-float evaluation helpers -------------------------------------
    def _eval(self, fn, p, order=1):
        x = Jet.variables(tuple(p), order)
        try:
            with np.errstate(all="raise"):
                out = fn(x)
        except (FloatingPointError, ZeroDivisionError, ValueError, EvaluationError) as exc:
            raise EvaluationError(f"scenario {self.name!r} not evaluable ({exc})", point=tuple(p)) from exc
        return cf.stack(out, order=order).value if isinstance(out, (list, tuple)) else cf.as_jet(out, order).value

    def metric_at(self, p) -> np.ndarray:
        return np.asarray(self._eval(self.metric_fn, p))

    def tetrad_at(self, p) -> np.ndarray:
        return np.asarray(self._eval(self.tetrad_fn, p))

    def gamma_at(self, p) -> complex:
        a = complex(self._eval(self.gamma_abs_fn, p))
        ph = complex(self._eval(self.gamma_phase_fn, p))
        return a * np.exp(1j * ph)

    def gamma_fn(self, x):
        """Complex gamma as a function of coordinate jets."""
        return cf.as_jet(self.gamma_abs_fn(x), x[0].order) * cf.exp(cf.as_jet(self.gamma_phase_fn(x), x[0].order) * 1j)

    def validate(self, points=None, tol: float = 1e-10) -> None:
        """Check signature, tetrad consistency and gamma != 0 at probe points."""
        points = self.probe_points() if points is None else points
        for p in points:
            if not self.chart.contains(p):
                raise ConfigurationError(f"probe point {tuple(p)} outside the chart")
            g = self.metric_at(p)
            if np.max(np.abs(g.imag)) > tol or np.max(np.abs(g - g.T)) > tol * max(1.0, np.max(np.abs(g))):
                raise InconsistentScenarioError(f"metric must be real and symmetric at point {tuple(p)}")
            if self.chart.signature_check:
                ev = np.linalg.eigvalsh(g.real)
                if np.any(np.abs(ev) < 1e-14):
                    raise SingularMetricError("degenerate metric", point=tuple(p))
                if int(np.sum(ev > 0)) != 1 or int(np.sum(ev < 0)) != 3:
                    raise InconsistentScenarioError(f"metric signature is not (+---) at point {tuple(p)}")
            e = self.tetrad_at(p)
            recon = e @ np.diag([1.0, -1.0, -1.0, -1.0]) @ e.T
            mismatch = float(np.max(np.abs(recon - g)))
            if mismatch > tol * max(1.0, float(np.max(np.abs(g)))):
                raise InconsistentScenarioError(
                    f"tetrad does not reproduce the metric at point {tuple(p)} (mismatch {mismatch:.3e})"
                )
            if abs(self.gamma_at(p)) == 0:
                raise SingularMetricError("gamma vanishes", point=tuple(p))


# ---------------------------------------------------------------------------
# catalog


def _diag(entries):
    z = 0.0
    return [[entries[i] if i == j else z for j in range(4)] for i in range(4)]


def minkowski(**_) -> SpacetimeScenario:
    chart = Chart(("t", "x", "y", "z"), ((-1.0, 1.0),) * 4)
    return SpacetimeScenario(
        "minkowski",
        chart,
        metric_fn=lambda x: _diag([1.0, -1.0, -1.0, -1.0]),
        tetrad_fn=lambda x: _diag([1.0, 1.0, 1.0, 1.0]),
        vacuum=True,
    )


def schwarzschild(M: float = 1.0, q: float = 0.0, r_max: float | None = None, **_) -> SpacetimeScenario:
    """Static chart (t, r, theta, phi); ``q`` adds a test Coulomb potential q/r."""
    if not M > 0:
        raise UsageError("schwarzschild needs M > 0")
    r_hi = 20.0 * M if r_max is None else r_max
    chart = Chart(("t", "r", "theta", "phi"), ((0.0, 1.0), (2.2 * M, r_hi), (0.3, math.pi - 0.3), (0.0, 2 * math.pi)))

    def f(x):
        return 1.0 - (2.0 * M) / x[1]

    def metric(x):
        r, th = x[1], x[2]
        s = cf.sin(th)
        return _diag([f(x), -1.0 / f(x), -(r * r), -(r * r) * s * s])

    def tetrad(x):
        r, th = x[1], x[2]
        sf = cf.sqrt(f(x))
        return _diag([sf, 1.0 / sf, r, r * cf.sin(th)])

    potential = _no_potential
    if q:
        potential = lambda x: [q / x[1], 0.0, 0.0, 0.0]  # noqa: E731
    return SpacetimeScenario(
        "schwarzschild",
        chart,
        metric,
        tetrad,
        potential_fn=potential,
        vacuum=True,
        params={"M": M, "q": q},
    )


def de_sitter(lam: float = 0.3, **_) -> SpacetimeScenario:
    """Flat slicing dt^2 - exp(2 H t) dx^2 with H = sqrt(lambda / 3)."""
    if not lam > 0:
        raise UsageError("de_sitter needs lambda > 0")
    H = math.sqrt(lam / 3.0)
    chart = Chart(("t", "x", "y", "z"), ((-1.0, 1.0),) * 4)

    def metric(x):
        a2 = cf.exp(x[0] * (2.0 * H))
        return _diag([1.0, -a2, -a2, -a2])

    def tetrad(x):
        a = cf.exp(x[0] * H)
        return _diag([1.0, a, a, a])

    return SpacetimeScenario("de_sitter", chart, metric, tetrad, lam=lam, vacuum=True, params={"lam": lam})


def frw_conformal(p: float = 1.0, **_) -> SpacetimeScenario:
    """Conformally flat FRW metric a(eta)^2 (d eta^2 - dx^2) with a = eta^p."""
    chart = Chart(("eta", "x", "y", "z"), ((1.0, 2.0), (-1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0)))

    def metric(x):
        a2 = cf.power(x[0], 2.0 * p)
        return _diag([a2, -a2, -a2, -a2])

    def tetrad(x):
        a = cf.power(x[0], float(p))
        return _diag([a, a, a, a])

    return SpacetimeScenario("frw_conformal", chart, metric, tetrad, vacuum=False, params={"p": p})


def pp_wave(amp: float = 0.5, **_) -> SpacetimeScenario:
    """Plane-fronted wave H du^2 + 2 du dv - dx^2 - dy^2, H = amp (x^2 - y^2) cos u."""
    chart = Chart(("u", "v", "x", "y"), ((-1.0, 1.0),) * 4)
    r2 = 1.0 / math.sqrt(2.0)

    def H(x):
        return (x[2] * x[2] - x[3] * x[3]) * cf.cos(x[0]) * amp

    def metric(x):
        h = H(x)
        return [[h, 1.0, 0.0, 0.0], [1.0, 0.0, 0.0, 0.0], [0.0, 0.0, -1.0, 0.0], [0.0, 0.0, 0.0, -1.0]]

    def tetrad(x):
        h = H(x) * (r2 / 2.0)
        return [[h + r2, 0.0, 0.0, h - r2], [r2, 0.0, 0.0, r2], [0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0]]

    return SpacetimeScenario("pp_wave", chart, metric, tetrad, vacuum=True, params={"amp": amp})


def coulomb_flat(q: float = 0.5, **_) -> SpacetimeScenario:
    """Flat space with the potential Phi_0 = q / r, sampled away from the origin."""
    chart = Chart(("t", "x", "y", "z"), ((-1.0, 1.0), (0.5, 1.5), (0.5, 1.5), (0.5, 1.5)))

    def potential(x):
        r = cf.sqrt(x[1] * x[1] + x[2] * x[2] + x[3] * x[3])
        return [q / r, 0.0, 0.0, 0.0]

    return SpacetimeScenario(
        "coulomb_flat",
        chart,
        metric_fn=lambda x: _diag([1.0, -1.0, -1.0, -1.0]),
        tetrad_fn=lambda x: _diag([1.0, 1.0, 1.0, 1.0]),
        potential_fn=potential,
        vacuum=True,
        params={"q": q},
    )


CATALOG: dict[str, Callable[..., SpacetimeScenario]] = {
    "minkowski": minkowski,
    "schwarzschild": schwarzschild,
    "de_sitter": de_sitter,
    "frw_conformal": frw_conformal,
    "pp_wave": pp_wave,
    "coulomb_flat": coulomb_flat,
}

CATALOG_DOC = {
    "minkowski": "flat space, Cartesian chart",
    "schwarzschild": "static black hole exterior, parameters M (mass), q (test charge)",
    "de_sitter": "flat-slicing de Sitter, parameter lam (cosmological constant)",
    "frw_conformal": "conformally flat FRW with a = eta^p, parameter p",
    "pp_wave": "vacuum plane-fronted wave, parameter amp",
    "coulomb_flat": "flat space with a Coulomb potential, parameter q",
}

_PARAM_ALIASES = {"lambda": "lam", "m": "M"}


def catalog_get(name: str, params: dict | None = None) -> SpacetimeScenario:
    """Catalog scenario by name, with keyword parameters.

    Extra parameters ``gamma_abs`` and ``gamma_phase`` (expression strings in
    the chart coordinates) set the gamma function.
    """
    if name not in CATALOG:
        raise UsageError(f"unknown scenario {name!r}; available: {', '.join(sorted(CATALOG))}")
    params = dict(params or {})
    params = {_PARAM_ALIASES.get(k, k): v for k, v in params.items()}
    gabs = params.pop("gamma_abs", None)
    gph = params.pop("gamma_phase", None)
    try:
        scen = CATALOG[name](**{k: float(v) for k, v in params.items()})
    except TypeError as exc:
        raise UsageError(f"invalid parameters for {name}: {exc}") from exc
    except ValueError as exc:
        raise UsageError(f"invalid parameters for {name}: {exc}") from exc
    names = scen.chart.coordinate_names
    changes = {}
    if gabs is not None:
        changes["gamma_abs_fn"] = gabs if callable(gabs) else compile_expression(str(gabs), names)
    if gph is not None:
        changes["gamma_phase_fn"] = gph if callable(gph) else compile_expression(str(gph), names)
    return scen.replace(**changes) if changes else scen


# ---------------------------------------------------------------------------
# expression grammar

_FUNCS = {
    "exp": cf.exp,
    "log": cf.log,
    "sin": cf.sin,
    "cos": cf.cos,
    "sqrt": cf.sqrt,
    "pow": lambda a, b: a**b,
}
_CONSTS = {"pi": math.pi, "e": math.e}


class _Compiler:
    def __init__(self, coord_names, params, allow_complex):
        self.coords = {n: i for i, n in enumerate(coord_names)}
        self.params = dict(params or {})
        self.allow_complex = allow_complex

    def fail(self, node, msg):
        raise ExpressionError(msg, getattr(node, "lineno", None), getattr(node, "col_offset", -1) + 1)

    def build(self, node):
        if isinstance(node, ast.Expression):
            return self.build(node.body)
        if isinstance(node, ast.Constant):
            if isinstance(node.value, bool) or not isinstance(node.value, (int, float)):
                self.fail(node, f"unsupported literal {node.value!r}")
            v = float(node.value)
            return lambda x: v
        if isinstance(node, ast.Name):
            if node.id in self.coords:
                k = self.coords[node.id]
                return lambda x: x[k]
            if node.id in self.params:
                v = float(self.params[node.id])
                return lambda x: v
            if node.id in _CONSTS:
                v = _CONSTS[node.id]
                return lambda x: v
            if node.id == "i" and self.allow_complex:
                return lambda x: 1j
            self.fail(node, f"unknown name {node.id!r}")
        if isinstance(node, ast.UnaryOp):
            inner = self.build(node.operand)
            if isinstance(node.op, ast.USub):
                return lambda x: -inner(x)
            if isinstance(node.op, ast.UAdd):
                return inner
            self.fail(node, "unsupported unary operator")
        if isinstance(node, ast.BinOp):
            a = self.build(node.left)
            b = self.build(node.right)
            op = node.op
            if isinstance(op, ast.Add):
                return lambda x: _arith(a(x), b(x), "+")
            if isinstance(op, ast.Sub):
                return lambda x: _arith(a(x), b(x), "-")
            if isinstance(op, ast.Mult):
                return lambda x: _arith(a(x), b(x), "*")
            if isinstance(op, ast.Div):
                return lambda x: _arith(a(x), b(x), "/")
            if isinstance(op, ast.Pow):
                return lambda x: _arith(a(x), b(x), "**")
            self.fail(node, "unsupported operator")
        if isinstance(node, ast.Call):
            if not isinstance(node.func, ast.Name) or node.func.id not in _FUNCS:
                self.fail(node, "unsupported function call")
            if node.keywords:
                self.fail(node, "keyword arguments are not allowed")
            fn = _FUNCS[node.func.id]
            want = 2 if node.func.id == "pow" else 1
            if len(node.args) != want:
                self.fail(node, f"{node.func.id} takes {want} argument(s)")
            args = [self.build(a) for a in node.args]
            if want == 1:
                return lambda x: fn(args[0](x))
            return lambda x: _arith(args[0](x), args[1](x), "**")
        self.fail(node, f"unsupported syntax {type(node).__name__}")


def _arith(a, b, op):
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "/":
        if not isinstance(b, Jet) and b == 0:
            raise ZeroDivisionError("division by zero")
        return a / b
    if isinstance(b, Jet):
        return cf.exp(cf.log(a) * b) if isinstance(a, Jet) else cf.exp(b * complex(np.log(a)))
    if isinstance(a, Jet):
        bf = float(np.real(b))
        if bf == int(bf) and bf >= 0:
            return a ** int(bf)
        return cf.power(a, bf)
    return a**b


def compile_expression(text: str, coord_names, params: dict | None = None, allow_complex: bool = False) -> Callable:
    """Compile an arithmetic expression into a function of coordinate jets.

    Only numbers, coordinate names, parameters, ``pi``, ``e``, the operators
    ``+ - * / **`` and the functions exp, log, sin, cos, sqrt, pow are
    accepted.  Numbers use a decimal point regardless of locale.
    """
    if not isinstance(text, str):
        if isinstance(text, (int, float)):
            v = float(text)
            return lambda x: v
        raise ExpressionError(f"expression must be a string, got {type(text).__name__}")
    src = text.replace("^", "**")
    try:
        tree = ast.parse(src.strip(), mode="eval")
    except SyntaxError as exc:
        # an offset of 0 means the input ended early
        col = exc.offset if exc.offset else len(src.strip()) + 1
        raise ExpressionError(f"cannot parse {text!r}: {exc.msg}", exc.lineno, col) from None
    return _Compiler(coord_names, params, allow_complex).build(tree)


# ---------------------------------------------------------------------------
# scenario files


def _require(data, key, path):
    if key not in data:
        raise ConfigurationError(f"{path}: missing field {key!r}")
    return data[key]


def _compile_at(text, names, params, where, allow_complex=False):
    try:
        return compile_expression(text, names, params, allow_complex)
    except ExpressionError as exc:
        err = ExpressionError(f"{where}: {exc.args[0]}")
        err.line, err.column = exc.line, exc.column
        raise err from None


def _matrix_fn(rows, names, params, what):
    if not isinstance(rows, list) or len(rows) != 4 or any(not isinstance(r, list) or len(r) != 4 for r in rows):
        raise ConfigurationError(f"{what} must be a 4x4 array of expressions")
    fns = [[_compile_at(e, names, params, f"{what}[{i}][{j}]") for j, e in enumerate(row)] for i, row in enumerate(rows)]
    return lambda x: [[f(x) for f in row] for row in fns]


def _vector_fn(items, names, params, what):
    if not isinstance(items, list) or len(items) != 4:
        raise ConfigurationError(f"{what} must be a list of 4 expressions")
    fns = [_compile_at(e, names, params, f"{what}[{i}]") for i, e in enumerate(items)]
    return lambda x: [f(x) for f in fns]


def scenario_from_dict(data: dict, source: str = "<dict>") -> SpacetimeScenario:
    if not isinstance(data, dict):
        raise ConfigurationError(f"{source}: scenario must be a JSON object")
    chart_d = _require(data, "chart", source)
    names = tuple(_require(chart_d, "names", source))
    region = tuple(tuple(float(v) for v in iv) for iv in _require(chart_d, "region", source))
    chart = Chart(names, region, bool(chart_d.get("signature_check", True)))
    params = {k: float(v) for k, v in data.get("params", {}).items()}
    metric = _matrix_fn(_require(data, "metric", source), names, params, "metric")
    tetrad = _matrix_fn(_require(data, "tetrad", source), names, params, "tetrad")
    kwargs = {}
    gam = data.get("gamma")
    if isinstance(gam, dict):
        if "abs" in gam:
            kwargs["gamma_abs_fn"] = compile_expression(gam["abs"], names, params)
        if "phase" in gam:
            kwargs["gamma_phase_fn"] = compile_expression(gam["phase"], names, params)
    elif isinstance(gam, (str, int, float)):
        cfn = compile_expression(gam, names, params, allow_complex=True)

        def gabs(x, cfn=cfn):
            v = cf.as_jet(cfn(x), x[0].order)
            return cf.sqrt((v * v.conj()).real)

        def gphase(x, cfn=cfn):
            v = cf.as_jet(cfn(x), x[0].order)
            return cf.log(v).imag

        kwargs["gamma_abs_fn"] = gabs
        kwargs["gamma_phase_fn"] = gphase
    elif gam is not None:
        raise ConfigurationError(f"{source}: gamma must be an expression or {{abs, phase}}")
    if "potential" in data:
        kwargs["potential_fn"] = _vector_fn(data["potential"], names, params, "potential")
    gauges = []
    for k, gd in enumerate(data.get("gauges", [])):
        gauges.append(
            GaugeSpec(
                compile_expression(gd.get("rho", "1"), names, params),
                compile_expression(gd.get("lambda", "0"), names, params),
                gd.get("label", f"gauge{k}"),
            )
        )
    probes = data.get("probes", {})
    scen = SpacetimeScenario(
        name=str(data.get("name", Path(source).stem)),
        chart=chart,
        metric_fn=metric,
        tetrad_fn=tetrad,
        lam=float(data.get("lambda", 0.0)),
        kappa=float(data.get("kappa", 1.0)),
        vacuum=bool(data.get("vacuum", False)),
        gauges=tuple(gauges),
        probe_count=int(probes.get("count", DEFAULT_PROBES)),
        probe_seed=int(probes.get("seed", DEFAULT_SEED)),
        params=params,
        **kwargs,
    )
    return scen


def load_scenario(path) -> SpacetimeScenario:
    """Read a JSON scenario file and check it at its probe points."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(f"cannot read scenario file {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ExpressionError(f"{path}: invalid JSON ({exc.msg})", exc.lineno, exc.colno) from None
    scen = scenario_from_dict(data, str(path))
    scen.validate()
    return scen


def resolve_scenario(spec: str, params: dict | None = None) -> SpacetimeScenario:
    """``catalog:name`` or a path to a scenario file."""
    if spec.startswith("catalog:"):
        return catalog_get(spec.split(":", 1)[1], params)
    if spec in CATALOG and not Path(spec).exists():
        return catalog_get(spec, params)
    return load_scenario(spec)
