"""Two-spinor algebra at a point: metric spinors, connecting objects, weights.

Every routine here is polymorphic over plain numpy arrays and
:class:`~spincurv.chart_fields.Jet` objects, so the same code serves both for
checking algebraic identities and as a building block of the differential
pipeline.

Index conventions
-----------------
* ``eps = [[0, 1], [-1, 0]]`` with both index positions numerically equal.
* ``nu^A = M^{AB} nu_B`` and ``nu_A = nu^B M_{BA}``; with these rules
  ``M^{CB} M_{CA} = delta_A^B``.
* Component arrays are stored in the order (world, unprimed, primed) and each
  slot carries its own stair.
* Primed metric spinors are complex conjugates of the unprimed ones.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from . import chart_fields as cf
from .chart_fields import Jet
from .errors import (
    ConfigurationError,
    FormalismInconsistencyError,
    InconsistentScenarioError,
    SingularMetricError,
    UsageError,
)

EPS = np.array([[0.0, 1.0], [-1.0, 0.0]], dtype=complex)
ETA = np.diag([1.0, -1.0, -1.0, -1.0]).astype(complex)
# identity plus Pauli matrices; Sigma_a = e_a^i TAU_i / sqrt(2)
TAU = np.array(
    [
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)

GAMMA = "gamma"
EPSILON = "epsilon"
FORMALISMS = (GAMMA, EPSILON)


def check_formalism(formalism: str) -> str:
    if formalism not in FORMALISMS:
        raise UsageError(f"unknown formalism {formalism!r}; expected one of {FORMALISMS}")
    return formalism


# ---------------------------------------------------------------------------
# small polymorphic helpers


def conj(x):
    return x.conj() if isinstance(x, Jet) else np.conj(x)


def value(x):
    """Point value of a jet, or the array itself."""
    return x.value if isinstance(x, Jet) else np.asarray(x)


def scale(s, arr):
    """Multiply the constant array ``arr`` by the scalar ``s`` (jet or number)."""
    if isinstance(s, Jet):
        return Jet(np.asarray(arr, dtype=complex)[..., None] * s.c, s.order)
    return np.asarray(s)[..., None, None] * arr if np.ndim(s) else s * np.asarray(arr)


def shape_of(x):
    return x.shape if isinstance(x, Jet) else np.shape(x)


def max_abs(x) -> float:
    v = value(x)
    return float(np.max(np.abs(v))) if np.size(v) else 0.0


def symmetrize(x, axes: Sequence[int]):
    """Average over all permutations of ``axes`` (1/n! normalisation)."""
    return _perm_average(x, axes, signed=False)


def antisymmetrize(x, axes: Sequence[int]):
    return _perm_average(x, axes, signed=True)


def _perm_sign(p) -> int:
    sign = 1
    p = list(p)
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


def _perm_average(x, axes, signed):
    axes = list(axes)
    nd = len(shape_of(x))
    total = None
    perms = list(itertools.permutations(range(len(axes))))
    for p in perms:
        order = list(range(nd))
        for k, src in enumerate(p):
            order[axes[k]] = axes[src]
        term = x.transpose(order) if isinstance(x, Jet) else np.transpose(x, order)
        if signed and _perm_sign(p) < 0:
            term = -term
        total = term if total is None else total + term
    return total * (1.0 / len(perms))


# ---------------------------------------------------------------------------
# valence and density weights


@dataclass(frozen=True)
class Valence:
    world_up: int = 0
    world_down: int = 0
    unprimed_up: int = 0
    unprimed_down: int = 0
    primed_up: int = 0
    primed_down: int = 0

    def __post_init__(self):
        for v in self.as_tuple():
            if v < 0:
                raise ValueError("valence entries must be nonnegative")

    def as_tuple(self):
        return (
            self.world_up,
            self.world_down,
            self.unprimed_up,
            self.unprimed_down,
            self.primed_up,
            self.primed_down,
        )

    @property
    def size(self) -> int:
        p, q, a, b, c, d = self.as_tuple()
        return 4 ** (p + q) * 2 ** (a + b + c + d)


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError("density weights must be finite")
        return Fraction(x).limit_denominator(1000)
    return Fraction(x)


@dataclass(frozen=True)
class DensityWeight:
    """Gauge weight, antiweight, absolute weight and world weight.

    Under a gauge element with determinant ``D = rho exp(2 i Lambda)`` a
    density picks up ``D**a * conj(D)**b * abs(D)**c``.  Different tuples can
    give the same factor, so equality of gauge behaviour is decided by
    :meth:`effective`.
    """

    weight: Fraction = Fraction(0)
    antiweight: Fraction = Fraction(0)
    absolute: Fraction = Fraction(0)
    world: Fraction = Fraction(0)

    def __post_init__(self):
        for name in ("weight", "antiweight", "absolute", "world"):
            object.__setattr__(self, name, _frac(getattr(self, name)))

    def __add__(self, other: "DensityWeight") -> "DensityWeight":
        return compose_weights(self, other)

    def __neg__(self):
        return DensityWeight(-self.weight, -self.antiweight, -self.absolute, -self.world)

    def conjugate(self) -> "DensityWeight":
        return DensityWeight(self.antiweight, self.weight, self.absolute, self.world)

    def effective(self) -> tuple[Fraction, Fraction, Fraction]:
        """(power of rho, power of exp(2 i Lambda), world weight)."""
        return (self.weight + self.antiweight + self.absolute, self.weight - self.antiweight, self.world)

    def same_gauge_behaviour(self, other: "DensityWeight") -> bool:
        return self.effective() == other.effective()

    @property
    def is_zero(self) -> bool:
        return self.effective() == (0, 0, 0)

    def gauge_factor(self, rho, lam):
        """``D**a conj(D)**b |D|**c`` for ``D = rho exp(2 i lam)``; works on jets."""
        p_rho, p_phase, _ = self.effective()
        out = 1.0
        if p_rho:
            out = cf.power(rho, float(p_rho)) if isinstance(rho, Jet) else np.power(rho, float(p_rho))
        if p_phase:
            out = out * cf.exp(lam * (2j * float(p_phase)))
        return out

    def connection_term(self, trace, world_trace):
        """Coefficient of the density term in a covariant derivative.

        ``trace`` is the contracted spin affinity and ``world_trace`` the
        contracted Christoffel symbol; the derivative carries ``-term * field``.
        """
        term = None

        def add(acc, x):
            return x if acc is None else acc + x

        if self.weight:
            term = add(term, trace * float(self.weight))
        if self.antiweight:
            term = add(term, conj(trace) * float(self.antiweight))
        if self.absolute:
            re = (trace + conj(trace)) * 0.5
            term = add(term, re * float(self.absolute))
        if self.world:
            term = add(term, world_trace * float(self.world))
        return term


ZERO_WEIGHT = DensityWeight()


def compose_weights(w1: DensityWeight, w2: DensityWeight) -> DensityWeight:
    """Weights of an outer product: componentwise sum."""
    return DensityWeight(
        w1.weight + w2.weight,
        w1.antiweight + w2.antiweight,
        w1.absolute + w2.absolute,
        w1.world + w2.world,
    )


def invariant_weight(slots, formalism: str) -> DensityWeight:
    """Weight that makes a field with these slots gauge invariant.

    Zero in the gamma formalism; in the epsilon formalism each unprimed slot
    contributes weight +-1/2 and each primed slot antiweight +-1/2 (up/down).
    """
    check_formalism(formalism)
    if formalism == GAMMA:
        return ZERO_WEIGHT
    slots = parse_slots(slots)
    w = sum(Fraction(1, 2) if s == "s^" else Fraction(-1, 2) for s in slots if s[0] == "s")
    b = sum(Fraction(1, 2) if s == "p^" else Fraction(-1, 2) for s in slots if s[0] == "p")
    return DensityWeight(w, b, 0, 0)


# ---------------------------------------------------------------------------
# spinor fields

# slot codes: "w" world, "s" unprimed spinor, "p" primed spinor; "^" up, "_" down
SLOT_KINDS = ("w", "s", "p")
_KIND_RANK = {"w": 0, "s": 1, "p": 2}


def parse_slots(slots) -> tuple[str, ...]:
    if isinstance(slots, str):
        slots = slots.split()
    out = tuple(slots)
    last = -1
    for s in out:
        if len(s) != 2 or s[0] not in SLOT_KINDS or s[1] not in "^_":
            raise ValueError(f"bad slot code {s!r}")
        rank = _KIND_RANK[s[0]]
        if rank < last:
            raise ValueError("slots must be ordered world, unprimed, primed")
        last = rank
    return out


def valence_of(slots) -> Valence:
    slots = parse_slots(slots)
    count = {s: 0 for s in ("w^", "w_", "s^", "s_", "p^", "p_")}
    for s in slots:
        count[s] += 1
    return Valence(count["w^"], count["w_"], count["s^"], count["s_"], count["p^"], count["p_"])


@dataclass(frozen=True)
class SpinorField:
    """Components of a world-spin quantity at one point.

    ``components`` is either an ndarray or a jet whose component shape has one
    axis per slot (4 for world slots, 2 for spinor slots).
    """

    components: object
    slots: tuple
    dweight: DensityWeight = ZERO_WEIGHT
    formalism: str = EPSILON
    symmetries: tuple = ()
    hermitian: bool = False

    def __post_init__(self):
        slots = parse_slots(self.slots)
        object.__setattr__(self, "slots", slots)
        check_formalism(self.formalism)
        expected = tuple(4 if s[0] == "w" else 2 for s in slots)
        if tuple(shape_of(self.components)) != expected:
            raise ValueError(f"component shape {shape_of(self.components)} does not match slots {slots}")
        if self.dweight is None:
            raise ConfigurationError("density weight metadata missing")

    @property
    def valence(self) -> Valence:
        return valence_of(self.slots)

    @property
    def is_jet(self) -> bool:
        return isinstance(self.components, Jet)

    def with_components(self, comps, slots=None, dweight=None) -> "SpinorField":
        return replace(
            self,
            components=comps,
            slots=self.slots if slots is None else slots,
            dweight=self.dweight if dweight is None else dweight,
            symmetries=() if slots is not None else self.symmetries,
            hermitian=False if slots is not None else self.hermitian,
        )

    def symmetry_residual(self) -> float:
        """Largest violation of the declared symmetries, relative to the field size."""
        comps = value(self.components)
        scale_ = max(float(np.max(np.abs(comps))) if comps.size else 0.0, 1e-13)
        worst = 0.0
        for axes in self.symmetries:
            sym = symmetrize(comps, axes)
            worst = max(worst, float(np.max(np.abs(sym - comps))) / scale_)
        if self.hermitian:
            worst = max(worst, float(np.max(np.abs(hermitian_conjugate(self) - comps))) / scale_)
        return worst


def hermitian_conjugate(fld: SpinorField) -> np.ndarray:
    """Complex conjugate with unprimed and primed groups swapped."""
    comps = value(fld.components)
    nw = sum(1 for s in fld.slots if s[0] == "w")
    ns = sum(1 for s in fld.slots if s[0] == "s")
    npr = sum(1 for s in fld.slots if s[0] == "p")
    if ns != npr:
        raise ValueError("hermiticity needs matching unprimed and primed slots")
    order = list(range(nw)) + list(range(nw + ns, nw + ns + npr)) + list(range(nw, nw + ns))
    return np.conj(np.transpose(comps, order))


# ---------------------------------------------------------------------------
# metric spinors


@dataclass(frozen=True)
class SpinMetric:
    """Metric spinor ``M_AB`` of either formalism.

    ``gamma`` is the independent component (a number, an array over points,
    or a jet); it is identically 1 in the epsilon formalism.
    """

    formalism: str
    gamma: object = 1.0

    @property
    def lower(self):
        return scale(self.gamma, EPS)

    @property
    def upper(self):
        if isinstance(self.gamma, Jet):
            return scale(cf.reciprocal(self.gamma), EPS)
        return scale(1.0 / np.asarray(self.gamma, dtype=complex), EPS)

    @property
    def lower_bar(self):
        return conj(self.lower)

    @property
    def upper_bar(self):
        return conj(self.upper)

    @property
    def gamma_abs(self):
        g = self.gamma
        if isinstance(g, Jet):
            return cf.sqrt(g * g.conj())
        return np.abs(g)

    def at(self, i: int) -> "SpinMetric":
        g = self.gamma
        if isinstance(g, Jet) or np.ndim(g) == 0:
            return self
        return SpinMetric(self.formalism, complex(np.asarray(g)[i]))


def make_spin_metric(formalism: str, gamma_fn: Callable | None, points) -> SpinMetric:
    """Metric spinor blocks at ``points`` (array of gamma values over points)."""
    check_formalism(formalism)
    pts = list(points)
    if formalism == EPSILON:
        return SpinMetric(EPSILON, np.ones(len(pts), dtype=complex))
    if gamma_fn is None:
        raise ConfigurationError("the gamma formalism needs a gamma function")
    vals = np.array([complex(value(gamma_fn(list(p)))) for p in pts], dtype=complex)
    for p, v in zip(pts, vals):
        if v == 0 or not np.isfinite(v):
            raise SingularMetricError("gamma vanishes", point=tuple(p))
    return SpinMetric(GAMMA, vals)


def _metric_blocks(metric: SpinMetric, primed: bool):
    if primed:
        return metric.lower_bar, metric.upper_bar
    return metric.lower, metric.upper


def _slot_axis(slots, slot: int) -> int:
    if not 0 <= slot < len(slots):
        raise IndexError("slot out of range")
    return slot


def contract_slot(comps, axis: int, matrix, matrix_axis: int):
    """Contract array ``comps`` along ``axis`` with ``matrix`` along ``matrix_axis``.

    The free index of ``matrix`` takes the place of the contracted axis.
    """
    nd = len(shape_of(comps))
    letters = "abcdefghijklmnop"[:nd]
    z = "z"
    out = letters[:axis] + z + letters[axis + 1 :]
    mat = (letters[axis] + z) if matrix_axis == 0 else (z + letters[axis])
    return cf.einsum(f"{letters},{mat}->{out}", comps, matrix)


def adjust_index(fld: SpinorField, slot: int, direction: str, metric: SpinMetric) -> SpinorField:
    """Raise or lower one spinor slot with the metric spinor."""
    slot = _slot_axis(fld.slots, slot)
    kind, stair = fld.slots[slot]
    if kind == "w":
        raise TypeError("adjust_index acts on spinor slots only")
    if metric.formalism != fld.formalism:
        raise FormalismInconsistencyError("metric and field belong to different formalisms")
    lower, upper = _metric_blocks(metric, kind == "p")
    comps = fld.components
    if direction == "raise":
        if stair != "_":
            raise TypeError("slot is already up")
        # nu^A = M^{AB} nu_B : contract field axis with the second index of M^{AB}
        new = contract_slot(comps, slot, upper, 1)
        new_stair = "^"
        delta = 1
    elif direction == "lower":
        if stair != "^":
            raise TypeError("slot is already down")
        # nu_A = nu^B M_{BA} : contract with the first index of M_{BA}
        new = contract_slot(comps, slot, lower, 0)
        new_stair = "_"
        delta = -1
    else:
        raise ValueError("direction must be 'raise' or 'lower'")
    slots = list(fld.slots)
    slots[slot] = kind + new_stair
    dw = fld.dweight
    if fld.formalism == EPSILON:
        if kind == "s":
            dw = replace(dw, weight=dw.weight + delta)
        else:
            dw = replace(dw, antiweight=dw.antiweight + delta)
    return SpinorField(new, tuple(slots), dw, fld.formalism, fld.symmetries, False)


# ---------------------------------------------------------------------------
# connecting objects


@dataclass(frozen=True)
class ConnectingObjects:
    """Hermitian connecting objects, arrays indexed [a, A, A'].

    ``up_spin``: S_a^{AA'}; ``up_up``: S^{aAA'}; ``down_down``: S_{aAA'};
    ``up_down``: S^a_{AA'}.
    """

    formalism: str
    up_spin: object
    up_up: object
    down_down: object
    up_down: object
    metric: SpinMetric
    g: object
    g_inv: object


def sigma_from_tetrad(tetrad):
    """Sigma_a^{AA'} = e_a^i TAU_i / sqrt(2) for tetrad rows indexed by world index."""
    return cf.einsum("ai,iAB->aAB", tetrad, TAU / math.sqrt(2.0))


def metric_from_tetrad(tetrad):
    return cf.einsum("ai,ij,bj->ab", tetrad, ETA, tetrad)


def lower_spin_pair(obj, metric: SpinMetric):
    """T_{..AA'} from T_..^{BB'} using M_{BA} and its conjugate."""
    return cf.einsum("aBC,BA,CD->aAD", obj, metric.lower, metric.lower_bar)


def raise_spin_pair(obj, metric: SpinMetric):
    return cf.einsum("AB,CD,aBD->aAC", metric.upper, metric.upper_bar, obj)


def connecting_from_tetrad(tetrad, g, formalism: str, gamma=1.0, g_inv=None, tol: float = 1e-8):
    """Build the four Hermitian connecting objects at one point.

    ``tetrad`` and ``g`` may be arrays or jets; ``gamma`` is the value (or jet)
    of the gamma function and is ignored in the epsilon formalism.
    """
    check_formalism(formalism)
    g_t = metric_from_tetrad(tetrad)
    mismatch = float(np.max(np.abs(value(g_t) - value(g))))
    scale_ = max(float(np.max(np.abs(value(g)))), 1.0)
    if mismatch > tol * scale_:
        raise InconsistentScenarioError(f"tetrad does not reproduce the metric (mismatch {mismatch:.3e})")
    metric = SpinMetric(formalism, 1.0 if formalism == EPSILON else gamma)
    sig = sigma_from_tetrad(tetrad)
    if formalism == GAMMA:
        gabs = metric.gamma_abs
        if max_abs(gabs) == 0:
            raise SingularMetricError("gamma vanishes")
        up = sig * cf.reciprocal(gabs) if isinstance(gabs, Jet) else sig / gabs
    else:
        up = sig
    if g_inv is None:
        g_inv = cf.inv(g) if isinstance(g, Jet) else np.linalg.inv(g)
    dd = lower_spin_pair(up, metric)
    ud = cf.einsum("ab,bAB->aAB", g_inv, dd)
    uu = cf.einsum("ab,bAB->aAB", g_inv, up)
    return ConnectingObjects(formalism, up, uu, dd, ud, metric, g, g_inv)


def translate_world_up(vec, conn: ConnectingObjects):
    """u^{AA'} = S_a^{AA'} u^a."""
    return cf.einsum("a,aAB->AB", vec, conn.up_spin)


def world_spin_translate(fld: SpinorField, conn: ConnectingObjects, direction: str) -> SpinorField:
    """Convert every world slot to a spinor pair, or every spinor pair to a world slot.

    world->spin: each world slot becomes a leading unprimed slot and a leading
    primed slot with the same stair.  spin->world: the leading unprimed and
    primed slots are paired in order.
    """
    if fld.formalism != conn.formalism:
        raise FormalismInconsistencyError("field and connecting objects belong to different formalisms")
    comps = fld.components
    slots = list(fld.slots)
    dw = fld.dweight
    eps_form = fld.formalism == EPSILON
    if direction == "world->spin":
        world = [s for s in slots if s[0] == "w"]
        rest_s = [s for s in slots if s[0] == "s"]
        rest_p = [s for s in slots if s[0] == "p"]
        for k, s in enumerate(world):
            # the next world slot is always axis 0; u^{AA'} = S_a^{AA'} u^a
            obj = conn.up_spin if s[1] == "^" else conn.up_down
            nd = len(shape_of(comps))
            letters = "bcdefghijklmnopq"[: nd - 1]
            comps = cf.einsum(f"a{letters},aXY->{letters}XY", comps, obj)
            if eps_form:
                dw = replace(dw, absolute=dw.absolute + (1 if s[1] == "^" else -1))
        # comps axes: remaining world(0) + rest_s + rest_p + (X,Y) * nworld
        nw = len(world)
        ns, npr = len(rest_s), len(rest_p)
        base = ns + npr
        new_s = [base + 2 * k for k in range(nw)]
        new_p = [base + 2 * k + 1 for k in range(nw)]
        order = new_s + list(range(ns)) + new_p + list(range(ns, ns + npr))
        comps = comps.transpose(order) if isinstance(comps, Jet) else np.transpose(comps, order)
        new_slots = ["s" + s[1] for s in world] + rest_s + ["p" + s[1] for s in world] + rest_p
        return SpinorField(comps, tuple(new_slots), dw, fld.formalism)
    if direction == "spin->world":
        world = [s for s in slots if s[0] == "w"]
        if world:
            raise ValueError("spin->world expects a field without world slots")
        s_slots = [s for s in slots if s[0] == "s"]
        p_slots = [s for s in slots if s[0] == "p"]
        if len(s_slots) != len(p_slots):
            raise ValueError("need matching unprimed and primed slots")
        for s, p in zip(s_slots, p_slots):
            if s[1] != p[1]:
                raise ValueError("paired slots must share a stair")
        n = len(s_slots)
        # bring pairs together: (A1, A1', A2, A2', ...)
        order = []
        for k in range(n):
            order += [k, n + k]
        comps = comps.transpose(order) if isinstance(comps, Jet) else np.transpose(comps, order)
        for k in range(n):
            stair = s_slots[k][1]
            # u^a = S^a_{AA'} u^{AA'};  u_a = S_a^{AA'} u_{AA'}
            obj = conn.up_down if stair == "^" else conn.up_spin
            nd = len(shape_of(comps))
            rest = "cdefghijklmnopqr"[: nd - 2]
            comps = cf.einsum(f"XY{rest},aXY->{rest}a", comps, obj)
            if eps_form:
                dw = replace(dw, absolute=dw.absolute + (-1 if stair == "^" else 1))
        return SpinorField(comps, tuple("w" + s[1] for s in s_slots), dw, fld.formalism)
    raise ValueError("direction must be 'world->spin' or 'spin->world'")


# ---------------------------------------------------------------------------
# alternating spinor and algebraic identities


def alternating_spinor(metric: SpinMetric) -> SpinorField:
    """e_{AA'BB'CC'DD'} stored as [A, B, C, D, A', B', C', D']."""
    m = value(metric.lower)
    mb = np.conj(m)
    first = np.einsum("AC,BD,PS,QR->ABCDPQRS", m, m, mb, mb)
    second = np.einsum("PR,QS,AD,BC->ABCDPQRS", mb, mb, m, m)
    comps = 1j * (first - second)
    w = DensityWeight(-2, -2, 0, 0) if metric.formalism == EPSILON else ZERO_WEIGHT
    return SpinorField(comps, ("s_",) * 4 + ("p_",) * 4, w, metric.formalism)


def alternating_world(metric: SpinMetric, conn: ConnectingObjects) -> np.ndarray:
    """World alternating tensor from the spinor one."""
    e = alternating_spinor(metric).components
    s = value(conn.up_spin)
    return np.einsum("aAP,bBQ,cCR,dDS,ABCDPQRS->abcd", s, s, s, s, e)


def levi_civita() -> np.ndarray:
    out = np.zeros((4,) * 4)
    for p in itertools.permutations(range(4)):
        out[p] = _perm_sign(p)
    return out


def _rel(res, ref) -> float:
    r = float(np.max(np.abs(res))) if np.size(res) else 0.0
    s = float(np.max(np.abs(ref))) if np.size(ref) else 0.0
    return r / max(s, 1.0)


def algebra_residuals(conn: ConnectingObjects, rng: np.random.Generator | None = None) -> dict[str, float]:
    """Residuals of the basic metric and connecting-object identities at one point.

    Keys: ``inverse_metric``, ``antisymmetric_product``, ``anticommutator``,
    ``metric_reproduction``, ``triple_antisymmetry``, ``hermiticity`` and
    ``completeness``.
    """
    rng = rng or np.random.default_rng(0)
    m = conn.metric
    lo = value(m.lower)
    up = value(m.upper)
    out = {}
    out["inverse_metric"] = _rel(np.einsum("CB,CA->AB", up, lo).T - np.eye(2), np.eye(2))
    s_up = value(conn.up_spin)
    s_dd = value(conn.down_down)
    s_ud = value(conn.up_down)
    s_uu = value(conn.up_up)
    g = value(conn.g)
    # S_{AA'[a} S_{b]}^{AA'} = 0
    prod = np.einsum("aAB,bAB->ab", s_dd, s_up)
    out["antisymmetric_product"] = _rel(0.5 * (prod - prod.T), prod)
    # S^{aA}_{A'} S_a^{BA'} = 2 M^{AB}
    mixed = np.einsum("aAC,CD->aAD", s_uu, np.conj(lo))  # S^{aA}_{A'}
    anti = np.einsum("aAD,aBD->AB", mixed, s_up)
    out["anticommutator"] = _rel(anti - 2 * up, up)
    recon = np.einsum("aAP,bBQ,AB,PQ->ab", s_up, s_up, lo, np.conj(lo))
    out["metric_reproduction"] = _rel(recon - g, g)
    # M_[AB M_C]D == 0 for a random D: use full antisymmetrisation over ABC
    t = np.einsum("AB,CD->ABCD", lo, lo)
    out["triple_antisymmetry"] = _rel(antisymmetrize(t, (0, 1, 2)), t)
    herm = 0.0
    for obj in (s_up, s_uu, s_dd, s_ud):
        herm = max(herm, _rel(obj - np.conj(np.transpose(obj, (0, 2, 1))), obj))
    out["hermiticity"] = herm
    comp = np.einsum("bBP,bCQ->BPCQ", s_up, s_ud)
    ident = np.einsum("BC,PQ->BPCQ", np.eye(2), np.eye(2))
    out["completeness"] = _rel(comp - ident, ident)
    return out
