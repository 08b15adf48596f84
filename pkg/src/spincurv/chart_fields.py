"""Charts, probe points and exact derivatives through truncated Taylor jets.

A :class:`Jet` stores, for every component of a tensor, the Taylor
coefficients ``c_alpha = d^alpha f / alpha!`` of a function of the four chart
coordinates up to a fixed total order.  Arithmetic on jets is exact up to
rounding, so partial derivatives never carry discretisation error.  The
coefficient axis is always the last array axis, which keeps ordinary numpy
broadcasting for the component axes.
"""

from __future__ import annotations

import itertools
import math
import string
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigurationError, EvaluationError, InsufficientOrderError

DIM = 4
MAX_ORDER = 6


@lru_cache(maxsize=None)
def _monomials(order: int) -> tuple[tuple[int, ...], ...]:
    monos = []
    for deg in range(order + 1):
        for combo in itertools.combinations_with_replacement(range(DIM), deg):
            m = [0] * DIM
            for v in combo:
                m[v] += 1
            monos.append(tuple(m))
    return tuple(monos)


@dataclass(frozen=True)
class _Tables:
    order: int
    size: int
    monos: tuple
    index: dict
    left: np.ndarray
    right: np.ndarray
    starts: np.ndarray
    deriv_src: np.ndarray  # (DIM, size_lower)
    deriv_fac: np.ndarray  # (DIM, size_lower)


@lru_cache(maxsize=None)
def _tables(order: int) -> _Tables:
    if order < 0 or order > MAX_ORDER:
        raise InsufficientOrderError(f"jet order {order} outside 0..{MAX_ORDER}")
    monos = _monomials(order)
    index = {m: i for i, m in enumerate(monos)}
    triples = []
    for i, mi in enumerate(monos):
        di = sum(mi)
        for j, mj in enumerate(monos):
            if di + sum(mj) <= order:
                k = index[tuple(a + b for a, b in zip(mi, mj))]
                triples.append((k, i, j))
    triples.sort()
    ks = np.array([t[0] for t in triples])
    left = np.array([t[1] for t in triples])
    right = np.array([t[2] for t in triples])
    starts = np.searchsorted(ks, np.arange(len(monos)))
    lower = _monomials(order - 1) if order > 0 else ()
    src = np.zeros((DIM, len(lower)), dtype=int)
    fac = np.zeros((DIM, len(lower)))
    for v in range(DIM):
        for n, m in enumerate(lower):
            up = list(m)
            up[v] += 1
            src[v, n] = index[tuple(up)]
            fac[v, n] = up[v]
    return _Tables(order, len(monos), monos, index, left, right, starts, src, fac)


def jet_size(order: int) -> int:
    return _tables(order).size


def _as_array(x):
    return np.asarray(x, dtype=complex)


class Jet:
    """Tensor-valued truncated Taylor expansion about a probe point."""

    __slots__ = ("c", "order")
    __array_priority__ = 1000

    def __init__(self, coeffs, order: int):
        c = np.asarray(coeffs, dtype=complex)
        if c.shape[-1] != jet_size(order):
            raise ValueError(f"coefficient axis {c.shape[-1]} does not match order {order}")
        self.c = c
        self.order = order

    # construction -------------------------------------------------------
    @classmethod
    def constant(cls, value, order: int) -> "Jet":
        v = _as_array(value)
        c = np.zeros(v.shape + (jet_size(order),), dtype=complex)
        c[..., 0] = v
        return cls(c, order)

    @classmethod
    def variables(cls, point: Sequence[float], order: int) -> list["Jet"]:
        out = []
        for i in range(DIM):
            c = np.zeros(jet_size(order), dtype=complex)
            c[0] = point[i]
            if order >= 1:
                c[1 + i] = 1.0
            out.append(cls(c, order))
        return out

    # basic properties ---------------------------------------------------
    @property
    def shape(self) -> tuple:
        return self.c.shape[:-1]

    @property
    def ndim(self) -> int:
        return self.c.ndim - 1

    @property
    def value(self) -> np.ndarray:
        return self.c[..., 0]

    def __repr__(self) -> str:
        return f"Jet(shape={self.shape}, order={self.order})"

    def truncate(self, order: int) -> "Jet":
        if order > self.order:
            raise InsufficientOrderError(f"cannot raise jet order {self.order} to {order}")
        if order == self.order:
            return self
        return Jet(self.c[..., : jet_size(order)], order)

    def __getitem__(self, idx) -> "Jet":
        if not isinstance(idx, tuple):
            idx = (idx,)
        moved = np.moveaxis(self.c, -1, 0)
        return Jet(np.moveaxis(moved[(slice(None),) + idx], 0, -1), self.order)

    def transpose(self, *axes) -> "Jet":
        if len(axes) == 1 and isinstance(axes[0], (tuple, list)):
            axes = tuple(axes[0])
        return Jet(np.transpose(self.c, tuple(axes) + (self.ndim,)), self.order)

    def reshape(self, *shape) -> "Jet":
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        return Jet(self.c.reshape(tuple(shape) + (self.c.shape[-1],)), self.order)

    def sum(self, axis=None) -> "Jet":
        if axis is None:
            axis = tuple(range(self.ndim))
        return Jet(self.c.sum(axis=axis), self.order)

    def conj(self) -> "Jet":
        return Jet(np.conj(self.c), self.order)

    @property
    def real(self) -> "Jet":
        return Jet(self.c.real.astype(complex), self.order)

    @property
    def imag(self) -> "Jet":
        return Jet(self.c.imag.astype(complex), self.order)

    # arithmetic ---------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, Jet):
            order = min(self.order, other.order)
            return self.truncate(order).c, other.truncate(order).c, order, True
        arr = _as_array(other)
        return self.c, arr, self.order, False

    def __add__(self, other):
        a, b, order, is_jet = self._coerce(other)
        if is_jet:
            return Jet(a + b, order)
        c = a.copy() if a.shape[:-1] == np.broadcast_shapes(a.shape[:-1], b.shape) else np.broadcast_to(
            a, np.broadcast_shapes(a.shape[:-1], b.shape) + a.shape[-1:]
        ).copy()
        c[..., 0] = c[..., 0] + b
        return Jet(c, order)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.c, self.order)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        a, b, order, is_jet = self._coerce(other)
        if not is_jet:
            return Jet(a * b[..., None], order)
        t = _tables(order)
        prod = a[..., t.left] * b[..., t.right]
        return Jet(np.add.reduceat(prod, t.starts, axis=-1), order)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * reciprocal(other)
        return Jet(self.c / _as_array(other)[..., None], self.order)

    def __rtruediv__(self, other):
        return reciprocal(self) * other

    def __pow__(self, p):
        if isinstance(p, Jet):
            return exp(log(self) * p)
        if isinstance(p, (int, np.integer)) and p >= 0:
            out = Jet.constant(np.ones(self.shape), self.order)
            base = self
            n = int(p)
            while n:
                if n & 1:
                    out = out * base
                n >>= 1
                if n:
                    base = base * base
            return out
        return power(self, p)

    # derivatives --------------------------------------------------------
    def d(self, i: int) -> "Jet":
        if self.order < 1:
            raise InsufficientOrderError("derivative of an order-0 jet")
        t = _tables(self.order)
        return Jet(self.c[..., t.deriv_src[i]] * t.deriv_fac[i], self.order - 1)

    def grad(self) -> "Jet":
        """Partial derivatives with the derivative index as a new leading axis."""
        if self.order < 1:
            raise InsufficientOrderError("derivative of an order-0 jet")
        t = _tables(self.order)
        c = self.c[..., t.deriv_src] * t.deriv_fac
        # c has shape (*shape, DIM, n); move DIM to the front
        return Jet(np.moveaxis(c, -2, 0), self.order - 1)


JetLike = "Jet | complex | np.ndarray"


def _compose(x: "Jet", derivs: Sequence[np.ndarray]) -> "Jet":
    """Evaluate f(x) from f and its derivatives at the constant term of x."""
    h = Jet(x.c.copy(), x.order)
    h.c[..., 0] = 0.0
    out = Jet.constant(derivs[0], x.order)
    power_h = None
    for n in range(1, x.order + 1):
        power_h = h if power_h is None else power_h * h
        out = out + power_h * (derivs[n] / math.factorial(n))
    return out


def _values(x):
    return x.value


def exp(x):
    if not isinstance(x, Jet):
        return np.exp(x)
    e = np.exp(x.value)
    return _compose(x, [e] * (x.order + 1))


def log(x):
    if not isinstance(x, Jet):
        return np.log(x)
    a = x.value
    if np.any(a == 0):
        raise EvaluationError("log of zero")
    derivs = [np.log(a)]
    for n in range(1, x.order + 1):
        derivs.append((-1) ** (n - 1) * math.factorial(n - 1) / a**n)
    return _compose(x, derivs)


def sin(x):
    if not isinstance(x, Jet):
        return np.sin(x)
    a = x.value
    cyc = [np.sin(a), np.cos(a), -np.sin(a), -np.cos(a)]
    return _compose(x, [cyc[n % 4] for n in range(x.order + 1)])


def cos(x):
    if not isinstance(x, Jet):
        return np.cos(x)
    a = x.value
    cyc = [np.cos(a), -np.sin(a), -np.cos(a), np.sin(a)]
    return _compose(x, [cyc[n % 4] for n in range(x.order + 1)])


def power(x, p):
    if not isinstance(x, Jet):
        return np.power(x, p)
    a = x.value
    if np.any(a == 0) and (p < x.order or p != int(p)):
        raise EvaluationError("non-analytic power at zero")
    derivs = []
    coef = 1.0
    for n in range(x.order + 1):
        derivs.append(coef * a ** (p - n))
        coef *= p - n
    return _compose(x, derivs)


def sqrt(x):
    if not isinstance(x, Jet):
        return np.sqrt(x)
    return power(x, 0.5)


def reciprocal(x):
    if not isinstance(x, Jet):
        return 1.0 / np.asarray(x)
    a = x.value
    if np.any(a == 0):
        raise EvaluationError("division by zero")
    derivs = [(-1) ** n * math.factorial(n) / a ** (n + 1) for n in range(x.order + 1)]
    return _compose(x, derivs)


def stack(items: Sequence, axis: int = 0, order: int | None = None) -> Jet:
    """Stack jets and plain numbers into one jet (nested lists allowed)."""

    def flatten(obj):
        if isinstance(obj, (list, tuple)):
            return [flatten(o) for o in obj]
        return obj

    def min_order(obj):
        if isinstance(obj, (list, tuple)):
            orders = [min_order(o) for o in obj]
            orders = [o for o in orders if o is not None]
            return min(orders) if orders else None
        if isinstance(obj, Jet):
            return obj.order
        return None

    o = min_order(items) if order is None else order
    if o is None:
        raise ValueError("stack needs an explicit order when no jets are present")

    def to_coeffs(obj):
        if isinstance(obj, (list, tuple)):
            return np.stack([to_coeffs(v) for v in obj], axis=0)
        if isinstance(obj, Jet):
            return obj.truncate(o).c
        return Jet.constant(obj, o).c

    c = to_coeffs(flatten(items))
    if axis != 0:
        c = np.moveaxis(c, 0, axis)
    return Jet(c, o)


def _free_letter(subs: str) -> str:
    for ch in string.ascii_letters:
        if ch not in subs:
            return ch
    raise ValueError("no free einsum letter")


def _pair(sa: str, a, sb: str, b, out: str):
    za = isinstance(a, Jet)
    zb = isinstance(b, Jet)
    if not za and not zb:
        return np.einsum(f"{sa},{sb}->{out}", a, b)
    z = _free_letter(sa + sb + out)
    if za and not zb:
        return Jet(np.einsum(f"{sa}{z},{sb}->{out}{z}", a.c, _as_array(b)), a.order)
    if zb and not za:
        return Jet(np.einsum(f"{sa},{sb}{z}->{out}{z}", _as_array(a), b.c), b.order)
    order = min(a.order, b.order)
    t = _tables(order)
    ac = a.truncate(order).c[..., t.left]
    bc = b.truncate(order).c[..., t.right]
    prod = np.einsum(f"{sa}{z},{sb}{z}->{out}{z}", ac, bc)
    return Jet(np.add.reduceat(prod, t.starts, axis=-1), order)


def einsum(subscripts: str, *operands):
    """Einstein summation over jets and constant arrays (coefficient axis implicit)."""
    subscripts = subscripts.replace(" ", "")
    lhs, out = subscripts.split("->")
    specs = lhs.split(",")
    if len(specs) != len(operands):
        raise ValueError("operand count does not match subscripts")
    if len(operands) == 1:
        a = operands[0]
        if isinstance(a, Jet):
            z = _free_letter(subscripts)
            return Jet(np.einsum(f"{specs[0]}{z}->{out}{z}", a.c), a.order)
        return np.einsum(subscripts, a)
    # fold constants first so jet products stay small
    ops = list(zip(specs, operands))
    ops.sort(key=lambda so: isinstance(so[1], Jet))
    dims = {}
    for sp, op in ops:
        for ch, n in zip(sp, np.shape(op.c)[:-1] if isinstance(op, Jet) else np.shape(op)):
            dims[ch] = n
    cur_s, cur = ops.pop(0)
    while ops:
        # greedy: take the operand that leaves the smallest intermediate
        best = None
        for i, (s, op) in enumerate(ops):
            later = "".join(sp for j, (sp, _) in enumerate(ops) if j != i) + out
            keep = "".join(ch for ch in dict.fromkeys(cur_s + s) if ch in later)
            size = int(np.prod([dims[ch] for ch in keep])) if keep else 1
            if best is None or size < best[0]:
                best = (size, i, keep)
        _, i, keep = best
        s, op = ops.pop(i)
        cur = _pair(cur_s, cur, s, op, keep)
        cur_s = keep
    if cur_s != out:
        if isinstance(cur, Jet):
            z = _free_letter(cur_s + out)
            cur = Jet(np.einsum(f"{cur_s}{z}->{out}{z}", cur.c), cur.order)
        else:
            cur = np.einsum(f"{cur_s}->{out}", cur)
    return cur


def inv(m: Jet) -> Jet:
    """Inverse of a jet of square matrices (last two component axes)."""
    a0 = np.linalg.inv(m.value)
    h = Jet(m.c.copy(), m.order)
    h.c[..., 0] = 0.0
    step = einsum("ij,jk->ik", -a0, h)
    out = Jet.constant(a0, m.order)
    term = Jet.constant(a0, m.order)
    for _ in range(m.order):
        term = einsum("ij,jk->ik", step, term)
        out = out + term
    return out


def logdet(m: Jet) -> Jet:
    """log(det m) for a square matrix jet, via the trace of the log series."""
    a0 = np.linalg.inv(m.value)
    sign, ld = np.linalg.slogdet(m.value)
    h = Jet(m.c.copy(), m.order)
    h.c[..., 0] = 0.0
    x = einsum("ij,jk->ik", a0, h)
    out = Jet.constant(np.log(sign + 0j) + ld, m.order)
    term = None
    for k in range(1, m.order + 1):
        term = x if term is None else einsum("ij,jk->ik", term, x)
        tr = einsum("ii->", term)
        out = out + tr * ((-1) ** (k + 1) / k)
    return out


def as_jet(x, order: int) -> Jet:
    return x if isinstance(x, Jet) else Jet.constant(x, order)


# ---------------------------------------------------------------------------
# charts and probe points


@dataclass(frozen=True)
class Chart:
    coordinate_names: tuple[str, str, str, str]
    valid_region: tuple[tuple[float, float], ...]
    signature_check: bool = True

    def __post_init__(self):
        if len(self.coordinate_names) != DIM:
            raise ConfigurationError("a chart needs exactly four coordinates")
        if len(self.valid_region) != DIM:
            raise ConfigurationError("valid_region needs one interval per coordinate")
        for name, (lo, hi) in zip(self.coordinate_names, self.valid_region):
            if not (np.isfinite(lo) and np.isfinite(hi)) or not lo < hi:
                raise ConfigurationError(f"empty valid_region on axis {name!r}")

    def contains(self, coords: Sequence[float]) -> bool:
        return all(lo < c < hi for c, (lo, hi) in zip(coords, self.valid_region))


@dataclass(frozen=True)
class ProbePoint:
    coords: tuple[float, float, float, float]

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def __len__(self):
        return DIM


PROBE_MARGIN = 0.01


def make_probe_set(chart: Chart, count: int, seed: int) -> list[ProbePoint]:
    """Uniform points per axis, kept a margin of 1% of each interval from the edges."""
    if count < 1:
        raise ConfigurationError("probe count must be at least 1")
    rng = np.random.default_rng(seed)
    lo = np.array([r[0] for r in chart.valid_region], dtype=float)
    hi = np.array([r[1] for r in chart.valid_region], dtype=float)
    width = hi - lo
    if np.any(width <= 0):
        raise ConfigurationError("empty valid_region")
    u = rng.uniform(PROBE_MARGIN, 1.0 - PROBE_MARGIN, size=(count, DIM))
    pts = lo + u * width
    return [ProbePoint(tuple(float(v) for v in row)) for row in pts]


@dataclass(frozen=True)
class JetValue:
    value: complex
    first: np.ndarray
    second: np.ndarray
    third: np.ndarray | None = field(default=None)


def jet_to_value(j: Jet) -> JetValue:
    """Unpack a scalar jet into value and symmetric derivative blocks."""
    if j.shape != ():
        raise ValueError("jet_to_value expects a scalar jet")
    t = _tables(j.order)
    first = np.zeros(DIM, dtype=complex)
    second = np.zeros((DIM, DIM), dtype=complex)
    third = np.zeros((DIM,) * 3, dtype=complex) if j.order >= 3 else None
    for idx in range(DIM):
        if j.order >= 1:
            first[idx] = j.c[t.index[tuple(int(v == idx) for v in range(DIM))]]
    if j.order >= 2:
        for a, b in itertools.product(range(DIM), repeat=2):
            m = [0] * DIM
            m[a] += 1
            m[b] += 1
            second[a, b] = j.c[t.index[tuple(m)]] * np.prod([math.factorial(k) for k in m])
    if third is not None:
        for a, b, cc in itertools.product(range(DIM), repeat=3):
            m = [0] * DIM
            m[a] += 1
            m[b] += 1
            m[cc] += 1
            third[a, b, cc] = j.c[t.index[tuple(m)]] * np.prod([math.factorial(k) for k in m])
    return JetValue(complex(j.c[0]), first, second, third)


def jet_eval(f: Callable, p: Sequence[float], order: int = 2) -> JetValue:
    """Value and partial derivatives of a scalar function at ``p``.

    ``f`` receives a list of four coordinate jets and must return a jet or a
    number; only the arithmetic and elementary functions of this module may be
    used inside it.
    """
    if order not in (1, 2, 3):
        raise ValueError("order must be 1, 2 or 3")
    x = Jet.variables(tuple(p), order)
    try:
        with np.errstate(all="raise"):
            out = f(x)
    except (FloatingPointError, ZeroDivisionError, EvaluationError, ValueError) as exc:
        raise EvaluationError(f"cannot evaluate function ({exc})", point=tuple(p)) from exc
    out = as_jet(out, order)
    if not np.all(np.isfinite(out.c)):
        raise EvaluationError("non-finite function value", point=tuple(p))
    return jet_to_value(out)


def fd_gradient(f: Callable, p: Sequence[float], steps=(1e-3, 1e-4)) -> dict:
    """Fourth-order central differences of a scalar function, one estimate per step.

    Plain floats are fed to ``f``, so this path shares no code with the jets.
    The returned dict maps each step to a gradient array, plus the key
    ``"richardson"`` holding the extrapolated estimate from the two largest steps.
    """
    p = np.asarray(p, dtype=float)

    def grad(h):
        g = np.zeros(DIM, dtype=complex)
        for i in range(DIM):
            e = np.zeros(DIM)
            e[i] = h
            g[i] = (-f(list(p + 2 * e)) + 8 * f(list(p + e)) - 8 * f(list(p - e)) + f(list(p - 2 * e))) / (12 * h)
        return g

    out = {h: grad(h) for h in steps}
    h1, h2 = sorted(steps, reverse=True)[:2]
    ratio = (h1 / h2) ** 4
    out["richardson"] = (ratio * out[h2] - out[h1]) / (ratio - 1)
    return out
