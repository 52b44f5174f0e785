"""Operator symbols: functions a(u) on the positive half line (vertical) or
b(v) on the real line (horizontal).

Every symbol is an immutable object that can be evaluated on numpy arrays
and exposes the structural hints the quadrature layer needs: breakpoints,
support, a bound on the local oscillation frequency, and, where available,
an exact decomposition into terms ``c * t**p * exp(1j * nu * t**(-alpha))``
used to integrate singular oscillation at the origin.
"""

from __future__ import annotations

import csv
import math
import re
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .specfun import DomainError

VERTICAL = "vertical"
HORIZONTAL = "horizontal"

_PROBE_LO = np.array([1e-10, 1e-9, 1e-8])
_PROBE_HI = np.array([1e8, 1e9, 1e10])
META_TOL = 1e-3


@dataclass(frozen=True)
class Term:
    """``coef * t**power * exp(1j * nu * t**(-alpha))`` on t > 0."""

    coef: complex
    power: float
    nu: float = 0.0
    alpha: float = 0.0

    def __mul__(self, other: "Term") -> "Term | None":
        if self.nu and other.nu and self.alpha != other.alpha:
            return None
        alpha = self.alpha if self.nu else other.alpha
        nu = self.nu + other.nu
        return Term(self.coef * other.coef, self.power + other.power, nu, alpha if nu else 0.0)


def _merge_terms(terms):
    out: dict[tuple, complex] = {}
    for t in terms:
        key = (t.power, t.nu, t.alpha if t.nu else 0.0)
        out[key] = out.get(key, 0) + t.coef
    return [Term(c, p, nu, al) for (p, nu, al), c in out.items() if c != 0]


@dataclass(frozen=True)
class SymbolMeta:
    """Declared limits at the lower (0+ or -inf) and upper (+inf) axis ends."""

    lower: complex | None = None
    upper: complex | None = None
    bounded: bool | None = None


class Symbol:
    """Base class.  Subclasses implement ``_eval`` on validated arrays."""

    axis: str = VERTICAL
    meta: SymbolMeta = SymbolMeta()

    # -- evaluation -------------------------------------------------------
    def __call__(self, x):
        arr = np.asarray(x, dtype=float)
        lo, hi = self.domain()
        if np.any(np.isnan(arr)):
            raise DomainError("symbol argument is NaN")
        if self.axis == VERTICAL and np.any(arr <= 0):
            raise DomainError("vertical symbols are defined for u > 0")
        if np.any(arr < lo) or np.any(arr > hi):
            raise DomainError(f"argument outside the symbol domain [{lo}, {hi}]")
        out = np.asarray(self._eval(arr), dtype=complex)
        return complex(out) if np.ndim(x) == 0 else out

    def _eval(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    # -- structural hints -------------------------------------------------
    def domain(self) -> tuple[float, float]:
        return (0.0, math.inf) if self.axis == VERTICAL else (-math.inf, math.inf)

    def support(self) -> tuple[float, float]:
        return self.domain()

    def breakpoints(self) -> tuple[float, ...]:
        return ()

    def tail_cutoff(self, eps: float) -> float:
        """Point past which |a| <= eps (inf when unknown)."""
        return math.inf

    def frequency(self, x: np.ndarray) -> np.ndarray:
        """Upper bound on local oscillation, in cycles per unit length."""
        return np.zeros_like(np.asarray(x, dtype=float))

    def terms(self) -> list[Term] | None:
        return None

    def sup_abs(self) -> float:
        """Essential supremum of |a| when known, else inf."""
        return math.inf

    @property
    def real_valued(self) -> bool:
        return False

    @property
    def spec(self) -> str:
        raise NotImplementedError

    def __repr__(self):
        return f"Symbol({self.spec!r}, axis={self.axis})"

    # -- combinators ------------------------------------------------------
    def __add__(self, other):
        return Sum(self, _as_symbol(other, self.axis))

    def __radd__(self, other):
        return Sum(_as_symbol(other, self.axis), self)

    def __mul__(self, other):
        if isinstance(other, Symbol):
            return Product(self, other)
        return Scaled(complex(other), self)

    def __rmul__(self, other):
        return Scaled(complex(other), self)

    def __neg__(self):
        return Scaled(-1.0, self)

    def __sub__(self, other):
        return Sum(self, Scaled(-1.0, _as_symbol(other, self.axis)))

    # -- declared metadata --------------------------------------------------
    def default_meta(self) -> SymbolMeta:
        return SymbolMeta()

    def declare(self, lower=None, upper=None, bounded=None) -> "Symbol":
        """Return a copy with declared endpoint limits, validated numerically."""
        meta = SymbolMeta(lower, upper, bounded)
        _check_meta(self, meta, strict=True)
        return replace(self, meta=meta)

    def _init_meta(self):
        if self.meta == SymbolMeta():
            meta = self.default_meta()
            if not _check_meta(self, meta, strict=False):
                meta = SymbolMeta(bounded=meta.bounded)
            object.__setattr__(self, "meta", meta)
        else:
            _check_meta(self, self.meta, strict=True)


def _check_meta(sym: Symbol, meta: SymbolMeta, strict: bool) -> bool:
    checks = []
    if meta.lower is not None:
        probe = _PROBE_LO if sym.axis == VERTICAL else -_PROBE_HI
        checks.append((probe, meta.lower, "lower"))
    if meta.upper is not None:
        checks.append((_PROBE_HI, meta.upper, "upper"))
    for probe, limit, side in checks:
        lo, hi = sym.domain()
        if probe.min() < lo or probe.max() > hi:
            if strict:
                raise ValueError(f"cannot validate {side} limit: probe outside domain")
            return False
        dev = np.max(np.abs(np.asarray(sym._eval(probe), dtype=complex) - limit))
        if not dev <= META_TOL:
            if strict:
                raise ValueError(
                    f"declared {side} limit {limit} disagrees with evaluation (dev {dev:.3g})")
            return False
    return True


def _as_symbol(obj, axis) -> Symbol:
    if isinstance(obj, Symbol):
        return obj
    return Constant(complex(obj), axis=axis)


def _fmt(v) -> str:
    v = complex(v)
    if v.imag == 0:
        return repr(float(v.real))
    return f"{float(v.real)!r},{float(v.imag)!r}"


def _vertical_only(sym):
    if sym.axis != VERTICAL:
        raise ValueError(f"{type(sym).__name__} is defined on the half line only")


# --------------------------------------------------------------------------
# built-in families
# --------------------------------------------------------------------------

@dataclass(frozen=True, repr=False)
class Indicator(Symbol):
    """Characteristic function of the closed interval [0, lam]."""

    lam: float
    axis: str = VERTICAL
    meta: SymbolMeta = SymbolMeta()

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("indicator endpoint must be positive")
        self._init_meta()

    def _eval(self, x):
        return ((x >= 0) & (x <= self.lam)).astype(float)

    def support(self):
        return (0.0, float(self.lam))

    def breakpoints(self):
        return (0.0, float(self.lam)) if self.axis == HORIZONTAL else (float(self.lam),)

    def sup_abs(self):
        return 1.0

    @property
    def real_valued(self):
        return True

    @property
    def spec(self):
        return f"indicator:{self.lam!r}"

    def default_meta(self):
        if self.axis == VERTICAL:
            return SymbolMeta(1.0, 0.0, True)
        return SymbolMeta(0.0, 0.0, True)


@dataclass(frozen=True, repr=False)
class PowerLogSquared(Symbol):
    """u^{-beta} ln^2(u^{-alpha}); nonnegative and unbounded at the origin."""

    alpha: float
    beta: float
    axis: str = VERTICAL
    meta: SymbolMeta = SymbolMeta()

    def __post_init__(self):
        _vertical_only(self)
        if not (self.alpha > 0 and 0 <= self.beta <= 1):
            raise ValueError("powerlog2 needs alpha > 0 and beta in [0, 1]")
        self._init_meta()

    def _eval(self, x):
        return x ** (-self.beta) * (self.alpha * np.log(x)) ** 2

    @property
    def real_valued(self):
        return True

    @property
    def spec(self):
        return f"powerlog2:{self.alpha!r},{self.beta!r}"

    def default_meta(self):
        return SymbolMeta(None, 0.0 if self.beta > 0 else None, False)


@dataclass(frozen=True, repr=False)
class OscPower(Symbol):
    """u^{-beta} sin(u^{-alpha}): unbounded, infinitely oscillating at 0."""

    alpha: float
    beta: float
    axis: str = VERTICAL
    meta: SymbolMeta = SymbolMeta()

    def __post_init__(self):
        _vertical_only(self)
        if not (self.alpha > 0 and 0 < self.beta < 1):
            raise ValueError("oscpower needs alpha > 0 and beta in (0, 1)")
        self._init_meta()

    def _eval(self, x):
        return x ** (-self.beta) * np.sin(x ** (-self.alpha))

    def frequency(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(over="ignore", divide="ignore"):
            return self.alpha * x ** (-self.alpha - 1) / (2 * math.pi)

    def terms(self):
        c = 1 / 2j
        return [Term(c, -self.beta, 1.0, self.alpha), Term(-c, -self.beta, -1.0, self.alpha)]

    @property
    def real_valued(self):
        return True

    @property
    def spec(self):
        return f"oscpower:{self.alpha!r},{self.beta!r}"

    def default_meta(self):
        return SymbolMeta(None, 0.0, False)


@dataclass(frozen=True, repr=False)
class OscPowerPositive(Symbol):
    """u^{tau} sin(u^{-alpha}); continuous at 0 with value 0."""

    tau: float
    alpha: float
    axis: str = VERTICAL
    meta: SymbolMeta = SymbolMeta()

    def __post_init__(self):
        _vertical_only(self)
        if not (self.tau > 0 and self.alpha > 0):
            raise ValueError("oscpowerpos needs tau > 0 and alpha > 0")
        self._init_meta()

    def _eval(self, x):
        return x ** self.tau * np.sin(x ** (-self.alpha))

    def frequency(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(over="ignore", divide="ignore"):
            return self.alpha * x ** (-self.alpha - 1) / (2 * math.pi)

    def terms(self):
        c = 1 / 2j
        return [Term(c, self.tau, 1.0, self.alpha), Term(-c, self.tau, -1.0, self.alpha)]

    def sup_abs(self):
        if self.tau > self.alpha:
            return math.inf
        # |u^tau sin u^-alpha| <= min(u^tau, u^(tau-alpha)) <= 1
        return 1.0

    @property
    def real_valued(self):
        return True

    @property
    def spec(self):
        return f"oscpowerpos:{self.tau!r},{self.alpha!r}"

    def default_meta(self):
        if self.tau < self.alpha:
            upper = 0.0
        elif self.tau == self.alpha:
            upper = 1.0
        else:
            upper = None
        return SymbolMeta(0.0, upper, self.tau <= self.alpha)


@dataclass(frozen=True, repr=False)
class ComplexExp(Symbol):
    """e^{2iu}."""

    axis: str = VERTICAL
    meta: SymbolMeta = SymbolMeta()

    def __post_init__(self):
        self._init_meta()

    def _eval(self, x):
        return np.exp(2j * x)

    def frequency(self, x):
        return np.full_like(np.asarray(x, dtype=float), 1 / math.pi)

    def sup_abs(self):
        return 1.0

    @property
    def spec(self):
        return "cexp"

    def default_meta(self):
        return SymbolMeta(1.0 if self.axis == VERTICAL else None, None, True)


@dataclass(frozen=True, repr=False)
class SineU(Symbol):
    """sin u."""

    axis: str = VERTICAL
    meta: SymbolMeta = SymbolMeta()

    def __post_init__(self):
        self._init_meta()

    def _eval(self, x):
        return np.sin(x)

    def frequency(self, x):
        return np.full_like(np.asarray(x, dtype=float), 1 / (2 * math.pi))

    def sup_abs(self):
        return 1.0

    @property
    def real_valued(self):
        return True

    @property
    def spec(self):
        return "sinu"

    def default_meta(self):
        return SymbolMeta(0.0 if self.axis == VERTICAL else None, None, True)


@dataclass(frozen=True, repr=False)
class PureOscillation(Symbol):
    """u^{i} = e^{i ln u}: unimodular, oscillating at both ends."""

    axis: str = VERTICAL
    meta: SymbolMeta = SymbolMeta()

    def __post_init__(self):
        _vertical_only(self)
        self._init_meta()

    def _eval(self, x):
        return np.exp(1j * np.log(x))

    def frequency(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            return 1.0 / (2 * math.pi * x)

    def sup_abs(self):
        return 1.0

    @property
    def spec(self):
        return "uosc"

    def default_meta(self):
        return SymbolMeta(None, None, True)


@dataclass(frozen=True, repr=False)
class DampedSine(Symbol):
    """e^{-rate u} sin u."""

    rate: float = 1.0
    axis: str = VERTICAL
    meta: SymbolMeta = SymbolMeta()

    def __post_init__(self):
        _vertical_only(self)
        if not self.rate > 0:
            raise ValueError("damping rate must be positive")
        self._init_meta()

    def _eval(self, x):
        return np.exp(-self.rate * x) * np.sin(x)

    def tail_cutoff(self, eps):
        return -math.log(eps) / self.rate

    def frequency(self, x):
        return np.full_like(np.asarray(x, dtype=float), 1 / (2 * math.pi))

    def sup_abs(self):
        return 1.0

    @property
    def real_valued(self):
        return True

    @property
    def spec(self):
        return f"dampedsine:{self.rate!r}"

    def default_meta(self):
        return SymbolMeta(0.0, 0.0, True)


@dataclass(frozen=True, repr=False)
class Power(Symbol):
    """u^{-delta}."""

    delta: float
    axis: str = VERTICAL
    meta: SymbolMeta = SymbolMeta()

    def __post_init__(self):
        _vertical_only(self)
        self._init_meta()

    def _eval(self, x):
        return x ** (-self.delta)

    def terms(self):
        return [Term(1.0, -self.delta)]

    def sup_abs(self):
        return 1.0 if self.delta == 0 else math.inf

    @property
    def real_valued(self):
        return True

    @property
    def spec(self):
        return f"power:{self.delta!r}"

    def default_meta(self):
        if self.delta > 0:
            return SymbolMeta(None, 0.0, False)
        if self.delta < 0:
            return SymbolMeta(0.0, None, False)
        return SymbolMeta(1.0, 1.0, True)


@dataclass(frozen=True, repr=False)
class Constant(Symbol):
    c: complex = 1.0
    axis: str = VERTICAL
    meta: SymbolMeta = SymbolMeta()

    def __post_init__(self):
        object.__setattr__(self, "c", complex(self.c))
        self._init_meta()

    def _eval(self, x):
        return np.full(np.shape(x), self.c, dtype=complex)

    def terms(self):
        return [Term(self.c, 0.0)]

    def sup_abs(self):
        return abs(self.c)

    @property
    def real_valued(self):
        return self.c.imag == 0

    @property
    def spec(self):
        return f"const:{_fmt(self.c)}"

    def default_meta(self):
        return SymbolMeta(self.c, self.c, True)


@dataclass(frozen=True, repr=False, eq=False)
class Tabulated(Symbol):
    """Piecewise-linear interpolant of (grid, values).

    Outside the table the symbol is an error unless ``fill`` is given, in
    which case it takes that constant value.
    """

    grid: np.ndarray
    values: np.ndarray
    axis: str = VERTICAL
    fill: complex | None = None
    source: str | None = None
    meta: SymbolMeta = SymbolMeta()

    def __post_init__(self):
        g = np.array(self.grid, dtype=float)
        v = np.array(self.values, dtype=complex)
        if g.ndim != 1 or g.size < 2 or g.shape != v.shape:
            raise ValueError("tabulated symbol needs matching 1-d arrays with >= 2 points")
        if not np.all(np.diff(g) > 0):
            raise ValueError("tabulated grid must be strictly increasing")
        if self.axis == VERTICAL and g[0] < 0:
            raise ValueError("vertical tabulated grid must be nonnegative")
        g.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "values", v)
        self._init_meta()

    def _eval(self, x):
        g, v = self.grid, self.values
        out = np.interp(x, g, v.real) + 1j * np.interp(x, g, v.imag)
        if self.fill is not None:
            out = np.where((x < g[0]) | (x > g[-1]), self.fill, out)
        return out

    def domain(self):
        if self.fill is None:
            return (float(self.grid[0]), float(self.grid[-1]))
        return super().domain()

    def support(self):
        if self.fill is None or self.fill == 0:
            return (float(self.grid[0]), float(self.grid[-1]))
        return super().domain()

    def breakpoints(self):
        return tuple(float(t) for t in self.grid)

    def sup_abs(self):
        m = float(np.max(np.abs(self.values)))
        return max(m, abs(self.fill)) if self.fill is not None else m

    @property
    def real_valued(self):
        return bool(np.all(self.values.imag == 0)) and (self.fill is None or complex(self.fill).imag == 0)

    @property
    def spec(self):
        return f"table:{self.source}" if self.source else "table:<memory>"

    def default_meta(self):
        if self.fill is None:
            return SymbolMeta(bounded=True)
        return SymbolMeta(None, self.fill, True)


# --------------------------------------------------------------------------
# combinators
# --------------------------------------------------------------------------

def _same_axis(a: Symbol, b: Symbol) -> str:
    if a.axis != b.axis:
        raise ValueError("cannot combine symbols living on different axes")
    return a.axis


def _combine_limits(x, y, op):
    if x is None or y is None:
        return None
    return op(complex(x), complex(y))


@dataclass(frozen=True, repr=False, eq=False)
class Sum(Symbol):
    left: Symbol
    right: Symbol
    meta: SymbolMeta = SymbolMeta()

    def __post_init__(self):
        object.__setattr__(self, "axis", _same_axis(self.left, self.right))
        self._init_meta()

    def _eval(self, x):
        return np.asarray(self.left._eval(x), dtype=complex) + self.right._eval(x)

    def domain(self):
        (a, b), (c, d) = self.left.domain(), self.right.domain()
        return (max(a, c), min(b, d))

    def support(self):
        (a, b), (c, d) = self.left.support(), self.right.support()
        return (min(a, c), max(b, d))

    def breakpoints(self):
        return tuple(sorted(set(self.left.breakpoints()) | set(self.right.breakpoints())))

    def frequency(self, x):
        return np.maximum(self.left.frequency(x), self.right.frequency(x))

    def tail_cutoff(self, eps):
        return max(self.left.tail_cutoff(0.5 * eps), self.right.tail_cutoff(0.5 * eps))

    def terms(self):
        a, b = self.left.terms(), self.right.terms()
        if a is None or b is None:
            return None
        return _merge_terms(a + b)

    def sup_abs(self):
        return self.left.sup_abs() + self.right.sup_abs()

    @property
    def real_valued(self):
        return self.left.real_valued and self.right.real_valued

    @property
    def spec(self):
        return f"({self.left.spec}+{self.right.spec})"

    def default_meta(self):
        l, r = self.left.meta, self.right.meta
        bounded = True if (l.bounded and r.bounded) else None
        return SymbolMeta(_combine_limits(l.lower, r.lower, complex.__add__),
                          _combine_limits(l.upper, r.upper, complex.__add__), bounded)


@dataclass(frozen=True, repr=False, eq=False)
class Product(Symbol):
    left: Symbol
    right: Symbol
    meta: SymbolMeta = SymbolMeta()

    def __post_init__(self):
        object.__setattr__(self, "axis", _same_axis(self.left, self.right))
        self._init_meta()

    def _eval(self, x):
        return np.asarray(self.left._eval(x), dtype=complex) * self.right._eval(x)

    def domain(self):
        (a, b), (c, d) = self.left.domain(), self.right.domain()
        return (max(a, c), min(b, d))

    def support(self):
        (a, b), (c, d) = self.left.support(), self.right.support()
        lo, hi = max(a, c), min(b, d)
        return (lo, max(lo, hi))

    def breakpoints(self):
        return tuple(sorted(set(self.left.breakpoints()) | set(self.right.breakpoints())))

    def frequency(self, x):
        return self.left.frequency(x) + self.right.frequency(x)

    def tail_cutoff(self, eps):
        cut = math.inf
        for own, other in ((self.left, self.right), (self.right, self.left)):
            bound = other.sup_abs()
            if math.isfinite(bound) and bound > 0:
                cut = min(cut, own.tail_cutoff(eps / bound))
        return cut

    def terms(self):
        a, b = self.left.terms(), self.right.terms()
        if a is None or b is None:
            return None
        out = []
        for s in a:
            for t in b:
                st = s * t
                if st is None:
                    return None
                out.append(st)
        return _merge_terms(out)

    def sup_abs(self):
        return self.left.sup_abs() * self.right.sup_abs()

    @property
    def real_valued(self):
        return self.left.real_valued and self.right.real_valued

    @property
    def spec(self):
        return f"{_wrap(self.left)}*{_wrap(self.right)}"

    def default_meta(self):
        l, r = self.left.meta, self.right.meta
        bounded = True if (l.bounded and r.bounded) else None
        return SymbolMeta(_combine_limits(l.lower, r.lower, complex.__mul__),
                          _combine_limits(l.upper, r.upper, complex.__mul__), bounded)


@dataclass(frozen=True, repr=False, eq=False)
class Scaled(Symbol):
    c: complex
    inner: Symbol
    meta: SymbolMeta = SymbolMeta()

    def __post_init__(self):
        object.__setattr__(self, "c", complex(self.c))
        object.__setattr__(self, "axis", self.inner.axis)
        self._init_meta()

    def _eval(self, x):
        return self.c * np.asarray(self.inner._eval(x), dtype=complex)

    def domain(self):
        return self.inner.domain()

    def support(self):
        return self.inner.support()

    def breakpoints(self):
        return self.inner.breakpoints()

    def frequency(self, x):
        return self.inner.frequency(x)

    def tail_cutoff(self, eps):
        return self.inner.tail_cutoff(eps / abs(self.c)) if self.c else 0.0

    def terms(self):
        t = self.inner.terms()
        if t is None:
            return None
        return [replace(s, coef=self.c * s.coef) for s in t]

    def sup_abs(self):
        return abs(self.c) * self.inner.sup_abs()

    @property
    def real_valued(self):
        return self.c.imag == 0 and self.inner.real_valued

    @property
    def spec(self):
        return f"const:{_fmt(self.c)}*{_wrap(self.inner)}"

    def default_meta(self):
        m = self.inner.meta
        lo = None if m.lower is None else self.c * m.lower
        hi = None if m.upper is None else self.c * m.upper
        return SymbolMeta(lo, hi, m.bounded)


def _wrap(s: Symbol) -> str:
    return f"({s.spec})" if isinstance(s, Sum) else s.spec


def semicommutator_parts(a: OscPower, b: OscPowerPositive) -> tuple[Symbol, Symbol]:
    """Split c = a*b = u^{-delta}/2 - u^{-delta}/2 cos(2u^{-alpha}) into (c1, c2).

    Requires a common oscillation exponent; c1 is the non-oscillating part
    responsible for unboundedness of the product.
    """
    if a.alpha != b.alpha:
        raise ValueError("semi-commutator split needs a common exponent alpha")
    delta = a.beta - b.tau
    c1 = Scaled(0.5, Power(delta))
    c2 = Sum(Product(a, b), Scaled(-1.0, c1))
    return c1, c2


# --------------------------------------------------------------------------
# Fourier samples of horizontal symbols
# --------------------------------------------------------------------------

class AtomicTransformError(ValueError):
    """The transform of the symbol is a distribution, handled atomically."""


def fourier_transform_samples(s: Symbol, grid) -> tuple[np.ndarray, np.ndarray]:
    """Discrete approximation of the transform  int b(v) e^{-2 pi i v w} dv.

    ``grid`` must be uniform.  Returns ``(omega, values)`` on the dual grid of
    spacing 1/(N dv), sorted increasingly.
    """
    if s.axis != HORIZONTAL:
        raise ValueError("Fourier samples are defined for horizontal symbols")
    if isinstance(s, Constant):
        raise AtomicTransformError("constant symbol: transform is c * delta")
    v = np.asarray(grid, dtype=float)
    if v.ndim != 1 or v.size < 4:
        raise ValueError("grid must be 1-d with at least 4 points")
    dv = np.diff(v)
    step = float(np.mean(dv))
    if not np.allclose(dv, step, rtol=1e-9, atol=0):
        raise ValueError("grid must be uniform")
    if isinstance(s, Tabulated) and s.fill is None:
        mag = np.abs(s.values)
        if mag[0] >= mag.max() and mag[0] > 0 or mag[-1] >= mag.max() and mag[-1] > 0:
            raise ValueError("tabulated symbol grows toward its edges; transform refused")
    samples = s(v)
    n = v.size
    omega = np.fft.fftfreq(n, d=step)
    vals = step * np.exp(-2j * np.pi * v[0] * omega) * np.fft.fft(samples)
    return np.fft.fftshift(omega), np.fft.fftshift(vals)


def inverse_fourier_samples(omega, values, v0: float) -> tuple[np.ndarray, np.ndarray]:
    """Invert :func:`fourier_transform_samples` back to the v grid starting at v0."""
    omega = np.asarray(omega, dtype=float)
    n = omega.size
    step = 1.0 / (n * float(omega[1] - omega[0]))
    omega = np.fft.ifftshift(omega)
    vals = np.fft.ifftshift(np.asarray(values, dtype=complex))
    v = v0 + step * np.arange(n)
    samples = np.fft.ifft(vals * np.exp(2j * np.pi * v0 * omega)) / step
    return v, samples


# --------------------------------------------------------------------------
# tables and the mini-grammar
# --------------------------------------------------------------------------

def load_tabulated_csv(path, axis: str = VERTICAL, fill=None) -> Tabulated:
    """Read a ``x,re`` or ``x,re,im`` CSV (header required)."""
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = [h.strip().lower() for h in next(reader)]
        if header not in (["x", "re"], ["x", "re", "im"]):
            raise ValueError(f"{path}: header must be 'x,re' or 'x,re,im', got {header}")
        rows = [[float(c) for c in row] for row in reader if row]
    arr = np.array(rows, dtype=float)
    vals = arr[:, 1] + (1j * arr[:, 2] if arr.shape[1] == 3 else 0)
    return Tabulated(arr[:, 0], vals, axis=axis, fill=fill, source=str(path))


class SymbolSyntaxError(ValueError):
    pass


_TOKEN = re.compile(r"\s*(?:(?P<op>[()*+])|(?P<atom>[a-z][a-z0-9]*(?::[^()*+\s]+)?))")


def _params(name, raw, n_min, n_max):
    parts = [] if raw is None else raw.split(",")
    if not n_min <= len(parts) <= n_max:
        raise SymbolSyntaxError(f"{name} takes {n_min}..{n_max} parameters, got {len(parts)}")
    try:
        return [float(p) for p in parts]
    except ValueError as exc:
        raise SymbolSyntaxError(f"bad number in {name}:{raw}") from exc


def _atom(text: str, axis: str) -> Symbol:
    name, _, raw = text.partition(":")
    raw = raw or None
    try:
        if name == "indicator":
            (lam,) = _params(name, raw, 1, 1)
            return Indicator(lam, axis=axis)
        if name == "powerlog2":
            a, b = _params(name, raw, 2, 2)
            return PowerLogSquared(a, b, axis=axis)
        if name == "oscpower":
            a, b = _params(name, raw, 2, 2)
            return OscPower(a, b, axis=axis)
        if name == "oscpowerpos":
            t, a = _params(name, raw, 2, 2)
            return OscPowerPositive(t, a, axis=axis)
        if name == "cexp":
            _params(name, raw, 0, 0)
            return ComplexExp(axis=axis)
        if name == "sinu":
            _params(name, raw, 0, 0)
            return SineU(axis=axis)
        if name == "uosc":
            _params(name, raw, 0, 0)
            return PureOscillation(axis=axis)
        if name == "dampedsine":
            (r,) = _params(name, raw, 0, 1) or [1.0]
            return DampedSine(r, axis=axis)
        if name == "power":
            (d,) = _params(name, raw, 1, 1)
            return Power(d, axis=axis)
        if name == "const":
            p = _params(name, raw, 1, 2)
            return Constant(complex(p[0], p[1] if len(p) > 1 else 0.0), axis=axis)
        if name == "table":
            if raw is None:
                raise SymbolSyntaxError("table needs a path: table:<path>")
            return load_tabulated_csv(raw, axis=axis)
    except (ValueError, OSError) as exc:
        if isinstance(exc, SymbolSyntaxError):
            raise
        raise SymbolSyntaxError(f"{text}: {exc}") from exc
    raise SymbolSyntaxError(f"unknown symbol name {name!r}")


def parse_symbol(text: str, axis: str = VERTICAL) -> Symbol:
    """Parse ``name[:p1,p2,...]`` atoms combined with ``*``, ``+`` and parentheses."""
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise SymbolSyntaxError(f"cannot parse symbol near {text[pos:]!r}")
        tokens.append(m.group("op") or ("atom", m.group("atom")))
        pos = m.end()
    if not tokens:
        raise SymbolSyntaxError("empty symbol expression")

    i = 0

    def peek():
        return tokens[i] if i < len(tokens) else None

    def expr():
        nonlocal i
        node = term()
        while peek() == "+":
            i += 1
            node = Sum(node, term())
        return node

    def term():
        nonlocal i
        node = factor()
        while peek() == "*":
            i += 1
            node = Product(node, factor())
        return node

    def factor():
        nonlocal i
        tok = peek()
        if tok == "(":
            i += 1
            node = expr()
            if peek() != ")":
                raise SymbolSyntaxError("unbalanced parentheses")
            i += 1
            return node
        if isinstance(tok, tuple):
            i += 1
            return _atom(tok[1], axis)
        raise SymbolSyntaxError(f"unexpected token {tok!r}")

    node = expr()
    if i != len(tokens):
        raise SymbolSyntaxError(f"trailing input after position {i}")
    return node
