"""Boundedness tests for vertical Toeplitz operators.

Sufficient conditions for boundedness come from the growth of the iterated
integrals C_a^{(m)} and the weighted means D_{a,lambda}^{(m)}; sufficient
conditions for unboundedness of nonnegative symbols come from the infima
theta_a (near 0) and Theta_a (near infinity).  Growth statements O(u^p) are
tested by log-log slope fits of the upper envelope on fixed windows.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .integrals import integrate_symbol
from .quadrature import NonConvergent, QuadratureConfig
from .specfun import DomainError
from .symbols import Symbol, VERTICAL

MAX_M = 6
WINDOW_ZERO = (1e-6, 1e-3)
WINDOW_INF = (1e3, 1e6)
SAMPLES_PER_DECADE = 32
BLOCK = 8
SLOPE_MARGIN = 0.05
RESIDUAL_MAX = 0.1
GRID_POINTS = 256
THETA_DECADES = 300
DIVERGENCE_LEVEL = 1e3
MONOTONE_DECADES = 3
CLASSIFY_M = (1, 2, 3, 4)
CLASSIFY_LAMBDA = (0, 1, 2)
PROBE_ABS_TOL = 1e-300
PROBE_REL_TOL = 1e-8

AT_ZERO = "AtZero"
AT_INFINITY = "AtInfinity"


def _check(a: Symbol, m: int, u: float):
    if a.axis != VERTICAL:
        raise ValueError("boundedness tests apply to vertical symbols")
    if int(m) != m or not 1 <= m <= MAX_M:
        raise ValueError(f"m must be an integer in 1..{MAX_M}")
    if not u > 0:
        raise DomainError("u must be positive")


def _cauchy_weight(m: int, u: float, lam: int = 0):
    fact = math.factorial(m - 1)

    def w(t):
        t = np.asarray(t, dtype=float)
        out = np.power(np.maximum(u - t, 0.0), m - 1) / fact
        if lam:
            out = out * np.power(t, lam)
        return out

    return w


def iterated_integral(a: Symbol, m: int, u: float, cfg: QuadratureConfig | None = None) -> complex:
    """C_a^{(m)}(u) as the single integral int_0^u a(t) (u-t)^{m-1}/(m-1)! dt."""
    _check(a, m, u)
    return integrate_symbol(a, _cauchy_weight(m, u), 0.0, u, cfg).value


def weighted_mean(a: Symbol, lam: int, m: int, u: float, cfg: QuadratureConfig | None = None) -> complex:
    """D_{a,lam}^{(m)}(u) = int_0^u a(t/2) t^lam (u-t)^{m-1}/(m-1)! dt."""
    _check(a, m, u)
    if int(lam) != lam or lam < 0:
        raise DomainError("lambda must be a nonnegative integer")
    return integrate_symbol(a, _cauchy_weight(m, u, int(lam)), 0.0, u, cfg, scale=0.5).value


# ---------------------------------------------------------------------------
# infima
# ---------------------------------------------------------------------------

def _real_values(a: Symbol, t: np.ndarray) -> np.ndarray:
    if not a.real_valued:
        raise DomainError("infima are defined for real-valued symbols")
    with np.errstate(all="ignore"):
        v = np.asarray(a._eval(t))
    return np.real(v).astype(float)


def _decade_minima(a: Symbol, decades: np.ndarray) -> np.ndarray:
    """Grid minimum of a over each [10^d, 10^{d+1}] (GRID_POINTS log points)."""
    s = np.linspace(0.0, 1.0, GRID_POINTS)
    t = 10.0 ** (decades[:, None] + s[None, :])
    vals = _real_values(a, t.ravel()).reshape(t.shape)
    return np.nanmin(vals, axis=1)


def theta(a: Symbol, u: float) -> float:
    """Grid minimum of a on (0, u): GRID_POINTS log points per decade down to 1e-300."""
    if not u > 0:
        raise DomainError("u must be positive")
    top = math.log10(u)
    bottom = -THETA_DECADES
    if top <= bottom:
        return float(np.min(_real_values(a, np.array([u]))))
    n = int(math.ceil(top - bottom))
    s = np.linspace(bottom, top, n * GRID_POINTS + 1)
    return float(np.nanmin(_real_values(a, 10.0 ** s)))


def big_theta(a: Symbol, u: float) -> float:
    """Grid minimum of a on (u/2, u) with GRID_POINTS log-spaced points."""
    if not u > 0:
        raise DomainError("u must be positive")
    t = u * np.exp2(np.linspace(-1.0, 0.0, GRID_POINTS))
    return float(np.nanmin(_real_values(a, t)))


# ---------------------------------------------------------------------------
# asymptotic probes
# ---------------------------------------------------------------------------

@dataclass
class AsymptoticProbe:
    side: str
    exponent_estimate: float
    window: tuple[float, float]
    residual: float
    quantity: str = ""
    target: float = math.nan
    passed: bool = False

    def __post_init__(self):
        lo, hi = self.window
        if not 0 < lo < hi:
            raise ValueError("probe window must satisfy 0 < u_min < u_max")
        if not self.residual >= 0:
            raise ValueError("residual must be nonnegative")


def fit_envelope(u: np.ndarray, values: np.ndarray, iterations: int = 6) -> tuple[float, float]:
    """Log-log slope and RMS residual of the upper envelope of |values|.

    Each block contributes the sample that is largest relative to the
    current power-law fit, and the fit is repeated until the slope settles.
    The slope is nan when fewer than two blocks are nonzero.
    """
    mag = np.abs(np.asarray(values))
    logu = np.log(u)
    with np.errstate(divide="ignore"):
        logm = np.log(mag)
    nb = u.size // BLOCK
    slope = 0.0
    fit = (math.nan, 0.0)
    for _ in range(iterations):
        xs, ys = [], []
        for b in range(nb):
            sl = slice(b * BLOCK, (b + 1) * BLOCK)
            if not np.any(mag[sl] > 0):
                continue
            j = int(np.argmax(logm[sl] - slope * logu[sl]))
            xs.append(logu[sl][j])
            ys.append(logm[sl][j])
        if len(xs) < 2:
            return math.nan, 0.0
        xs, ys = np.array(xs), np.array(ys)
        new, icpt = np.polyfit(xs, ys, 1)
        fit = (float(new), float(np.sqrt(np.mean((ys - (new * xs + icpt)) ** 2))))
        if abs(new - slope) < 1e-6:
            break
        slope = float(new)
    return fit


def _window_points(window) -> np.ndarray:
    lo, hi = window
    n = int(round(math.log10(hi / lo) * SAMPLES_PER_DECADE)) + 1
    return np.logspace(math.log10(lo), math.log10(hi), n)


def probe_growth(fn, order: float, side: str, quantity: str = "") -> AsymptoticProbe:
    """Test fn(u) = O(u^order) on the fixed window for ``side``."""
    window = WINDOW_ZERO if side == AT_ZERO else WINDOW_INF
    u = _window_points(window)
    vals = np.array([fn(x) for x in u])
    slope, resid = fit_envelope(u, vals)
    if math.isnan(slope):
        # identically zero on the window: any power bound holds
        slope = math.inf if side == AT_ZERO else -math.inf
        resid = 0.0
    if side == AT_ZERO:
        ok = slope >= order - SLOPE_MARGIN
    else:
        ok = slope <= order + SLOPE_MARGIN
    return AsymptoticProbe(side, slope, window, resid, quantity, float(order),
                           bool(ok and resid < RESIDUAL_MAX))


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------

BOUNDED_ITERATED = "BoundedByIteratedCriterion"
BOUNDED_WEIGHTED = "BoundedByWeightedCriterion"
UNBOUNDED_THETA = "UnboundedByTheta"
UNBOUNDED_BIG_THETA = "UnboundedByBigTheta"
INCONCLUSIVE = "Inconclusive"


@dataclass
class Verdict:
    kind: str
    m: int | None = None
    lam: int | None = None
    probes: list[AsymptoticProbe] = field(default_factory=list)
    theta_trace: dict = field(default_factory=dict)
    diagnostics: list[str] = field(default_factory=list)

    @property
    def bounded(self) -> bool:
        return self.kind in (BOUNDED_ITERATED, BOUNDED_WEIGHTED)

    @property
    def unbounded(self) -> bool:
        return self.kind in (UNBOUNDED_THETA, UNBOUNDED_BIG_THETA)

    def label(self) -> str:
        if self.kind == BOUNDED_ITERATED:
            return f"{self.kind}(m={self.m})"
        if self.kind == BOUNDED_WEIGHTED:
            return f"{self.kind}(lambda={self.lam}, m={self.m})"
        return self.kind

    def to_dict(self, symbol: Symbol | None = None) -> dict:
        def clean(x):
            if isinstance(x, float) and not math.isfinite(x):
                return str(x)
            return x

        probes = [{k: clean(v) for k, v in asdict(p).items()} for p in self.probes]
        return {
            "schema_version": 1,
            "symbol": symbol.spec if symbol is not None else None,
            "verdict": self.kind,
            "m": self.m,
            "lambda": self.lam,
            "probes": probes,
            "theta_trace": {k: [clean(float(v)) for v in vs] for k, vs in self.theta_trace.items()},
            "diagnostics": self.diagnostics,
            "parameters": {
                "window_zero": list(WINDOW_ZERO),
                "window_infinity": list(WINDOW_INF),
                "samples_per_decade": SAMPLES_PER_DECADE,
                "block": BLOCK,
                "slope_margin": SLOPE_MARGIN,
                "residual_max": RESIDUAL_MAX,
                "grid_points": GRID_POINTS,
                "theta_decades": THETA_DECADES,
                "divergence_level": DIVERGENCE_LEVEL,
                "monotone_decades": MONOTONE_DECADES,
                "probe_abs_tol": PROBE_ABS_TOL,
                "probe_rel_tol": PROBE_REL_TOL,
            },
        }

    def to_json(self, symbol: Symbol | None = None, **kw) -> str:
        return json.dumps(self.to_dict(symbol), **kw)


def _two_sided(fn, order, quantity, diagnostics):
    probes = []
    try:
        for side in (AT_ZERO, AT_INFINITY):
            p = probe_growth(fn, order, side, quantity)
            probes.append(p)
            if not p.passed:
                break
    except (NonConvergent, DomainError, FloatingPointError) as exc:
        diagnostics.append(f"{quantity}: {type(exc).__name__}: {exc}")
        return probes, False
    return probes, len(probes) == 2 and all(p.passed for p in probes)


def _diverges(trace: np.ndarray) -> bool:
    tail = trace[-(MONOTONE_DECADES + 1):]
    return bool(np.all(np.isfinite(tail)) and tail[-1] > DIVERGENCE_LEVEL
                and np.all(np.diff(tail) > 0))


def infima_traces(a: Symbol) -> dict:
    """theta at 10^-j and Theta at 10^j for j = 1..THETA_DECADES."""
    j = np.arange(1, THETA_DECADES + 1)
    # decade minima on [10^-j-1, 10^-j]; theta(10^-j) is the running minimum below it
    dm = _decade_minima(a, -(j + 1).astype(float))
    with np.errstate(invalid="ignore"):
        th = np.minimum.accumulate(dm[::-1])[::-1]
    big = np.array([big_theta(a, 10.0 ** float(x)) for x in j])
    return {"u_zero": 10.0 ** -j.astype(float), "theta": th,
            "u_infinity": 10.0 ** j.astype(float), "big_theta": big}


def classify_boundedness(a: Symbol, cfg: QuadratureConfig | None = None) -> Verdict:
    """Sufficient-condition classification of T_a (all levels k at once).

    Tries C^{(m)} = O(u^m) for m = 1..4, then D_{lambda}^{(m)} = O(u^{lambda+m})
    for lambda = 0..2, on both windows.  Near 0 the fitted exponent must reach
    the order (within the margin); near infinity it must not exceed it.  For
    real nonnegative symbols the infima theta/Theta are traced for divergence.
    """
    cfg = cfg or QuadratureConfig()
    if a.axis != VERTICAL:
        raise ValueError("classification applies to vertical symbols")
    # growth fits need relative accuracy on values far below any absolute
    # floor, but only a few digits of it
    cfg = replace(cfg, abs_tol=PROBE_ABS_TOL, rel_tol=max(cfg.rel_tol, PROBE_REL_TOL))
    probes: list[AsymptoticProbe] = []
    diag: list[str] = []

    for m in CLASSIFY_M:
        ps, ok = _two_sided(lambda x, m=m: iterated_integral(a, m, x, cfg), m, f"C^({m})", diag)
        probes += ps
        if ok:
            return Verdict(BOUNDED_ITERATED, m=m, probes=probes, diagnostics=diag)
    for lam in CLASSIFY_LAMBDA:
        for m in CLASSIFY_M:
            ps, ok = _two_sided(lambda x, m=m, lam=lam: weighted_mean(a, lam, m, x, cfg),
                                lam + m, f"D_{lam}^({m})", diag)
            probes += ps
            if ok:
                return Verdict(BOUNDED_WEIGHTED, m=m, lam=lam, probes=probes, diagnostics=diag)

    traces: dict = {}
    if not a.real_valued:
        diag.append("infima tests skipped: symbol is not real-valued")
    else:
        try:
            traces = infima_traces(a)
        except (DomainError, FloatingPointError) as exc:
            diag.append(f"infima tests failed: {exc}")
        if traces:
            middle = _decade_minima(a, np.array([-1.0, 0.0]))
            lowest = min(np.nanmin(traces["theta"]), np.nanmin(traces["big_theta"]),
                         np.nanmin(middle))
            if lowest < 0:
                diag.append("symbol takes negative values; infima criterion not applicable")
            elif _diverges(traces["theta"]):
                return Verdict(UNBOUNDED_THETA, probes=probes, theta_trace=traces, diagnostics=diag)
            elif _diverges(traces["big_theta"]):
                return Verdict(UNBOUNDED_BIG_THETA, probes=probes, theta_trace=traces,
                               diagnostics=diag)
    return Verdict(INCONCLUSIVE, probes=probes, theta_trace=traces, diagnostics=diag)
