"""Spectral function of vertical Toeplitz operators.

For a symbol a(u) on the half line and level k the Toeplitz operator on the
k-th wavelet subspace is unitarily a multiplication by

    gamma(xi) = int_0^inf a(u / (2 xi)) l_k(u)^2 du,     xi > 0.

This module evaluates gamma in two equivalent forms, through its Laplace
expansion, and derives the quantities read off from it: endpoint limits,
the operator norm (supremum of |gamma|) and derivative decay.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np

from .integrals import integrate_symbol
from .quadrature import NonConvergent, QuadratureConfig
from .specfun import DomainError, _check_order, kappa_by_degree, laguerre_fn_sq, truncation_point
from .symbols import Symbol, VERTICAL

EXPANSION_MAX_K = 12
LIMIT_DEPTH = 40
CAUCHY_WINDOW = 5
CAUCHY_TOL = 1e-4


def _check_xi(xi: float) -> float:
    xi = float(xi)
    if not xi > 0:
        raise DomainError(f"xi must be positive, got {xi}")
    return xi


def _check_vertical(a: Symbol):
    if a.axis != VERTICAL:
        raise ValueError("spectral functions are defined for vertical symbols")


def gamma_original(a: Symbol, k: int, xi: float, cfg: QuadratureConfig | None = None) -> complex:
    """int_0^U a(u/(2 xi)) l_k(u)^2 du with U the truncation point of l_k^2."""
    cfg = cfg or QuadratureConfig()
    k, xi = _check_order(k), _check_xi(xi)
    upper = truncation_point(k, cfg.truncation_eps)
    res = integrate_symbol(a, lambda u: laguerre_fn_sq(k, u), 0.0, upper, cfg,
                           scale=1.0 / (2.0 * xi))
    return res.value


def gamma_substituted(a: Symbol, k: int, xi: float, cfg: QuadratureConfig | None = None) -> complex:
    """2 xi int_0^{U/(2 xi)} a(t) l_k(2 xi t)^2 dt."""
    cfg = cfg or QuadratureConfig()
    k, xi = _check_order(k), _check_xi(xi)
    upper = truncation_point(k, cfg.truncation_eps) / (2.0 * xi)
    res = integrate_symbol(a, lambda t: 2.0 * xi * laguerre_fn_sq(k, 2.0 * xi * t),
                           0.0, upper, cfg)
    return res.value


def gamma_fn(a: Symbol, k: int, xi: float, cfg: QuadratureConfig | None = None) -> complex:
    """Spectral function gamma_{a,k}(xi).

    Below xi = 1 the substituted form is used (the symbol controls the
    integrand's support); from xi = 1 on, the original form.
    Raises :class:`NonConvergent` with the best estimate attached when the
    quadrature budget runs out.
    """
    _check_vertical(a)
    if _check_xi(xi) < 1.0:
        return gamma_substituted(a, k, xi, cfg)
    return gamma_original(a, k, xi, cfg)


def gamma_values(a: Symbol, k: int, xi_grid, cfg: QuadratureConfig | None = None) -> np.ndarray:
    return np.array([gamma_fn(a, k, x, cfg) for x in np.asarray(xi_grid, dtype=float)])


@lru_cache(maxsize=None)
def _laplace_cutoff(lam: int, eps: float) -> float:
    # x^lam e^-x < eps * max(1, lam!) past the mode, by doubling
    ref = math.lgamma(lam + 1) if lam > 0 else 0.0
    x = max(2.0 * lam, 1.0)
    while lam * math.log(x) - x >= math.log(eps) + ref:
        x *= 2.0
    return x


def gamma_tilde(a: Symbol, lam: int, xi: float, cfg: QuadratureConfig | None = None) -> complex:
    """(2 xi)^{lam+1} int_0^inf a(u) u^lam e^{-2 u xi} du."""
    _check_vertical(a)
    cfg = cfg or QuadratureConfig()
    xi = _check_xi(xi)
    if int(lam) != lam or lam < 0:
        raise DomainError("lambda must be a nonnegative integer")
    lam = int(lam)
    upper = _laplace_cutoff(lam, cfg.truncation_eps) / (2.0 * xi)

    def weight(t):
        x = 2.0 * xi * t
        with np.errstate(divide="ignore"):
            logs = lam * np.log(x) if lam else np.zeros_like(x)
        return 2.0 * xi * np.exp(logs - x)

    return integrate_symbol(a, weight, 0.0, upper, cfg).value


@lru_cache(maxsize=None)
def expansion_amplification(k: int) -> float:
    """sum_m |c_m| m!  -- worst-case growth of quadrature error in the expansion."""
    return float(sum(abs(c) * math.factorial(m) for m, c in enumerate(kappa_by_degree(k))))


def gamma_via_expansion(a: Symbol, k: int, xi: float, cfg: QuadratureConfig | None = None) -> complex:
    """gamma through  sum_{i,j} kappa(k,i,j) gamma_tilde_{a,i+j}(xi).

    Inner quadratures are tightened by the expansion's amplification factor
    to compensate for cancellation in the alternating sum.
    """
    k = _check_order(k)
    if k > EXPANSION_MAX_K:
        raise DomainError(f"expansion is limited to k <= {EXPANSION_MAX_K}")
    cfg = cfg or QuadratureConfig()
    inner = cfg.tightened(1.0 / expansion_amplification(k))
    coeffs = kappa_by_degree(k)
    return complex(sum(c * gamma_tilde(a, m, xi, inner) for m, c in enumerate(coeffs) if c))


# ---------------------------------------------------------------------------
# curves and derived quantities
# ---------------------------------------------------------------------------

@dataclass
class GammaCurve:
    k: int
    symbol: Symbol
    xi_grid: np.ndarray
    values: np.ndarray
    sup_abs: float = field(init=False)

    def __post_init__(self):
        self.xi_grid = np.asarray(self.xi_grid, dtype=float)
        self.values = np.asarray(self.values, dtype=complex)
        if self.xi_grid.shape != self.values.shape:
            raise ValueError("grid and values differ in shape")
        if not np.all(np.diff(self.xi_grid) > 0) or not np.all(self.xi_grid > 0):
            raise ValueError("xi grid must be positive and strictly increasing")
        self.sup_abs = float(np.max(np.abs(self.values)))

    @classmethod
    def compute(cls, a: Symbol, k: int, xi_grid, cfg: QuadratureConfig | None = None):
        return cls(k, a, xi_grid, gamma_values(a, k, xi_grid, cfg))

    def to_csv(self, path) -> None:
        with Path(path).open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["xi", "gamma_re", "gamma_im"])
            for x, v in zip(self.xi_grid, self.values):
                w.writerow([f"{x:.17g}", f"{v.real:.17g}", f"{v.imag:.17g}"])


def read_gamma_csv(path) -> tuple[np.ndarray, np.ndarray]:
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    if rows[0] != ["xi", "gamma_re", "gamma_im"]:
        raise ValueError("not a gamma curve file")
    arr = np.array(rows[1:], dtype=float)
    return arr[:, 0], arr[:, 1] + 1j * arr[:, 2]


def _cauchy_limit(seq: list[complex]) -> complex | None:
    if len(seq) < CAUCHY_WINDOW:
        return None
    window = np.asarray(seq[-CAUCHY_WINDOW:])
    scale = max(1.0, float(np.max(np.abs(window))))
    spread = float(np.max(np.abs(window[:, None] - window[None, :])))
    if spread > CAUCHY_TOL * scale:
        return None
    s0, s1, s2 = window[-3:]
    d1, d2 = s1 - s0, s2 - s1
    denom = d2 - d1
    last = complex(s2)
    # Aitken step, only trusted when it stays inside the Cauchy window
    if abs(denom) > 1e-15 * scale and abs(d2) < abs(d1):
        acc = complex(s2 - d2 * d2 / denom)
        if abs(acc - last) <= CAUCHY_TOL * scale:
            return acc
    return last


def endpoint_limits(a: Symbol, k: int, cfg: QuadratureConfig | None = None
                    ) -> tuple[complex | None, complex | None]:
    """Extrapolated (gamma(0+), gamma(+inf)) along xi = 2^{-j} and 2^{j}, j = 0..40.

    A side is ``None`` when its last five terms fail the Cauchy test, which
    is how oscillating (limitless) spectral functions show up.
    """
    out = []
    for sign in (-1, 1):
        seq = []
        try:
            for j in range(LIMIT_DEPTH + 1):
                seq.append(gamma_fn(a, k, 2.0 ** (sign * j), cfg))
        except NonConvergent:
            out.append(None)
            continue
        out.append(_cauchy_limit(seq))
    return out[0], out[1]


@dataclass
class NormEstimate:
    """Lower bound on sup |gamma| from a grid scan plus golden-section refinement."""

    value: float
    xi_argmax: float
    bracket: tuple[float, float]
    grid_max: float

    def __float__(self):
        return self.value


_GOLD = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_max(f, lo: float, hi: float, tol: float = 1e-10, max_iter: int = 80):
    a, b = lo, hi
    c = b - _GOLD * (b - a)
    d = a + _GOLD * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if abs(b - a) < tol * (1.0 + abs(a) + abs(b)):
            break
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _GOLD * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLD * (b - a)
            fd = f(d)
    return (c, fc) if fc > fd else (d, fd)


def operator_norm(a: Symbol, k: int, xi_grid=None, cfg: QuadratureConfig | None = None
                  ) -> NormEstimate:
    """sup over xi of |gamma_{a,k}(xi)|: the norm of the Toeplitz operator.

    The grid must span at least [1e-3, 1e3].  The grid argmax is refined by
    golden-section search in log(xi) over its neighbouring grid cells.
    """
    if xi_grid is None:
        xi_grid = np.logspace(-3, 3, 121)
    xi_grid = np.asarray(xi_grid, dtype=float)
    if xi_grid.min() > 1e-3 * (1 + 1e-12) or xi_grid.max() < 1e3 * (1 - 1e-12):
        raise ValueError("norm grid must span at least [1e-3, 1e3]")
    mags = np.abs(gamma_values(a, k, xi_grid, cfg))
    i = int(np.argmax(mags))
    lo = xi_grid[max(i - 1, 0)]
    hi = xi_grid[min(i + 1, xi_grid.size - 1)]
    best_x, best = float(xi_grid[i]), float(mags[i])
    if hi > lo:
        x, v = _golden_max(lambda s: abs(gamma_fn(a, k, math.exp(s), cfg)),
                           math.log(lo), math.log(hi))
        if v > best:
            best_x, best = math.exp(x), float(v)
    return NormEstimate(best, best_x, (float(lo), float(hi)), float(mags[i]))


# central difference stencils, second-order accurate
_STENCILS = {
    1: (np.array([-1, 1]), np.array([-0.5, 0.5])),
    2: (np.array([-1, 0, 1]), np.array([1.0, -2.0, 1.0])),
    3: (np.array([-2, -1, 1, 2]), np.array([-0.5, 1.0, -1.0, 0.5])),
    4: (np.array([-2, -1, 0, 1, 2]), np.array([1.0, -4.0, 6.0, -4.0, 1.0])),
}


@dataclass
class DecayReport:
    n: int
    side: str
    xi: np.ndarray
    values: np.ndarray
    noise: np.ndarray
    decays: bool
    breakdown: list[int]

    @property
    def final(self) -> float:
        return float(np.abs(self.values[-1]))


def derivative_decay_probe(a: Symbol, k: int, n: int, cfg: QuadratureConfig | None = None,
                           *, side: str = "infinity", points: int = 13,
                           rel_step: float = 0.05) -> DecayReport:
    """Finite-difference probe of d^n gamma/dxi^n as xi -> inf, or of
    xi^n d^n gamma/dxi^n as xi -> 0 (``side="zero"``).

    Points are 2^{j/2}, j = 0..points-1 (or their reciprocals).  Each value
    carries a noise bound from the quadrature tolerance; indices where the
    noise exceeds both the signal and 1e-6 are listed as step breakdowns.
    """
    if n not in _STENCILS:
        raise ValueError("derivative order must be 1..4")
    if side not in ("infinity", "zero"):
        raise ValueError("side must be 'infinity' or 'zero'")
    cfg = cfg or QuadratureConfig()
    offs, coef = _STENCILS[n]
    sgn = 1.0 if side == "infinity" else -1.0
    xs = 2.0 ** (sgn * 0.5 * np.arange(points))
    vals, noise = [], []
    for x in xs:
        h = rel_step * x
        g = np.array([gamma_fn(a, k, x + o * h, cfg) for o in offs])
        d = complex(coef @ g) / h ** n
        tol = max(cfg.abs_tol, cfg.rel_tol * float(np.max(np.abs(g))))
        nz = float(np.abs(coef).sum() * tol / h ** n)
        if side == "zero":
            d *= x ** n
            nz *= x ** n
        vals.append(d)
        noise.append(nz)
    vals = np.array(vals)
    noise = np.array(noise)
    mag = np.abs(vals)
    envelope = np.maximum.accumulate(mag[::-1])[::-1]
    floor = np.maximum(noise, 1e-12)
    decays = bool(envelope[0] <= floor[0] or envelope[-1] <= max(0.1 * envelope[0], floor[-1]))
    breakdown = [int(i) for i in np.flatnonzero((noise > mag) & (noise > 1e-6))]
    return DecayReport(n, side, xs, vals, noise, decays, breakdown)
