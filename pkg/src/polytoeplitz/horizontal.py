"""Model of Toeplitz operators with horizontal symbols b(v).

On the Fourier side such an operator acts on functions of xi > 0 through

    (B f)(xi) = int_0^inf B_k(xi, t) b^(xi - t) f(t) dt,
    B_k(xi, t) = 2 sqrt(t xi)/(t + xi) P_k(8 t xi/(t + xi)^2 - 1),

and its behaviour under dilations is governed by the function

    q(lambda) = (2/(i pi)) PV int_0^inf t^{-i lambda} P_k(8t/(t+1)^2 - 1) / ((1+t)(1-t)) dt.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .quadrature import NonConvergent, QuadratureConfig, adaptive_gk
from .specfun import DomainError, _check_order, legendre_poly
from .symbols import HORIZONTAL, Constant, Symbol, fourier_transform_samples


class GridCoverageError(ValueError):
    """The dual grid of the symbol transform does not cover the needed range."""


def kernel_B(k: int, xi, t):
    """B_k(xi, t); vectorized over xi and t (broadcast)."""
    k = _check_order(k)
    xi = np.asarray(xi, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(xi <= 0) or np.any(t <= 0):
        raise DomainError("kernel arguments must be positive")
    s = xi + t
    with np.errstate(over="ignore", under="ignore"):
        prod = xi * t
        gm = np.sqrt(prod)
    bad = ~np.isfinite(gm) | (prod == 0)
    if np.any(bad):
        gm = np.where(bad, np.sqrt(xi) * np.sqrt(t), gm)
    r = (t - xi) / s
    # 8 t xi/(t+xi)^2 - 1 written without cancellation; equals 1 on the diagonal
    arg = 1.0 - 2.0 * r * r
    out = 2.0 * gm / s * legendre_poly(k, arg)
    return float(out) if out.ndim == 0 else out


@dataclass
class KernelGrid:
    k: int
    xi_grid: np.ndarray
    t_grid: np.ndarray
    values: np.ndarray

    @classmethod
    def compute(cls, k: int, xi_grid, t_grid) -> "KernelGrid":
        xi = np.asarray(xi_grid, dtype=float)
        t = np.asarray(t_grid, dtype=float)
        return cls(k, xi, t, kernel_B(k, xi[:, None], t[None, :]))

    def to_csv(self, path) -> None:
        with Path(path).open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["xi", "t", "B"])
            for i, x in enumerate(self.xi_grid):
                for j, t in enumerate(self.t_grid):
                    w.writerow([f"{x:.17g}", f"{t:.17g}", f"{self.values[i, j]:.17g}"])


def _trapezoid_weights(x: np.ndarray) -> np.ndarray:
    w = np.zeros_like(x)
    d = np.diff(x)
    w[:-1] += 0.5 * d
    w[1:] += 0.5 * d
    return w


def default_v_grid(b: Symbol, span: float, n_min: int = 4096) -> np.ndarray:
    """Uniform v grid whose dual grid reaches past +-span and which covers b's support."""
    lo, hi = b.support()
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise ValueError("symbol has unbounded support; pass an explicit v grid")
    dv = 1.0 / (2.5 * max(span, 1e-12))
    width = hi - lo
    n = max(n_min, int(2 ** math.ceil(math.log2(max(2.0 * width / dv, 4.0)))))
    centre = 0.5 * (lo + hi)
    return centre + dv * (np.arange(n) - n // 2)


def apply_model_operator(b: Symbol, k: int, xi_grid, f, cfg: QuadratureConfig | None = None,
                         *, v_grid=None) -> np.ndarray:
    """Apply the horizontal model operator to samples ``f`` on ``xi_grid``.

    Constant symbols act as scalar multiples of the identity.  Otherwise the
    transform of b is sampled by FFT on ``v_grid``, interpolated linearly at
    xi - t, and the t-integral is discretized by the trapezoid rule on the
    same grid.
    """
    del cfg  # discretization is fixed by the grids
    k = _check_order(k)
    if b.axis != HORIZONTAL:
        raise ValueError("the model operator takes a horizontal symbol")
    xi = np.asarray(xi_grid, dtype=float)
    f = np.asarray(f, dtype=complex)
    if xi.ndim != 1 or xi.shape != f.shape:
        raise ValueError("grid and samples must be 1-d of equal length")
    if np.any(xi <= 0) or np.any(np.diff(xi) <= 0):
        raise DomainError("xi grid must be positive and strictly increasing")
    if isinstance(b, Constant):
        return b.c * f
    span = float(xi[-1] - xi[0])
    if v_grid is None:
        v_grid = default_v_grid(b, span)
    omega, bhat = fourier_transform_samples(b, v_grid)
    diff = xi[:, None] - xi[None, :]
    if diff.min() < omega[0] or diff.max() > omega[-1]:
        raise GridCoverageError(
            f"dual grid [{omega[0]:.4g}, {omega[-1]:.4g}] does not cover +-{span:.4g}")
    bh = (np.interp(diff, omega, bhat.real) + 1j * np.interp(diff, omega, bhat.imag))
    mat = kernel_B(k, xi[:, None], xi[None, :]) * bh
    return mat @ (f * _trapezoid_weights(xi))


# ---------------------------------------------------------------------------
# the function q
# ---------------------------------------------------------------------------

Q_TAIL = 40.0
Q_DELTA0 = 0.05
Q_LEVELS = 5


def _q_integrand(k: int, lam: float):
    # log variable s = ln t: the integrand becomes
    #   -(1/(i pi)) e^{-i lam s} P_k(1 - 2 tanh^2(s/2)) / sinh(s)
    c = -1.0 / (1j * math.pi)

    def f(s):
        s = np.asarray(s, dtype=float)
        th = np.tanh(0.5 * s)
        return c * np.exp(-1j * lam * s) * legendre_poly(k, 1.0 - 2.0 * th * th) / np.sinh(s)

    return f


def _q_excluded(k: int, lam: float, delta: float, cfg: QuadratureConfig) -> complex:
    """Integral with the symmetric-in-log exclusion |ln t| < delta."""
    f = _q_integrand(k, lam)
    ppp = cfg.oscillatory_min_panels_per_period
    n = max(8, int(math.ceil((Q_TAIL - delta) * abs(lam) / (2 * math.pi) * ppp)))
    # geometric panels near the pole, uniform further out
    near = delta * np.geomspace(1.0, max(1.0 / delta, 1.0), 24)
    far = np.linspace(1.0, Q_TAIL, n + 1) if Q_TAIL > 1.0 else np.array([])
    edges = np.unique(np.concatenate([near, far]))
    edges = edges[(edges >= delta) & (edges <= Q_TAIL)]
    right = adaptive_gk(f, edges, cfg)
    left = adaptive_gk(lambda s: f(-s), edges, cfg)
    return right.value + left.value


def q_fn(k: int, lam: float, cfg: QuadratureConfig | None = None, *,
         delta0: float | None = None, levels: int = Q_LEVELS) -> complex:
    """Principal-value integral q(lambda) for level k.

    The pole at t = 1 is excluded symmetrically in log t, i.e. over
    (1 - eps, 1/(1 - eps)) with delta = -ln(1 - eps); the excluded value is
    computed for delta0 / 2^j, j < levels, and Richardson-extrapolated to
    delta = 0 (the error expansion has odd powers of delta only).  The
    default delta0 keeps lambda * delta0 small so the expansion converges
    fast.  The integrand decays like t^{-2} at infinity, so the log range is
    cut at |ln t| = 40.
    """
    k = _check_order(k)
    cfg = cfg or QuadratureConfig()
    lam = float(lam)
    if not math.isfinite(lam):
        raise DomainError("lambda must be finite")
    if levels < 2:
        raise ValueError("need at least two exclusion levels")
    if delta0 is None:
        delta0 = Q_DELTA0 / max(1.0, abs(lam) / 4.0)
    deltas = delta0 * 0.5 ** np.arange(levels)
    try:
        row = [_q_excluded(k, lam, float(d), cfg) for d in deltas]
    except NonConvergent as exc:
        raise NonConvergent(f"q integral for k={k}, lambda={lam} did not converge",
                            exc.estimate, exc.error) from exc
    # Richardson table eliminating delta, delta^3, delta^5, ...
    table = [np.array(row, dtype=complex)]
    for j in range(1, levels):
        p = 2 * j - 1
        prev = table[-1]
        fac = 2.0 ** p
        table.append((fac * prev[1:] - prev[:-1]) / (fac - 1.0))
    return complex(table[-1][0])


def q_paired(k: int, lam: float, cfg: QuadratureConfig | None = None) -> float:
    """q through the pole-free combination of t and 1/t.

    -(4/pi) int_0^1 sin(lambda ln t) P_k(8t/(1+t)^2 - 1) / (1 - t^2) dt,
    integrated in t over geometric panels accumulating at 0.
    """
    k = _check_order(k)
    cfg = cfg or QuadratureConfig()
    lam = float(lam)

    def g(t):
        t = np.asarray(t, dtype=float)
        arg = 8.0 * t / (1.0 + t) ** 2 - 1.0
        one = 1.0 - t * t
        safe = np.where(one == 0, 1.0, one)
        val = np.sin(lam * np.log(t)) * legendre_poly(k, arg) / safe
        return np.where(one == 0, -0.5 * lam, val)

    # panels of equal length in ln t, refined with the local oscillation
    per = max(1, int(math.ceil(abs(lam) / (2 * math.pi) * cfg.oscillatory_min_panels_per_period)))
    edges = np.exp(-np.linspace(0.0, Q_TAIL, int(Q_TAIL) * per + 1))[::-1]
    edges = np.concatenate([[0.0], edges])
    res = adaptive_gk(g, edges, cfg)
    return float(-(4.0 / math.pi) * res.value.real)


@dataclass
class QSupReport:
    k: int
    lambdas: np.ndarray
    values: np.ndarray
    sup: float
    argmax: float
    edge_flat: bool
    edge_variation: float

    def to_csv(self, path) -> None:
        with Path(path).open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["lambda", "q_re", "q_im"])
            for x, v in zip(self.lambdas, self.values):
                w.writerow([f"{x:.17g}", f"{v.real:.17g}", f"{v.imag:.17g}"])


EDGE_FRACTION = 0.2
EDGE_TOL = 0.05


def q_sup_probe(k: int, lambda_grid=None, cfg: QuadratureConfig | None = None) -> QSupReport:
    """Grid supremum of |q| together with an edge-flatness diagnostic.

    The grid must span at least [-50, 50].  On the outer 20% of the grid at
    each end, the variation of |q| must stay below 5% of the supremum for the
    edges to count as flat (no growth trend).
    """
    if lambda_grid is None:
        lambda_grid = np.arange(-50.0, 50.0 + 0.25, 0.5)
    lam = np.asarray(lambda_grid, dtype=float)
    if lam.min() > -50 or lam.max() < 50:
        raise ValueError("lambda grid must span at least [-50, 50]")
    vals = np.array([q_fn(k, x, cfg) for x in lam])
    mag = np.abs(vals)
    i = int(np.argmax(mag))
    sup = float(mag[i])
    width = lam.max() - lam.min()
    variation = 0.0
    for edge in (lam <= lam.min() + EDGE_FRACTION * width, lam >= lam.max() - EDGE_FRACTION * width):
        m = mag[edge]
        variation = max(variation, float(m.max() - m.min()))
    flat = bool(np.isfinite(sup) and variation <= EDGE_TOL * max(sup, 1e-300))
    return QSupReport(k, lam, vals, sup, float(lam[i]), flat, variation)
