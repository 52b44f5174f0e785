"""Continuous wavelet transform with the Laguerre wavelets.

The wavelet of level k is given on the Fourier side by

    psi_hat_k(w) = sqrt(2w) l_k(2w) for w > 0, and 0 otherwise,

and the transform of a Hardy-space signal f is

    W_k f(u, v) = int_0^inf f_hat(w) sqrt(u) psi_hat_k(u w) e^{2 pi i w v} dw.

Signals are sampled at the midpoints w_j = (j + 1/2) dw of a uniform grid on
(0, W].  With positions v_n = n / (M dw) every scale row is one inverse FFT,
and the discrete Parseval identity in v is exact, so the remaining error of
the isometry comes from the frequency and scale discretizations alone.
Scales are midpoints of cells uniform in log u (measure du dv / u^2 becomes
the weight d(log u)/u); with the default dyadic layout the cell edges sit on
powers of two.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .calculus import VerificationReport
from .gamma import gamma_fn
from .quadrature import QuadratureConfig, adaptive_gk
from .specfun import _check_order, laguerre_fn, truncation_point
from .symbols import Symbol, VERTICAL


class AliasingError(ValueError):
    """Frequency sampling too coarse for the wavelet at some scale."""


MIN_SAMPLES_PER_BAND = 4


def wavelet_hat(k: int, xi):
    """psi_hat_k(xi): sqrt(2 xi) l_k(2 xi) on xi > 0, zero elsewhere."""
    k = _check_order(k)
    x = np.asarray(xi, dtype=float)
    pos = np.maximum(x, 0.0)
    val = np.sqrt(2.0 * pos) * laguerre_fn(k, 2.0 * pos)
    out = np.where(x > 0, val, 0.0)
    return float(out) if out.ndim == 0 else out


def wavelet_band(k: int, eps: float = 1e-18) -> float:
    """Frequency past which psi_hat_k^2 is negligible (at unit scale)."""
    return 0.5 * truncation_point(k, eps)


def wavelet_overlap(k: int, m: int, cfg: QuadratureConfig | None = None) -> float:
    """int_0^inf psi_hat_k(w) psi_hat_m(w) dw / w = int 2 l_k(2w) l_m(2w) dw."""
    cfg = cfg or QuadratureConfig()
    top = max(wavelet_band(k, cfg.truncation_eps), wavelet_band(m, cfg.truncation_eps))

    def f(w):
        return 2.0 * laguerre_fn(k, 2.0 * w) * laguerre_fn(m, 2.0 * w)

    edges = np.linspace(0.0, top, 4 * (k + m) + 9)
    return float(adaptive_gk(f, edges, cfg, rel_tol=min(cfg.rel_tol, 1e-13),
                             abs_tol=min(cfg.abs_tol, 1e-15)).value.real)


def admissibility(k: int, cfg: QuadratureConfig | None = None) -> float:
    """int_0^inf |psi_hat_k(u)|^2 du / u; equal to 1."""
    return wavelet_overlap(k, k, cfg)


# ---------------------------------------------------------------------------
# signals and grids
# ---------------------------------------------------------------------------

@dataclass
class SampledSignal:
    """Fourier samples of a Hardy-space signal at w_j = (j + 1/2) dw, j < n.

    ``func`` and ``support`` are optional: when present they describe the
    continuous f_hat, which allows refinement and exact reference integrals.
    """

    fourier_samples: np.ndarray
    grid_step: float
    func: Callable | None = None
    support: tuple[float, float] | None = None

    def __post_init__(self):
        self.fourier_samples = np.asarray(self.fourier_samples, dtype=complex)
        if self.fourier_samples.ndim != 1 or self.fourier_samples.size < 2:
            raise ValueError("need a 1-d array of at least two samples")
        if not self.grid_step > 0:
            raise ValueError("grid step must be positive")
        if not np.all(np.isfinite(self.fourier_samples)):
            raise ValueError("samples must be finite")

    @classmethod
    def from_function(cls, func, omega_max: float = 8.0, n: int = 2048,
                      support: tuple[float, float] | None = None) -> "SampledSignal":
        step = omega_max / n
        omega = (np.arange(n) + 0.5) * step
        return cls(np.asarray(func(omega), dtype=complex), step, func, support)

    @property
    def n(self) -> int:
        return self.fourier_samples.size

    @property
    def omega(self) -> np.ndarray:
        return (np.arange(self.n) + 0.5) * self.grid_step

    @property
    def omega_max(self) -> float:
        return self.n * self.grid_step

    def energy(self) -> float:
        return float(np.sum(np.abs(self.fourier_samples) ** 2) * self.grid_step)

    def refine(self) -> "SampledSignal":
        if self.func is None:
            raise ValueError("refinement needs the continuous transform")
        return SampledSignal.from_function(self.func, self.omega_max, 2 * self.n, self.support)

    def weighted_integral(self, h, cfg: QuadratureConfig | None = None) -> complex:
        """int h(w) |f_hat(w)|^2 dw: by quadrature when f_hat is known, else midpoint sum."""
        if self.func is None or self.support is None:
            w = self.omega
            vals = np.array([h(x) for x in w])
            return complex(np.sum(vals * np.abs(self.fourier_samples) ** 2) * self.grid_step)
        cfg = cfg or QuadratureConfig(rel_tol=1e-9)
        lo, hi = self.support

        def g(x):
            x = np.asarray(x, dtype=float)
            hv = np.array([h(t) for t in x], dtype=complex)
            return hv * np.abs(np.asarray(self.func(x), dtype=complex)) ** 2

        return adaptive_gk(g, np.linspace(lo, hi, 9), cfg).value

    def exact_energy(self, cfg: QuadratureConfig | None = None) -> float:
        return float(self.weighted_integral(lambda w: 1.0, cfg).real)


def indicator_signal(lo: float = 1.0, hi: float = 2.0, omega_max: float = 8.0,
                     n: int = 2048) -> SampledSignal:
    """f_hat = indicator of [lo, hi]."""
    def func(w):
        w = np.asarray(w, dtype=float)
        return ((w >= lo) & (w <= hi)).astype(float)

    return SampledSignal.from_function(func, omega_max, n, (lo, hi))


def hann_signal(lo: float = 0.5, hi: float = 4.0, omega_max: float = 8.0,
                n: int = 2048) -> SampledSignal:
    """Smooth bump f_hat = sin^2(pi (w - lo)/(hi - lo)) on [lo, hi]."""
    def func(w):
        w = np.asarray(w, dtype=float)
        inside = (w >= lo) & (w <= hi)
        return np.where(inside, np.sin(np.pi * (w - lo) / (hi - lo)) ** 2, 0.0)

    return SampledSignal.from_function(func, omega_max, n, (lo, hi))


@dataclass
class ScaleTimeGrid:
    """Scales at log-cell midpoints and uniform positions.

    ``log_step`` is the width of a scale cell in log u.  Positions are
    v_n = n dv and must match the inverse-FFT grid of the signal.
    """

    u_grid: np.ndarray
    v_grid: np.ndarray
    log_step: float
    per_octave: int | None = None
    octaves: tuple[int, int] | None = None

    def __post_init__(self):
        self.u_grid = np.asarray(self.u_grid, dtype=float)
        self.v_grid = np.asarray(self.v_grid, dtype=float)
        if np.any(self.u_grid <= 0) or np.any(np.diff(self.u_grid) <= 0):
            raise ValueError("scales must be positive and strictly increasing")
        dv = np.diff(self.v_grid)
        if self.v_grid.size < 2 or not np.allclose(dv, dv[0], rtol=1e-9, atol=0):
            raise ValueError("positions must be uniform")
        if not self.log_step > 0:
            raise ValueError("log step must be positive")

    @classmethod
    def dyadic(cls, signal: SampledSignal, lo_exp: int = -24, hi_exp: int = 6,
               per_octave: int = 8) -> "ScaleTimeGrid":
        """Cells [2^(e + i/p), 2^(e + (i+1)/p)] covering [2^lo_exp, 2^hi_exp]."""
        if hi_exp <= lo_exp or per_octave < 1:
            raise ValueError("need hi_exp > lo_exp and per_octave >= 1")
        n = (hi_exp - lo_exp) * per_octave
        h = math.log(2.0) / per_octave
        u = np.exp2(lo_exp + (np.arange(n) + 0.5) / per_octave)
        dv = 1.0 / signal.omega_max
        v = np.arange(signal.n) * dv
        return cls(u, v, h, per_octave, (lo_exp, hi_exp))

    @property
    def v_step(self) -> float:
        return float(self.v_grid[1] - self.v_grid[0])

    def scale_weights(self) -> np.ndarray:
        """d(log u)/u for each scale cell."""
        return self.log_step / self.u_grid

    def refine(self, signal: SampledSignal) -> "ScaleTimeGrid":
        """Twice the scale density, two more octaves toward 0, positions for ``signal``."""
        if self.per_octave is None or self.octaves is None:
            raise ValueError("only dyadic grids can be refined")
        lo, hi = self.octaves
        return ScaleTimeGrid.dyadic(signal, lo - 2, hi, 2 * self.per_octave)


@dataclass
class WaveletField:
    grid: ScaleTimeGrid
    values: np.ndarray
    k: int = 0

    def energy(self) -> float:
        """sum |W|^2 d(log u)/u dv: the discrete dnu_L norm."""
        rows = np.sum(np.abs(self.values) ** 2, axis=1) * self.grid.v_step
        return float(np.sum(rows * self.grid.scale_weights()))

    def weighted_energy(self, a: Symbol) -> complex:
        """sum a(u) |W|^2 d(log u)/u dv."""
        rows = np.sum(np.abs(self.values) ** 2, axis=1) * self.grid.v_step
        return complex(np.sum(a(self.grid.u_grid) * rows * self.grid.scale_weights()))

    def to_csv(self, path) -> None:
        with Path(path).open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["u", "v", "re", "im"])
            for i, u in enumerate(self.grid.u_grid):
                for n, v in enumerate(self.grid.v_grid):
                    z = self.values[i, n]
                    w.writerow([f"{u:.17g}", f"{v:.17g}", f"{z.real:.17g}", f"{z.imag:.17g}"])


def cwt(f: SampledSignal, k: int, grid: ScaleTimeGrid) -> WaveletField:
    """W_k f on the grid, one inverse FFT per scale."""
    k = _check_order(k)
    m = f.n
    dw = f.grid_step
    if grid.v_grid.size != m or abs(grid.v_grid[0]) > 0 or \
            not math.isclose(grid.v_step, 1.0 / (m * dw), rel_tol=1e-9):
        raise ValueError("positions must be the inverse-FFT grid v_n = n/(M dw) of the signal")
    band = wavelet_band(k)
    worst = band / (grid.u_grid.max() * dw)
    if worst < MIN_SAMPLES_PER_BAND:
        raise AliasingError(
            f"only {worst:.2f} frequency samples span the wavelet at u={grid.u_grid.max():.4g}")
    omega = f.omega
    phase = np.exp(1j * np.pi * np.arange(m) / m)
    out = np.empty((grid.u_grid.size, m), dtype=complex)
    for i, u in enumerate(grid.u_grid):
        row = f.fourier_samples * math.sqrt(u) * wavelet_hat(k, u * omega)
        out[i] = m * dw * np.fft.ifft(row) * phase
    return WaveletField(grid, out, k)


def reproducing_kernel(k: int, zeta, eta, cfg: QuadratureConfig | None = None) -> complex:
    """K_zeta(eta) = int sqrt(u u') psi_hat(u' w) psi_hat(u w) e^{2 pi i w (v - v')} dw."""
    k = _check_order(k)
    cfg = cfg or QuadratureConfig()
    (u, v), (u2, v2) = zeta, eta
    if not (u > 0 and u2 > 0):
        raise ValueError("scales must be positive")
    top = wavelet_band(k, cfg.truncation_eps) / min(u, u2)
    dv = v - v2
    cycles = abs(dv) * top
    n = max(16, int(math.ceil(cycles * cfg.oscillatory_min_panels_per_period)))
    root = math.sqrt(u * u2)

    def f(w):
        return root * wavelet_hat(k, u2 * w) * wavelet_hat(k, u * w) * np.exp(2j * np.pi * w * dv)

    return adaptive_gk(f, np.linspace(0.0, top, n + 1), cfg).value


# ---------------------------------------------------------------------------
# the quadratic-form oracle
# ---------------------------------------------------------------------------

QUADRATIC_FORM_TOL = 5e-3


def quadratic_form_oracle(a: Symbol, k: int, f: SampledSignal, grid: ScaleTimeGrid | None = None,
                          cfg: QuadratureConfig | None = None,
                          tolerance: float = QUADRATIC_FORM_TOL) -> VerificationReport:
    """Compare  sum a(u)|W_k f|^2 dnu_L  with  int gamma_{a,k}(w) |f_hat(w)|^2 dw.

    The deviation is |lhs - rhs| / max(|rhs|, ||f||^2): relative to the
    right side, measured against the signal energy when the form is small.
    """
    if a.axis != VERTICAL:
        raise ValueError("the quadratic form takes a vertical symbol")
    cfg = cfg or QuadratureConfig()
    grid = grid or ScaleTimeGrid.dyadic(f)
    field_ = cwt(f, k, grid)
    lhs = field_.weighted_energy(a)
    rhs = f.weighted_integral(lambda w: gamma_fn(a, k, w, cfg))
    norm = f.exact_energy() if f.func is not None and f.support is not None else f.energy()
    dev = abs(lhs - rhs) / max(abs(rhs), norm)
    params = {"symbol": a.spec, "k": int(k), "n_freq": f.n, "omega_max": f.omega_max,
              "scales": int(grid.u_grid.size), "per_octave": grid.per_octave,
              "octaves": list(grid.octaves) if grid.octaves else None,
              "signal_energy": norm, "deviation": "relative"}
    return VerificationReport("quadratic-form", [0.0], [lhs], [rhs], dev, tolerance,
                              dev < tolerance, params)


@dataclass
class RefinementStudy:
    coarse: VerificationReport
    fine: VerificationReport
    ratio: float = field(init=False)

    def __post_init__(self):
        fine = self.fine.max_abs_dev
        self.ratio = math.inf if fine == 0 else self.coarse.max_abs_dev / fine


def refinement_study(a: Symbol, k: int, f: SampledSignal, grid: ScaleTimeGrid | None = None,
                     cfg: QuadratureConfig | None = None) -> RefinementStudy:
    """Oracle on the given grids and after one simultaneous doubling."""
    grid = grid or ScaleTimeGrid.dyadic(f)
    coarse = quadratic_form_oracle(a, k, f, grid, cfg)
    f2 = f.refine()
    fine = quadratic_form_oracle(a, k, f2, grid.refine(f2), cfg)
    return RefinementStudy(coarse, fine)
