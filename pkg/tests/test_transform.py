import math

import numpy as np
import pytest
from scipy import integrate

from oracles import QF_INDICATOR_REF
from polytoeplitz.symbols import HORIZONTAL, Constant, Indicator, SineU
from polytoeplitz.transform import (QUADRATIC_FORM_TOL, AliasingError, SampledSignal,
                                    ScaleTimeGrid, admissibility, cwt, hann_signal,
                                    indicator_signal, quadratic_form_oracle, refinement_study,
                                    reproducing_kernel, wavelet_hat, wavelet_overlap)


def test_wavelet_hat_examples():
    assert wavelet_hat(3, -1.0) == 0.0
    assert wavelet_hat(0, 0.5) == pytest.approx(math.exp(-0.5), abs=1e-15)
    # L_1(1) = 0
    assert abs(wavelet_hat(1, 0.5)) < 1e-15


@pytest.mark.parametrize("k", [0, 1, 5, 12, 20])
def test_admissibility(k):
    assert admissibility(k) == pytest.approx(1.0, abs=1e-10)


def test_orthogonality():
    for k in range(11):
        for m in range(k + 1, 11):
            assert abs(wavelet_overlap(k, m)) < 1e-10


def test_zero_signal_gives_zero_field():
    f = SampledSignal(np.zeros(2048), 8.0 / 2048)
    grid = ScaleTimeGrid.dyadic(f)
    assert np.all(cwt(f, 2, grid).values == 0)


@pytest.mark.parametrize("make", [indicator_signal, hann_signal])
@pytest.mark.parametrize("k", [0, 3, 5])
def test_isometry(make, k):
    f = make()
    grid = ScaleTimeGrid.dyadic(f)
    gap = abs(cwt(f, k, grid).energy() - f.exact_energy()) / f.exact_energy()
    assert gap < 1e-3
    f2 = f.refine()
    gap2 = abs(cwt(f2, k, grid.refine(f2)).energy() - f2.exact_energy()) / f2.exact_energy()
    assert gap2 < gap


def test_single_scale_row_against_direct_sum():
    f = indicator_signal()
    grid = ScaleTimeGrid(np.array([1.0]), np.arange(f.n) / f.omega_max, 1.0)
    row = cwt(f, 0, grid).values[0]
    w = f.omega
    base = f.fourier_samples * np.sqrt(2 * w) * np.exp(-w)
    for n in (0, 37, 500):
        v = grid.v_grid[n]
        direct = np.sum(base * np.exp(2j * np.pi * w * v)) * f.grid_step
        assert abs(row[n] - direct) < 1e-12
    # and against the continuous integral where the sum is well resolved
    re = integrate.quad(lambda x: math.sqrt(2 * x) * math.exp(-x), 1.0, 2.0, epsabs=1e-14)[0]
    assert abs(row[0] - re) < 1e-6


def test_reproducing_kernel_diagonal_and_symmetry():
    for k in range(11):
        for zeta in ((1.0, 0.0), (0.3, 2.5)):
            assert reproducing_kernel(k, zeta, zeta) == pytest.approx((2 * k + 1) / 2, abs=1e-8)
    z, e = (0.7, 0.2), (1.9, -1.1)
    assert reproducing_kernel(2, z, e) == pytest.approx(np.conj(reproducing_kernel(2, e, z)),
                                                        abs=1e-12)


def test_reproducing_property():
    k, (u0, v0) = 1, (2.0, 0.3)
    f = indicator_signal()
    grid = ScaleTimeGrid.dyadic(f)
    # the kernel at zeta, as a function of eta, is conj(W_k g) for g = pi(zeta) psi
    g = SampledSignal.from_function(
        lambda w: math.sqrt(u0) * wavelet_hat(k, u0 * np.asarray(w))
        * np.exp(-2j * np.pi * np.asarray(w) * v0), f.omega_max, f.n)
    wf, wg = cwt(f, k, grid), cwt(g, k, grid)
    for i, n in ((100, 0), (150, 20), (170, 3)):
        eta = (grid.u_grid[i], grid.v_grid[n])
        kv = reproducing_kernel(k, (u0, v0), eta)
        # the field side carries the midpoint sampling error of g, measured
        # against the kernel's diagonal value
        assert abs(kv - np.conj(wg.values[i, n])) < 1e-5 * (2 * k + 1) / 2
    rows = np.sum(wf.values * np.conj(wg.values), axis=1) * grid.v_step
    lhs = np.sum(rows * grid.scale_weights())

    def part(fn):
        return integrate.quad(lambda w: math.sqrt(u0) * wavelet_hat(k, u0 * w) * fn(2 * math.pi * w * v0),
                              1.0, 2.0, epsabs=1e-14)[0]

    direct = complex(part(math.cos), part(math.sin))
    assert abs(lhs - direct) < 1e-3


def test_quadratic_form_examples():
    f = indicator_signal()
    rep = quadratic_form_oracle(Constant(1.0), 2, f)
    assert rep.passed and rep.max_abs_dev < 1e-3
    rep = quadratic_form_oracle(Indicator(0.5), 0, f)
    assert rep.rhs[0] == pytest.approx(QF_INDICATOR_REF, abs=1e-9)
    assert rep.passed and rep.max_abs_dev < QUADRATIC_FORM_TOL
    assert quadratic_form_oracle(Indicator(0.5), 1, f).passed
    assert quadratic_form_oracle(SineU(), 1, hann_signal()).passed
    with pytest.raises(ValueError):
        quadratic_form_oracle(Constant(1.0, axis=HORIZONTAL), 0, f)


def test_refinement_reduces_deviation():
    study = refinement_study(Indicator(0.5), 1, indicator_signal())
    assert study.fine.max_abs_dev < study.coarse.max_abs_dev
    assert study.ratio >= 2


def test_aliasing_error():
    f = indicator_signal(n=256)
    grid = ScaleTimeGrid.dyadic(f, -6, 8, 4)
    with pytest.raises(AliasingError):
        cwt(f, 0, grid)


def test_positions_must_match_fft_grid():
    f = indicator_signal()
    grid = ScaleTimeGrid(np.array([1.0]), np.arange(f.n) / (2 * f.omega_max), 1.0)
    with pytest.raises(ValueError):
        cwt(f, 0, grid)


def test_field_csv(tmp_path):
    f = indicator_signal(n=16, omega_max=4.0)
    grid = ScaleTimeGrid(np.array([0.5, 1.0]), np.arange(16) / 4.0, math.log(2.0))
    field = cwt(f, 0, grid)
    p = tmp_path / "w.csv"
    field.to_csv(p)
    lines = p.read_text().splitlines()
    assert lines[0] == "u,v,re,im" and len(lines) == 33
