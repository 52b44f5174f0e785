import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import q0
from polytoeplitz.horizontal import (GridCoverageError, KernelGrid, apply_model_operator, kernel_B,
                                     q_fn, q_paired, q_sup_probe)
from polytoeplitz.specfun import DomainError
from polytoeplitz.symbols import HORIZONTAL, Constant, Sum, Tabulated

GRID64 = np.geomspace(1e-3, 1e3, 64)


def test_kernel_examples():
    for k in range(11):
        assert kernel_B(k, 0.37, 0.37) == 1.0
    assert kernel_B(0, 1.0, 4.0) == pytest.approx(0.8, abs=1e-15)
    with pytest.raises(DomainError):
        kernel_B(0, 0.0, 1.0)
    with pytest.raises(DomainError):
        kernel_B(0, 1.0, -2.0)


@pytest.mark.parametrize("k", range(11))
def test_kernel_properties_on_grid(k):
    kg = KernelGrid.compute(k, GRID64, GRID64)
    b = kg.values
    # (i) finite and bounded by one
    assert np.all(np.isfinite(b)) and np.max(np.abs(b)) <= 1.0 + 1e-15
    # (ii) symmetry
    assert np.max(np.abs(b - b.T)) <= 1e-15
    # (iii) smoothness: divided differences in log coordinates stay bounded
    ds = np.diff(np.log(GRID64))[0]
    d1 = np.abs(np.diff(b, axis=1)) / ds
    assert np.all(np.isfinite(d1)) and d1.max() < 2.0 * (k + 1) ** 2
    # (iv) homogeneity of order zero
    for alpha in (0.1, 3.0, 100.0):
        scaled = kernel_B(k, alpha * GRID64[:, None], alpha * GRID64[None, :])
        assert np.max(np.abs(scaled - b)) <= 1e-12
    # (v) diagonal exactly one
    assert np.all(np.diag(b) == 1.0)


@settings(max_examples=60)
@given(st.integers(0, 20), st.floats(1e-8, 1e8), st.floats(1e-8, 1e8), st.floats(1e-3, 1e3))
def test_kernel_symmetric_homogeneous(k, x, t, c):
    b = kernel_B(k, x, t)
    assert b == kernel_B(k, t, x)
    assert abs(kernel_B(k, c * x, c * t) - b) <= 1e-12
    assert abs(b) <= 1.0


def test_kernel_csv(tmp_path):
    kg = KernelGrid.compute(2, [1.0, 2.0], [1.0, 3.0, 5.0])
    p = tmp_path / "k.csv"
    kg.to_csv(p)
    lines = p.read_text().splitlines()
    assert lines[0] == "xi,t,B" and len(lines) == 7
    assert lines[1] == "1,1,1"


# ---------------------------------------------------------------------------

V = np.linspace(-8.0, 8.0, 3201)
GAUSS = Tabulated(V, np.exp(-np.pi * V ** 2), axis=HORIZONTAL, fill=0.0)


def _indicator_samples(xi, lo=1.0, hi=2.0):
    return ((xi >= lo - 1e-9) & (xi <= hi + 1e-9)).astype(float)


def _brute_force(k, xi, f, refine=4):
    """Double sum at ``refine``-times resolution with the exact Gaussian transform,
    applied to the piecewise-linear function the samples represent."""
    t = np.linspace(xi[0], xi[-1], refine * (xi.size - 1) + 1)
    ft = np.interp(t, xi, f)
    w = np.full(t.size, t[1] - t[0])
    w[[0, -1]] *= 0.5
    out = np.empty(xi.size)
    for i, x in enumerate(xi):
        out[i] = np.sum(kernel_B(k, x, t) * np.exp(-np.pi * (x - t) ** 2) * ft * w)
    return out


def test_constant_symbol_is_scalar():
    xi = np.geomspace(0.1, 10, 33)
    f = np.sin(xi) + 1j * np.cos(3 * xi)
    for k in (0, 4):
        np.testing.assert_array_equal(apply_model_operator(Constant(1.0, axis=HORIZONTAL), k, xi, f), f)
        np.testing.assert_array_equal(
            apply_model_operator(Constant(2.5 - 1j, axis=HORIZONTAL), k, xi, f), (2.5 - 1j) * f)


@pytest.mark.parametrize("k", [0, 3])
def test_gaussian_symbol_against_brute_force(k):
    xi = np.linspace(0.25, 4.25, 401)
    f = _indicator_samples(xi)
    out = apply_model_operator(GAUSS, k, xi, f)
    ref = _brute_force(k, xi, f)
    assert np.max(np.abs(out - ref)) / np.max(np.abs(ref)) < 1e-4


def test_model_operator_linearity():
    xi = np.linspace(0.25, 4.25, 201)
    f, g = _indicator_samples(xi), np.exp(-xi)
    v = np.linspace(-8, 8, 4096, endpoint=False)
    grid_b = Tabulated(v, np.exp(-np.pi * v ** 2), axis=HORIZONTAL, fill=0.0)
    other = Tabulated(v, np.exp(-2 * np.pi * (v - 0.5) ** 2), axis=HORIZONTAL, fill=0.0)
    lhs = apply_model_operator(grid_b, 1, xi, 2 * f - 3j * g, v_grid=v)
    rhs = 2 * apply_model_operator(grid_b, 1, xi, f, v_grid=v) - 3j * apply_model_operator(
        grid_b, 1, xi, g, v_grid=v)
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)
    both = apply_model_operator(Sum(grid_b, other), 1, xi, f, v_grid=v)
    parts = (apply_model_operator(grid_b, 1, xi, f, v_grid=v)
             + apply_model_operator(other, 1, xi, f, v_grid=v))
    np.testing.assert_allclose(both, parts, atol=1e-10)


def test_grid_coverage_error():
    xi = np.linspace(0.5, 40.0, 50)
    coarse = np.linspace(-8, 8, 64)
    with pytest.raises(GridCoverageError):
        apply_model_operator(GAUSS, 0, xi, np.ones_like(xi), v_grid=coarse)


# ---------------------------------------------------------------------------

def test_q_at_zero_and_pairing_oracle():
    assert abs(q_fn(0, 0.0)) < 1e-12
    assert abs(q_fn(0, 0.0) - q_paired(0, 0.0)) < 1e-6
    for k in (0, 1, 2, 5):
        for lam in (0.3, 1.0, 7.5, 30.0):
            assert q_fn(k, lam) == pytest.approx(q_paired(k, lam), abs=1e-9)


def test_q_level_zero_closed_form():
    for lam in (-20.0, -1.0, 0.5, 2.0, 45.0):
        assert q_fn(0, lam) == pytest.approx(q0(lam), abs=1e-10)


@pytest.mark.parametrize("k", [0, 1, 3])
def test_q_is_real_and_odd(k):
    # real kernel paired with t -> 1/t makes q real, hence q(-lam) = -conj q(lam)
    for lam in (0.4, 3.0, 17.0):
        qp, qm = q_fn(k, lam), q_fn(k, -lam)
        assert abs(qp.imag) < 1e-10
        assert abs(qm + qp.conjugate()) < 1e-10


def test_q_pv_stability_under_halving():
    for k, lam in ((0, 1.0), (1, 5.0), (4, 20.0)):
        base = q_fn(k, lam)
        halved = q_fn(k, lam, delta0=0.5 * 0.05 / max(1.0, abs(lam) / 4.0))
        assert abs(base - halved) < 1e-6


def test_q_domain_and_levels():
    with pytest.raises(DomainError):
        q_fn(0, math.inf)
    with pytest.raises(ValueError):
        q_fn(0, 1.0, levels=1)


def test_q_sup_probe_symmetric_and_finite(tmp_path):
    rep = q_sup_probe(1, np.arange(-50.0, 50.25, 2.5))
    assert math.isfinite(rep.sup) and rep.edge_flat
    mag = np.abs(rep.values)
    np.testing.assert_allclose(mag, mag[::-1], atol=1e-10)
    p = tmp_path / "q.csv"
    rep.to_csv(p)
    assert p.read_text().splitlines()[0] == "lambda,q_re,q_im"
    with pytest.raises(ValueError):
        q_sup_probe(0, np.linspace(-10, 10, 5))
