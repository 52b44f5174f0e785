import math

import numpy as np
import pytest

from polytoeplitz.integrals import integrate_symbol
from polytoeplitz.quadrature import NonConvergent, QuadratureConfig, adaptive_gk, integrate
from polytoeplitz.symbols import (ComplexExp, DampedSine, Indicator, OscPower, Power, Scaled,
                                  SineU, Sum)


def test_config_validation_and_tightening():
    with pytest.raises(ValueError):
        QuadratureConfig(rel_tol=0.0)
    with pytest.raises(ValueError):
        QuadratureConfig(max_subdivisions=0)
    t = QuadratureConfig().tightened(1e-3)
    assert t.rel_tol == pytest.approx(1e-13) and t.abs_tol == pytest.approx(1e-15)


def test_gk_polynomial_exact():
    r = integrate(lambda x: x ** 5 - 3 * x ** 2, 0.0, 2.0)
    assert r.value == pytest.approx(64 / 6 - 8, abs=1e-14)


def test_gk_endpoint_singularity():
    r = integrate(lambda x: 1 / np.sqrt(x), 0.0, 1.0, QuadratureConfig(rel_tol=1e-12))
    assert r.value.real == pytest.approx(2.0, abs=1e-10)


def test_nonconvergent_carries_estimate():
    cfg = QuadratureConfig(max_subdivisions=3)
    with pytest.raises(NonConvergent) as info:
        adaptive_gk(lambda x: np.sin(1.0 / x), [1e-6, 1.0], cfg)
    assert info.value.estimate is not None and info.value.error > 0
    r = adaptive_gk(lambda x: np.sin(1.0 / x), [1e-6, 1.0], cfg, raise_on_fail=False)
    assert r.error > 0


def test_rounding_limited_cancellation_is_accepted():
    # thousands of periods with O(1) integrand and a tiny result
    r = adaptive_gk(lambda x: np.sin(x), np.linspace(0.0, 2000 * math.pi, 4001),
                    QuadratureConfig(rel_tol=1e-14, abs_tol=1e-300))
    assert abs(r.value) < 1e-10


def test_integrate_symbol_laplace_weights():
    w = lambda x: np.exp(-x)  # noqa: E731
    assert integrate_symbol(Indicator(2.0), w, 0.0, 50.0).value == pytest.approx(1 - math.exp(-2),
                                                                                  abs=1e-13)
    # int sin(u) e^{-u} = 1/2 and int e^{2iu} e^{-u} = 1/(1 - 2i)
    assert integrate_symbol(SineU(), w, 0.0, 60.0).value == pytest.approx(0.5, abs=1e-12)
    assert integrate_symbol(ComplexExp(), w, 0.0, 60.0).value == pytest.approx(1 / (1 - 2j),
                                                                                abs=1e-12)
    # u^{-1/2} against e^{-u}: Gamma(1/2)
    assert integrate_symbol(Power(0.5), w, 0.0, 60.0).value == pytest.approx(math.sqrt(math.pi),
                                                                             rel=1e-10)


def test_integrate_symbol_scaling_and_combinators():
    w = lambda x: np.exp(-x)  # noqa: E731
    s = Sum(Scaled(3.0, Indicator(1.0)), DampedSine(1.0))
    # int sin(u) e^{-2u} = 1/5
    ref = 3 * (1 - math.exp(-1)) + 0.2
    assert integrate_symbol(s, w, 0.0, 60.0).value == pytest.approx(ref, abs=1e-12)
    # a(2x): indicator of [0, 1/2] in x
    r = integrate_symbol(Indicator(1.0), w, 0.0, 60.0, scale=2.0)
    assert r.value == pytest.approx(1 - math.exp(-0.5), abs=1e-13)


def test_oscillatory_head_near_zero():
    # u^{-1/2} sin(u^{-1}) against e^{-u} on [0, 60]; substitute t = 1/u for the reference
    from scipy import integrate as si
    val = integrate_symbol(OscPower(1.0, 0.5), lambda x: np.exp(-x), 0.0, 60.0).value
    head, _ = si.quad(lambda t: t ** -1.5 * math.exp(-1 / t), 1.0, np.inf, weight="sin", wvar=1.0)
    tail, _ = si.quad(lambda u: u ** -0.5 * math.sin(1 / u) * math.exp(-u), 1.0, 60.0,
                      epsabs=1e-13, limit=200)
    assert val.real == pytest.approx(head + tail, abs=1e-9)
