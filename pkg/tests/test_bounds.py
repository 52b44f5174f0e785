import json
import math

import numpy as np
import pytest
from scipy import integrate

from polytoeplitz.bounds import (AT_INFINITY, AT_ZERO, BOUNDED_ITERATED, INCONCLUSIVE,
                                 PROBE_ABS_TOL, PROBE_REL_TOL,
                                 UNBOUNDED_BIG_THETA, UNBOUNDED_THETA, AsymptoticProbe,
                                 big_theta, classify_boundedness, fit_envelope, iterated_integral,
                                 probe_growth, theta, weighted_mean)
from polytoeplitz.gamma import gamma_values, operator_norm
from polytoeplitz.quadrature import QuadratureConfig
from polytoeplitz.specfun import DomainError
from polytoeplitz.symbols import (ComplexExp, Constant, DampedSine, Indicator, OscPower,
                                  OscPowerPositive, Power, PowerLogSquared, PureOscillation, SineU,
                                  semicommutator_parts)

BUILTINS = [Indicator(1.0), SineU(), DampedSine(1.0), ComplexExp(), PureOscillation(),
            Constant(2.0 - 1j), OscPower(0.9, 0.5), OscPowerPositive(0.5, 1.0)]


def test_iterated_examples():
    for m in (1, 2, 3, 5):
        for u in (0.3, 4.0):
            assert iterated_integral(Constant(1.0), m, u) == pytest.approx(u ** m / math.factorial(m),
                                                                           rel=1e-12)
    assert iterated_integral(Indicator(1.0), 1, 2.0) == pytest.approx(1.0, abs=1e-14)
    with pytest.raises(ValueError):
        iterated_integral(Constant(1.0), 7, 1.0)
    with pytest.raises(DomainError):
        iterated_integral(Constant(1.0), 1, 0.0)


def test_oscpower_leading_term_near_zero():
    # C^(1)(u) ~ u^{alpha-beta+1}/alpha cos(u^{-alpha}) as u -> 0
    al, be = 0.9, 0.5
    a = OscPower(al, be)
    for u in (1e-4, 1e-5):
        lead = u ** (al - be + 1) / al * math.cos(u ** -al)
        err = abs(iterated_integral(a, 1, u) - lead)
        assert err <= 10 * u ** (2 * al - be + 1)


def _nested(a, m, u):
    """Literal repeated integration with scipy, real and imaginary parts separately."""
    def c(t, level):
        if level == 1:
            return iterated_integral(a, 1, t) if t > 0 else 0j
        re, _ = integrate.quad(lambda s: c(s, level - 1).real, 0, t, epsabs=1e-13, epsrel=1e-12,
                               points=[1.0] if t > 1.0 else None, limit=100)
        im, _ = integrate.quad(lambda s: c(s, level - 1).imag, 0, t, epsabs=1e-13, epsrel=1e-12,
                               points=[1.0] if t > 1.0 else None, limit=100)
        return complex(re, im)
    return c(u, m)


@pytest.mark.parametrize("a", [Indicator(1.0), SineU(), DampedSine(1.0), ComplexExp()])
@pytest.mark.parametrize("m", [2, 3])
def test_collapse_matches_literal_nesting(a, m):
    for u in (0.5, 2.5):
        assert iterated_integral(a, m, u) == pytest.approx(_nested(a, m, u), abs=1e-8)


def test_weighted_mean_examples():
    u = 3.0
    assert weighted_mean(Constant(1.0), 1, 1, u) == pytest.approx(u * u / 2, rel=1e-12)
    assert weighted_mean(Indicator(1.0), 0, 1, 1.0) == pytest.approx(1.0, abs=1e-14)
    with pytest.raises(DomainError):
        weighted_mean(Constant(1.0), -1, 1, 1.0)


@pytest.mark.parametrize("a", BUILTINS, ids=lambda s: s.spec)
def test_d_c_consistency(a):
    for m in (1, 2, 3):
        for u in (0.1, 1.0, 10.0):
            d = weighted_mean(a, 0, m, u)
            c = iterated_integral(a, m, u / 2)
            assert d == pytest.approx(2 ** m * c, abs=1e-9)


def test_infima_examples():
    assert theta(Constant(5.0), 1.0) == 5.0
    assert big_theta(Constant(5.0), 1e8) == 5.0
    assert theta(Indicator(1.0), 0.5) == 1.0
    a = PowerLogSquared(1.0, 0.5)
    vals = [theta(a, 10.0 ** -j) for j in (5, 20, 80)]
    assert vals[0] > 1e3 and vals[0] < vals[1] < vals[2]
    with pytest.raises(DomainError):
        theta(ComplexExp(), 1.0)


def test_probe_invariants():
    with pytest.raises(ValueError):
        AsymptoticProbe(AT_ZERO, 1.0, (1.0, 0.5), 0.0)
    with pytest.raises(ValueError):
        AsymptoticProbe(AT_ZERO, 1.0, (1e-6, 1e-3), -1.0)


def test_fit_envelope_recovers_power_and_ignores_oscillation():
    u = np.geomspace(1e3, 1e6, 97)
    slope, resid = fit_envelope(u, 3 * u ** 1.5)
    assert slope == pytest.approx(1.5, abs=1e-12) and resid < 1e-10
    slope, resid = fit_envelope(u, u ** 0.7 * np.cos(u))
    assert slope == pytest.approx(0.7, abs=0.05) and resid < 0.1


@pytest.mark.parametrize("a", [Constant(1.0), Indicator(1.0), OscPower(0.9, 0.5)],
                         ids=lambda s: s.spec)
def test_monotone_propagation(a):
    cfg = QuadratureConfig(abs_tol=PROBE_ABS_TOL, rel_tol=PROBE_REL_TOL)
    for side in (AT_ZERO, AT_INFINITY):
        p1 = probe_growth(lambda x: iterated_integral(a, 1, x, cfg), 1, side)
        if p1.passed:
            p2 = probe_growth(lambda x: iterated_integral(a, 2, x, cfg), 2, side)
            assert p2.passed


def test_classifier_examples():
    v = classify_boundedness(OscPower(0.9, 0.5))
    assert v.kind == BOUNDED_ITERATED and v.m == 1
    v = classify_boundedness(PowerLogSquared(1.0, 0.5))
    assert v.kind == UNBOUNDED_THETA
    v = classify_boundedness(Constant(1.0))
    assert v.kind == BOUNDED_ITERATED and v.m == 1


def test_classifier_semicommutator_part():
    c1, _ = semicommutator_parts(OscPower(1.0, 0.9), OscPowerPositive(0.1, 1.0))
    v = classify_boundedness(c1)
    assert v.unbounded and v.kind == UNBOUNDED_THETA


def test_classifier_big_theta_branch_and_fallback():
    assert classify_boundedness(Power(-0.5)).kind == UNBOUNDED_BIG_THETA
    v = classify_boundedness(SineU())
    assert v.kind == INCONCLUSIVE and v.diagnostics


def test_report_json_schema():
    v = classify_boundedness(Indicator(0.5))
    d = json.loads(v.to_json(Indicator(0.5)))
    assert d["schema_version"] == 1
    assert d["symbol"] == "indicator:0.5"
    assert d["verdict"] == BOUNDED_ITERATED
    assert {"probes", "theta_trace", "parameters"} <= set(d)
    assert d["parameters"]["slope_margin"] == 0.05
    for p in d["probes"]:
        assert p["side"] in (AT_ZERO, AT_INFINITY)


def test_bounded_verdicts_have_finite_norm():
    for a in (OscPower(0.9, 0.5), Indicator(0.5), Constant(1.0)):
        assert classify_boundedness(a).bounded
        for k in (0, 1, 2):
            assert math.isfinite(float(operator_norm(a, k)))


def test_unbounded_verdicts_show_large_gamma():
    c1, _ = semicommutator_parts(OscPower(1.0, 0.9), OscPowerPositive(0.1, 1.0))
    xi = np.geomspace(1e-6, 1e6, 25)
    for a in (PowerLogSquared(1.0, 0.5), c1):
        assert classify_boundedness(a).unbounded
        for k in (0, 1, 2):
            assert np.max(np.abs(gamma_values(a, k, xi))) > 1e3
