"""Integrals of a symbol against a smooth weight.

``integrate_symbol(a, w, lo, hi)`` computes  int_lo^hi a(scale*x) w(x) dx  and
is the single entry point used by the spectral-function, boundedness and
functional-calculus code.  It combines three pieces:

* panels placed at the symbol's breakpoints and sized to its local
  oscillation frequency, refined by adaptive Gauss-Kronrod;
* for symbols that are exact sums of ``c t^p exp(i nu t^-alpha)`` terms,
  an origin segment integrated after the substitution s = |nu| t^-alpha,
  which turns unbounded oscillation into a Fourier integral on [S, inf)
  handled by QUADPACK's QAWF/QAWO;
* a tiny origin cutoff for bounded symbols whose oscillation is only
  logarithmic (u^i), where the discarded piece is below tolerance.
"""

from __future__ import annotations

import math
import warnings

import numpy as np
from scipy import integrate as sp_integrate

from .quadrature import NonConvergent, QuadratureConfig, QuadResult, adaptive_gk
from .specfun import DomainError
from .symbols import Scaled, Sum, Symbol

HEAD_CYCLES = 64
MAX_PANELS = 200_000
HEAD_ABS_FLOOR = 1e-14


def _freq_edges(freq, x0: float, x1: float, ppp: int) -> np.ndarray:
    """Panel edges on [x0, x1] with at most 1/ppp of a local period per panel."""
    f0, f1 = float(freq(np.array([x0]))[0]), float(freq(np.array([x1]))[0])
    if f0 <= 0 and f1 <= 0:
        return np.array([x0, x1])
    probe = np.linspace(x0, x1, 9)
    fp = freq(probe)
    if np.allclose(fp, fp[0], rtol=1e-12, atol=0):
        n = int(math.ceil((x1 - x0) * fp[0] * ppp))
        if n > MAX_PANELS:
            raise NonConvergent(f"oscillatory range needs {n} panels")
        return np.linspace(x0, x1, max(n, 1) + 1)
    edges = [x0]
    x = x0
    while x < x1:
        f = float(freq(np.array([x]))[0])
        step = x1 - x if f <= 0 else 1.0 / (ppp * f)
        # frequency may grow inside the step; shrink until consistent
        for _ in range(8):
            f_end = float(freq(np.array([min(x + step, x1)]))[0])
            if f_end * step * ppp <= 1.5:
                break
            step = 1.0 / (ppp * f_end)
        x = min(x + step, x1)
        edges.append(x)
        if len(edges) > MAX_PANELS:
            raise NonConvergent("oscillatory range needs too many panels")
    return np.array(edges)


def _quadpack_once(g, s0, s1, kind, epsabs, limit):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        if math.isinf(s1):
            val, err = sp_integrate.quad(g, s0, np.inf, weight=kind, wvar=1.0,
                                         epsabs=epsabs, limlst=200, limit=limit)
        else:
            val, err = sp_integrate.quad(g, s0, s1, weight=kind, wvar=1.0,
                                         epsabs=epsabs, epsrel=1e-12, limit=limit)
    return val, err, bool(caught)


def _quadpack(g, s0, s1, kind, epsabs, limit=400):
    """QAWO/QAWF with a fallback for QAWF's cycle extrapolation.

    When the extrapolation misbehaves on the first cycles, a finite QAWO
    piece [s0, 2^j s0] is peeled off before the Fourier tail.
    """
    val, err, warned = _quadpack_once(g, s0, s1, kind, epsabs, limit)
    if not math.isinf(s1) or err <= 1e3 * max(epsabs, 1e-12 * abs(val)):
        return val, err, warned
    best = (val, err, warned)
    for j in (1, 2, 4, 8):
        mid = s0 * 2.0 ** j
        v1, e1, w1 = _quadpack_once(g, s0, mid, kind, epsabs, 4 * limit)
        v2, e2, w2 = _quadpack_once(g, mid, s1, kind, epsabs, limit)
        if e1 + e2 < best[1]:
            best = (v1 + v2, e1 + e2, w1 or w2)
        if best[1] <= 1e3 * max(epsabs, 1e-12 * abs(best[0])):
            break
    return best


def _head(a: Symbol, terms, weight, x0: float, x1: float, scale: float,
          cfg: QuadratureConfig):
    """Origin segment [x0, x1] via the oscillation-unrolling substitution."""
    total = 0j
    err_total = 0.0
    groups: dict[tuple, list] = {}
    plain = []
    for t in terms:
        if t.nu == 0:
            plain.append(t)
        else:
            groups.setdefault((t.power, abs(t.nu), t.alpha), []).append(t)

    if plain:
        def f_plain(x):
            tt = scale * x
            return sum(t.coef * tt ** t.power for t in plain) * weight(x)
        res = adaptive_gk(f_plain, np.array([x0, x1]), cfg)
        total += res.value
        err_total += res.error

    for (p, nu, alpha), members in groups.items():
        c_plus = sum(t.coef for t in members if t.nu > 0)
        c_minus = sum(t.coef for t in members if t.nu < 0)

        def g(sig, p=p, nu=nu, alpha=alpha):
            tt = (sig / nu) ** (-1.0 / alpha)
            x = tt / scale
            w = weight(np.atleast_1d(x))[0]
            if np.iscomplexobj(w):
                if w.imag != 0:
                    raise ValueError("origin substitution needs a real weight")
                w = w.real
            return tt ** p * w * x / (alpha * sig)

        s_hi = nu * (scale * x0) ** (-alpha) if x0 > 0 else math.inf
        s_lo = nu * (scale * x1) ** (-alpha)
        parts = []
        for kind in ("cos", "sin"):
            val, err, _ = _quadpack(g, s_lo, s_hi, kind, max(cfg.abs_tol, HEAD_ABS_FLOOR))
            # tiny values: second pass with a tolerance relative to the first estimate
            target = max(cfg.abs_tol, cfg.rel_tol * max(abs(val), abs(total)))
            if target < err:
                val, err, _ = _quadpack(g, s_lo, s_hi, kind, target)
            parts.append((val, err))
        (ic, ec), (is_, es) = parts
        total += (c_plus + c_minus) * ic + 1j * (c_plus - c_minus) * is_
        err_total += (abs(c_plus) + abs(c_minus)) * (ec + es)
        size = max(abs(ic + 1j * is_), abs(total))
        if (ec + es) > 1e3 * max(cfg.abs_tol, cfg.rel_tol * size):
            raise NonConvergent("oscillatory origin integral did not converge",
                                total, err_total)
    return total, err_total


def integrate_symbol(a: Symbol, weight, lo: float, hi: float,
                     cfg: QuadratureConfig | None = None, *, scale: float = 1.0,
                     extra_points=()) -> QuadResult:
    """Integrate a(scale * x) * weight(x) over [lo, hi] (hi finite).

    ``weight`` maps a float array to real or complex values and must be
    smooth; any kinks it has should be passed in ``extra_points``.
    """
    cfg = cfg or QuadratureConfig()
    if not scale > 0:
        raise ValueError("scale must be positive")
    if not hi >= lo:
        raise ValueError("need lo <= hi")

    if isinstance(a, Scaled):
        r = integrate_symbol(a.inner, weight, lo, hi, cfg, scale=scale, extra_points=extra_points)
        return QuadResult(a.c * r.value, abs(a.c) * r.error, r.panels)

    s_lo, s_hi = a.support()
    s_hi = min(s_hi, a.tail_cutoff(cfg.truncation_eps))
    x_lo, x_hi = max(lo, s_lo / scale), min(hi, s_hi / scale)
    if not x_hi > x_lo:
        return QuadResult(0j, 0.0, 0)
    d_lo, d_hi = a.domain()
    if scale * x_lo < d_lo or scale * x_hi > d_hi:
        raise DomainError(
            f"integration range [{scale * x_lo}, {scale * x_hi}] leaves the symbol domain")

    terms = a.terms()
    osc = [t for t in terms if t.nu] if terms else []
    singular = float(a.frequency(np.array([1e-300]))[0]) > 1e100 and x_lo <= 0

    split_tails = isinstance(a, Sum) and (
        a.left.tail_cutoff(cfg.truncation_eps) != a.right.tail_cutoff(cfg.truncation_eps))
    if isinstance(a, Sum) and (split_tails or (singular and not osc)):
        r1 = integrate_symbol(a.left, weight, lo, hi, cfg, scale=scale, extra_points=extra_points)
        r2 = integrate_symbol(a.right, weight, lo, hi, cfg, scale=scale, extra_points=extra_points)
        return QuadResult(r1.value + r2.value, r1.error + r2.error, r1.panels + r2.panels)

    value, error = 0j, 0.0
    body_lo = x_lo
    if osc:
        t_head = max((abs(t.nu) / (2 * math.pi * HEAD_CYCLES)) ** (1.0 / t.alpha) for t in osc)
        x_head = t_head / scale
        if x_lo < x_head:
            x_end = min(x_head, x_hi)
            value, error = _head(a, terms, weight, x_lo, x_end, scale, cfg)
            body_lo = x_end
    elif singular:
        bound = a.sup_abs()
        if not math.isfinite(bound):
            raise NonConvergent("symbol oscillates unboundedly at the origin and has no "
                                "term decomposition")
        # discard [0, cut): contributes at most bound * |w| * cut
        w0 = float(np.max(np.abs(weight(np.array([0.0, 1e-300])))))
        cut = min(cfg.abs_tol / max(bound * max(w0, 1e-300), 1e-300), 1e-6 * (x_hi - x_lo))
        body_lo = max(x_lo, cut)

    if x_hi > body_lo:
        ppp = cfg.oscillatory_min_panels_per_period

        def freq_x(x):
            return a.frequency(scale * x) * scale

        pts = [p / scale for p in a.breakpoints() if body_lo < p / scale < x_hi]
        pts += [p for p in extra_points if body_lo < p < x_hi]
        nodes = np.unique(np.concatenate([[body_lo, x_hi], pts]))
        edges = [np.array([nodes[0]])]
        for p, q in zip(nodes[:-1], nodes[1:]):
            edges.append(_freq_edges(freq_x, p, q, ppp)[1:])
        edges = np.concatenate(edges)

        def f(x):
            return a._eval(scale * x) * weight(x)

        res = adaptive_gk(f, edges, cfg, abs_tol=max(cfg.abs_tol - error, cfg.abs_tol * 0.5))
        value += res.value
        error += res.error
        return QuadResult(value, error, res.panels)
    return QuadResult(value, error, 0)
