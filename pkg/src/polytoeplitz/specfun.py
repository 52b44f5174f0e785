"""Laguerre and Legendre special functions.

All evaluators accept scalars or numpy arrays and return the same shape.
The Laguerre functions are produced by running the three-term recurrence
on exponentially scaled iterates, so large arguments never overflow an
intermediate polynomial value.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

MAX_ORDER = 64


class DomainError(ValueError):
    """Argument outside the domain of a function."""


def _check_order(n: int) -> int:
    if int(n) != n or n < 0:
        raise DomainError(f"order must be a nonnegative integer, got {n!r}")
    if n > MAX_ORDER:
        raise DomainError(f"order {n} exceeds the supported cap {MAX_ORDER}")
    return int(n)


def _out(x, arr):
    return float(arr) if np.ndim(x) == 0 else arr


def laguerre_poly(n: int, x):
    """Laguerre polynomial L_n(x) by the three-term recurrence."""
    n = _check_order(n)
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        return _out(x, prev)
    cur = 1.0 - x
    for j in range(1, n):
        prev, cur = cur, ((2 * j + 1 - x) * cur - j * prev) / (j + 1)
    return _out(x, cur)


def laguerre_fn(n: int, x):
    """Laguerre function e^{-x/2} L_n(x) for x >= 0."""
    n = _check_order(n)
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("laguerre_fn is defined for x >= 0 only")
    prev = np.exp(-0.5 * x)
    if n == 0:
        return _out(x, prev)
    cur = (1.0 - x) * prev
    for j in range(1, n):
        prev, cur = cur, ((2 * j + 1 - x) * cur - j * prev) / (j + 1)
    return _out(x, cur)


def laguerre_fn_sq(n: int, x):
    """Squared Laguerre function; zero for negative arguments."""
    x = np.asarray(x, dtype=float)
    val = laguerre_fn(n, np.maximum(x, 0.0))
    return _out(x, np.where(x >= 0, np.square(val), 0.0))


def gen_laguerre_fn(k: int, alpha: float, x):
    """Normalized generalized Laguerre function.

    ``[k!/Gamma(k+alpha+1)]^{1/2} x^{alpha/2} e^{-x/2} L_k^{(alpha)}(x)``.
    Orthonormal on the half line for every alpha > -1; alpha = 0 gives
    :func:`laguerre_fn`.
    """
    k = _check_order(k)
    if not alpha > -1:
        raise DomainError(f"alpha must exceed -1, got {alpha}")
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("gen_laguerre_fn is defined for x >= 0 only")
    log_norm = 0.5 * (math.lgamma(k + 1) - math.lgamma(k + alpha + 1))
    with np.errstate(divide="ignore"):
        pref = np.exp(log_norm - 0.5 * x) * np.power(x, 0.5 * alpha)
    prev = pref
    if k == 0:
        return _out(x, prev)
    cur = (1.0 + alpha - x) * pref
    for j in range(1, k):
        prev, cur = cur, ((2 * j + 1 + alpha - x) * cur - (j + alpha) * prev) / (j + 1)
    return _out(x, cur)


def legendre_poly(n: int, x):
    """Legendre polynomial P_n(x) by Bonnet's recurrence.

    P_n(1) = 1 and P_n(-1) = (-1)^n hold exactly in floating point.
    """
    n = _check_order(n)
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        return _out(x, prev)
    cur = x.copy()
    for j in range(1, n):
        prev, cur = cur, ((2 * j + 1) * x * cur - j * prev) / (j + 1)
    return _out(x, cur)


@lru_cache(maxsize=None)
def kappa_exact(k: int, i: int, j: int) -> Fraction:
    k = _check_order(k)
    if not (0 <= i <= k and 0 <= j <= k):
        raise IndexError(f"kappa indices must satisfy 0 <= i, j <= k; got ({k}, {i}, {j})")
    sign = -1 if (i + j) % 2 else 1
    return Fraction(sign * math.comb(k, i) * math.comb(k, j),
                    math.factorial(i) * math.factorial(j))


def kappa(k: int, i: int, j: int) -> float:
    """Coefficient (-1)^{i+j} C(k,i) C(k,j) / (i! j!) of the Laplace expansion."""
    return float(kappa_exact(k, i, j))


@lru_cache(maxsize=None)
def kappa_by_degree(k: int) -> tuple[float, ...]:
    """Sum of kappa(k, i, j) over i + j = m, for m = 0..2k (exact, then rounded)."""
    out = [Fraction(0)] * (2 * k + 1)
    for i in range(k + 1):
        for j in range(k + 1):
            out[i + j] += kappa_exact(k, i, j)
    return tuple(float(c) for c in out)


@lru_cache(maxsize=None)
def truncation_point(k: int, eps: float = 1e-18) -> float:
    """Smallest u past the last zero of L_k with e^{-u} L_k(u)^2 < eps.

    Doubling search from an upper bound on the largest zero, refined by
    bisection on the final doubling interval.
    """
    k = _check_order(k)

    def tail(u):
        return laguerre_fn(k, u) ** 2

    u = max(4.0 * k + 2.0, 1.0)
    while tail(u) >= eps:
        u *= 2.0
    lo, hi = max(u / 2.0, 4.0 * k + 2.0), u
    if tail(lo) < eps:
        return lo
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if tail(mid) < eps:
            hi = mid
        else:
            lo = mid
    return hi


@lru_cache(maxsize=None)
def gauss_laguerre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the n-point Gauss-Laguerre rule (weight e^{-x})."""
    x, w = np.polynomial.laguerre.laggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w
