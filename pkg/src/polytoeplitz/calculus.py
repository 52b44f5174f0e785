"""Level-exchange functional calculus.

The operator T_{a+}^{(0)} with a+ the indicator of [0, 1/2] has spectral
function 1 - e^{-xi} and spectrum [0, 1].  Every vertical Toeplitz operator
T_a^{(k)} is the function nabla_{a,lambda}^{(k)} o Delta_lambda of it, with

    Delta_lambda(x) = 1 - (1 - x)^{2 lambda},
    nabla(x) = -(1/lambda) ln(1-x) int a(u) (1-x)^{u/lambda} L_k^2(-(u/lambda) ln(1-x)) du.

Points of [0, 1] are carried as log(1 - x): near x = 1 the spectral
parameter itself rounds to 1.0 long before the underlying xi is large, while
log(1 - x) = -xi stays exact and Delta_lambda becomes multiplication by
2 lambda.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .gamma import endpoint_limits, gamma_fn
from .integrals import integrate_symbol
from .quadrature import QuadratureConfig
from .specfun import DomainError, _check_order, laguerre_poly, truncation_point
from .symbols import Symbol, VERTICAL


@dataclass(frozen=True)
class SpectralParameter:
    """A point x of [0, 1] stored as log1m = log(1 - x) in [-inf, 0]."""

    log1m: float

    def __post_init__(self):
        if math.isnan(self.log1m) or self.log1m > 0:
            raise DomainError("log(1 - x) must lie in [-inf, 0]")

    @classmethod
    def from_x(cls, x: float) -> "SpectralParameter":
        x = float(x)
        if not 0.0 <= x <= 1.0:
            raise DomainError(f"spectral parameter must lie in [0, 1], got {x}")
        return cls(-math.inf if x == 1.0 else math.log1p(-x))

    @classmethod
    def from_xi(cls, xi: float) -> "SpectralParameter":
        """The value 1 - e^{-xi} of the generator's spectral function."""
        if not xi >= 0:
            raise DomainError("xi must be nonnegative")
        return cls(-float(xi))

    @property
    def x(self) -> float:
        return 1.0 if self.log1m == -math.inf else -math.expm1(self.log1m)


def _check_lambda(lam: float) -> float:
    lam = float(lam)
    if not lam > 0 or not math.isfinite(lam):
        raise DomainError("lambda must be a positive real")
    return lam


def delta(lam: float, x):
    """Delta_lambda(x) = 1 - (1 - x)^{2 lambda}.

    Accepts a float in [0, 1] (returns a float) or a :class:`SpectralParameter`
    (returns one, exactly).
    """
    lam = _check_lambda(lam)
    if isinstance(x, SpectralParameter):
        return SpectralParameter(2.0 * lam * x.log1m)
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"Delta is defined on [0, 1], got {x}")
    if lam == 0.5 or x in (0.0, 1.0):
        return x
    return -math.expm1(2.0 * lam * math.log1p(-x))


def delta_inv(lam: float, y):
    """Inverse of Delta_lambda: 1 - (1 - y)^{1/(2 lambda)}."""
    lam = _check_lambda(lam)
    if isinstance(y, SpectralParameter):
        return SpectralParameter(y.log1m / (2.0 * lam))
    y = float(y)
    if not 0.0 <= y <= 1.0:
        raise DomainError(f"Delta^-1 is defined on [0, 1], got {y}")
    if lam == 0.5 or y in (0.0, 1.0):
        return y
    return -math.expm1(math.log1p(-y) / (2.0 * lam))


def nabla(a: Symbol, lam: float, k: int, x, cfg: QuadratureConfig | None = None,
          *, return_flag: bool = False):
    """nabla_{a,lambda}^{(k)}(x) by quadrature of its defining u-integral.

    ``x`` is a float in [0, 1] or a :class:`SpectralParameter`.  With
    c = -ln(1 - x)/lambda the integrand is c a(u) e^{-c u} L_k(c u)^2, cut
    where e^{-s} L_k(s)^2 drops below the truncation tolerance.  At x = 0 and
    x = 1 the extrapolated limits a(+inf) and a(0) of the spectral function
    are returned; with ``return_flag`` the result is ``(value, is_limit)``.
    """
    if a.axis != VERTICAL:
        raise ValueError("nabla takes a vertical symbol")
    lam = _check_lambda(lam)
    k = _check_order(k)
    cfg = cfg or QuadratureConfig()
    p = x if isinstance(x, SpectralParameter) else SpectralParameter.from_x(x)
    c = -p.log1m / lam
    if c == 0.0 or math.isinf(c):
        at_zero, at_inf = endpoint_limits(a, k, cfg)
        val = at_zero if c == 0.0 else at_inf
        if val is None:
            raise DomainError("the endpoint limit of nabla does not exist for this symbol")
        return (complex(val), True) if return_flag else complex(val)
    upper = truncation_point(k, cfg.truncation_eps) / c

    def weight(u):
        s = c * np.asarray(u, dtype=float)
        return c * np.exp(-s) * np.square(laguerre_poly(k, s))

    val = integrate_symbol(a, weight, 0.0, upper, cfg).value
    return (val, False) if return_flag else val


# ---------------------------------------------------------------------------
# verification reports
# ---------------------------------------------------------------------------

def _cplx(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


@dataclass
class VerificationReport:
    """Paired sides of an identity on a grid, with a tolerance verdict."""

    identity: str
    grid: list
    lhs: list
    rhs: list
    max_abs_dev: float
    tolerance: float
    passed: bool
    parameters: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "identity": self.identity,
            "grid": [float(g) if np.ndim(g) == 0 else [float(v) for v in g] for g in self.grid],
            "lhs": [_cplx(z) for z in self.lhs],
            "rhs": [_cplx(z) for z in self.rhs],
            "max_abs_dev": float(self.max_abs_dev),
            "tolerance": float(self.tolerance),
            "pass": bool(self.passed),
            "parameters": self.parameters,
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


LEVEL_EXCHANGE_TOL = 1e-6


def level_exchange_check(a: Symbol, lam: float, k: int, xi_grid,
                         cfg: QuadratureConfig | None = None,
                         tolerance: float = LEVEL_EXCHANGE_TOL) -> VerificationReport:
    """Compare nabla(Delta_lambda(1 - e^{-xi})) with gamma_{a,k}(xi) on a grid."""
    lam = _check_lambda(lam)
    xi = np.asarray(xi_grid, dtype=float)
    lhs, rhs = [], []
    for x in xi:
        p = delta(lam, SpectralParameter.from_xi(x))
        lhs.append(complex(nabla(a, lam, k, p, cfg)))
        rhs.append(complex(gamma_fn(a, k, x, cfg)))
    dev = float(np.max(np.abs(np.array(lhs) - np.array(rhs)))) if xi.size else 0.0
    return VerificationReport(
        "level-exchange", list(xi), lhs, rhs, dev, tolerance, dev < tolerance,
        {"symbol": a.spec, "lambda": lam, "k": int(k)})
