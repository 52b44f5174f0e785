"""Command-line interface.

Exit codes: 0 success (or identity verified), 2 usage or parse error,
3 numerical failure (non-convergence, aliasing, or a failed verification,
in which case the report is still written).
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import os
import sys
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from . import __version__
from .bounds import classify_boundedness
from .calculus import level_exchange_check
from .gamma import GammaCurve, endpoint_limits, operator_norm
from .horizontal import KernelGrid, q_fn, q_sup_probe
from .quadrature import NonConvergent, QuadratureConfig
from .specfun import DomainError
from .symbols import SymbolSyntaxError, parse_symbol
from .transform import (AliasingError, ScaleTimeGrid, cwt, hann_signal, indicator_signal,
                        quadratic_form_oracle)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# argument helpers
# ---------------------------------------------------------------------------

def grid_spec(text: str, geometric: bool) -> np.ndarray:
    """``lo:hi:n`` to a geometric or linear grid."""
    try:
        lo_s, hi_s, n_s = text.split(":")
        lo, hi, n = float(lo_s), float(hi_s), int(n_s)
    except ValueError as exc:
        raise UsageError(f"grid spec must be lo:hi:n, got {text!r}") from exc
    if n < 1 or not hi > lo:
        raise UsageError(f"grid spec needs hi > lo and n >= 1, got {text!r}")
    if geometric:
        if lo <= 0:
            raise UsageError("geometric grids need lo > 0")
        return np.geomspace(lo, hi, n)
    return np.linspace(lo, hi, n)


def _xi_grid(args, default: str) -> np.ndarray:
    if args.xi_lin:
        return grid_spec(args.xi_lin, geometric=False)
    return grid_spec(args.xi_log or default, geometric=True)


def _cfg(args) -> QuadratureConfig:
    try:
        return QuadratureConfig(rel_tol=args.rel_tol, abs_tol=args.abs_tol,
                                max_subdivisions=args.max_subdivisions,
                                truncation_eps=args.truncation_eps,
                                oscillatory_min_panels_per_period=args.panels_per_period)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _symbol(text: str):
    try:
        return parse_symbol(text)
    except (SymbolSyntaxError, ValueError) as exc:
        raise UsageError(f"cannot parse symbol {text!r}: {exc}") from exc


def _signal(text: str, n: int, omega_max: float):
    name, _, params = text.partition(":")
    try:
        vals = [float(p) for p in params.split(",")] if params else []
    except ValueError as exc:
        raise UsageError(f"bad signal parameters in {text!r}") from exc
    makers = {"indicator": indicator_signal, "hann": hann_signal}
    if name not in makers or len(vals) not in (0, 2):
        raise UsageError("signal must be indicator[:lo,hi] or hann[:lo,hi]")
    return makers[name](*vals, omega_max=omega_max, n=n)


def _meta(args) -> dict:
    if args.no_meta:
        return {}
    return {"meta": {"version": __version__,
                     "created": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")}}


def _cplx(z):
    if z is None:
        return None
    z = complex(z)
    return [z.real, z.imag]


@contextmanager
def _sink(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with Path(path).open("w", newline="") as fh:
            yield fh


def _write_json(path, payload):
    with _sink(path) as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_rows(path, header, rows):
    with _sink(path) as fh:
        fh.write(",".join(header) + "\n")
        for r in rows:
            fh.write(",".join(f"{v:.17g}" for v in r) + "\n")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_gamma(args) -> int:
    a = _symbol(args.symbol)
    cfg = _cfg(args)
    xi = _xi_grid(args, "0.01:100:200")
    curve = GammaCurve.compute(a, args.k, xi, cfg)
    rows = [(x, v.real, v.imag) for x, v in zip(curve.xi_grid, curve.values)]
    if args.format == "json":
        _write_json(args.out, {"schema_version": 1, "symbol": a.spec, "k": args.k,
                               "xi": list(curve.xi_grid), "gamma": [_cplx(v) for v in curve.values],
                               "sup_abs": curve.sup_abs, **_meta(args)})
    else:
        _write_rows(args.out, ["xi", "gamma_re", "gamma_im"], rows)
    sidecar = args.sidecar or (str(Path(args.out).with_suffix(".json"))
                               if args.out not in (None, "-") and args.format == "csv" else None)
    if sidecar:
        norm = operator_norm(a, args.k, None, cfg)
        lim0, liminf = endpoint_limits(a, args.k, cfg)
        _write_json(sidecar, {
            "schema_version": 1, "symbol": a.spec, "k": args.k,
            "grid_sup_abs": curve.sup_abs,
            "norm_estimate": {"value": norm.value, "xi_argmax": norm.xi_argmax,
                              "bracket": list(norm.bracket)},
            "endpoint_limits": {"at_zero": _cplx(lim0), "at_infinity": _cplx(liminf)},
            **_meta(args)})
    return EXIT_OK


def cmd_classify(args) -> int:
    a = _symbol(args.symbol)
    verdict = classify_boundedness(a, _cfg(args))
    _write_json(args.out, {**verdict.to_dict(a), **_meta(args)})
    return EXIT_OK


def _parse_dims(text: str) -> tuple[int, int]:
    try:
        n, m = (int(p) for p in text.lower().split("x"))
    except ValueError as exc:
        raise UsageError(f"grid must look like 32x32, got {text!r}") from exc
    if n < 1 or m < 1:
        raise UsageError("grid dimensions must be positive")
    return n, m


def cmd_kernel(args) -> int:
    n, m = _parse_dims(args.grid)
    lo, hi = _range(args.range)
    xi, t = np.geomspace(lo, hi, n), np.geomspace(lo, hi, m)
    kg = KernelGrid.compute(args.k, xi, t)
    if args.format == "json":
        _write_json(args.out, {"schema_version": 1, "k": args.k, "xi": list(xi), "t": list(t),
                               "B": kg.values.tolist(), **_meta(args)})
    else:
        rows = ((x, y, kg.values[i, j]) for i, x in enumerate(xi) for j, y in enumerate(t))
        _write_rows(args.out, ["xi", "t", "B"], rows)
    return EXIT_OK


def _range(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(p) for p in text.split(":"))
    except ValueError as exc:
        raise UsageError(f"range must be lo:hi, got {text!r}") from exc
    if not 0 < lo < hi:
        raise UsageError("range needs 0 < lo < hi")
    return lo, hi


def cmd_qfun(args) -> int:
    lam = grid_spec(args.lambda_lin, geometric=False)
    cfg = _cfg(args)
    rep = None
    if args.sidecar:
        try:
            rep = q_sup_probe(args.k, lam, cfg)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        vals = rep.values
    else:
        vals = np.array([q_fn(args.k, x, cfg) for x in lam])
    if args.format == "json":
        _write_json(args.out, {"schema_version": 1, "k": args.k, "lambda": list(lam),
                               "q": [_cplx(v) for v in vals], **_meta(args)})
    else:
        _write_rows(args.out, ["lambda", "q_re", "q_im"],
                    ((x, v.real, v.imag) for x, v in zip(lam, vals)))
    if rep is not None:
        _write_json(args.sidecar, {"schema_version": 1, "k": args.k, "sup": rep.sup,
                                   "argmax": rep.argmax, "edge_flat": rep.edge_flat,
                                   "edge_variation": rep.edge_variation, **_meta(args)})
    return EXIT_OK


def _octaves(text: str) -> tuple[int, int]:
    try:
        lo, hi = (int(p) for p in text.split(":"))
    except ValueError as exc:
        raise UsageError(f"octaves must be lo:hi integers, got {text!r}") from exc
    if hi <= lo:
        raise UsageError("octaves need hi > lo")
    return lo, hi


def _transform_setup(args):
    f = _signal(args.signal, args.n_freq, args.omega_max)
    lo, hi = _octaves(args.octaves)
    try:
        grid = ScaleTimeGrid.dyadic(f, lo, hi, args.per_octave)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    return f, grid


def cmd_cwt(args) -> int:
    f, grid = _transform_setup(args)
    field = cwt(f, args.k, grid)
    stride = max(1, args.v_stride)
    vs = grid.v_grid[::stride]
    vals = field.values[:, ::stride]
    rows = ((u, v, vals[i, j].real, vals[i, j].imag)
            for i, u in enumerate(grid.u_grid) for j, v in enumerate(vs))
    _write_rows(args.out, ["u", "v", "re", "im"], rows)
    return EXIT_OK


def cmd_verify(args) -> int:
    a = _symbol(args.symbol)
    cfg = _cfg(args)
    if args.identity == "level-exchange":
        xi = _xi_grid(args, "0.01:100:50")
        rep = level_exchange_check(a, args.lam, args.k, xi, cfg, tolerance=args.tol or 1e-6)
    else:
        f, grid = _transform_setup(args)
        rep = quadratic_form_oracle(a, args.k, f, grid, cfg, tolerance=args.tol or 5e-3)
    _write_json(args.out, {**rep.to_dict(), **_meta(args)})
    return EXIT_OK if rep.passed else EXIT_NUMERIC


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _common(p: argparse.ArgumentParser):
    d = QuadratureConfig()
    g = p.add_argument_group("quadrature")
    g.add_argument("--rel-tol", type=float, default=d.rel_tol)
    g.add_argument("--abs-tol", type=float, default=d.abs_tol)
    g.add_argument("--max-subdivisions", type=int, default=d.max_subdivisions)
    g.add_argument("--truncation-eps", type=float, default=d.truncation_eps)
    g.add_argument("--panels-per-period", type=int, default=d.oscillatory_min_panels_per_period)
    p.add_argument("--out", default=None, help="output file (default: stdout)")
    p.add_argument("--no-meta", action="store_true", help="omit the metadata block from JSON")
    p.add_argument("--seedless", action="store_true",
                   help="accepted for scripts; every computation is deterministic")


def _xi_args(p):
    x = p.add_mutually_exclusive_group()
    x.add_argument("--xi-log", default=None, metavar="LO:HI:N", help="geometric xi grid")
    x.add_argument("--xi-lin", default=None, metavar="LO:HI:N", help="linear xi grid")


def _transform_args(p):
    p.add_argument("--signal", default="indicator:1,2",
                   help="indicator[:lo,hi] or hann[:lo,hi] Fourier profile")
    p.add_argument("--n-freq", type=int, default=2048)
    p.add_argument("--omega-max", type=float, default=8.0)
    p.add_argument("--octaves", default="-24:6", metavar="LO:HI",
                   help="scale range as powers of two")
    p.add_argument("--per-octave", type=int, default=8)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="polytoeplitz",
                                 description="Toeplitz operators on true-poly-analytic Bergman "
                                             "spaces via Laguerre-wavelet models.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gamma", help="spectral function curve")
    p.add_argument("--symbol", required=True)
    p.add_argument("--k", type=int, default=0)
    _xi_args(p)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--sidecar", default=None,
                   help="JSON with norm estimate and endpoint limits (default: OUT with .json)")
    _common(p)
    p.set_defaults(func=cmd_gamma)

    p = sub.add_parser("classify", help="boundedness verdict")
    p.add_argument("--symbol", required=True)
    _common(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("kernel", help="Legendre kernel B_k on a log grid")
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--grid", default="32x32", metavar="NxM")
    p.add_argument("--range", default="0.01:100", metavar="LO:HI")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    _common(p)
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("qfun", help="principal-value function q on a lambda grid")
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--lambda-lin", default="-50:50:201", metavar="LO:HI:N")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--sidecar", default=None,
                   help="JSON with the supremum probe (grid must span [-50, 50])")
    _common(p)
    p.set_defaults(func=cmd_qfun)

    p = sub.add_parser("cwt", help="wavelet field of a test signal")
    p.add_argument("--k", type=int, default=0)
    _transform_args(p)
    p.add_argument("--v-stride", type=int, default=1, help="write every n-th position")
    _common(p)
    p.set_defaults(func=cmd_cwt)

    p = sub.add_parser("verify", help="check an identity and write its report")
    p.add_argument("identity", choices=("level-exchange", "quadratic-form"))
    p.add_argument("--symbol", required=True)
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--lambda", dest="lam", type=float, default=0.5)
    p.add_argument("--tol", type=float, default=None)
    _xi_args(p)
    _transform_args(p)
    _common(p)
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad input and 0 for --help/--version
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (UsageError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NonConvergent, AliasingError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except BrokenPipeError:
        # reader went away (e.g. piped into head); silence the flush at exit
        sys.stdout = open(os.devnull, "w")
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
