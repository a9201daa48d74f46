"""Command-line interface.

Data series are written as CSV, scalar reports as JSON.  Every JSON document
carries a ``manifest`` object (subcommand, flags, seed, precision, version,
wall time); CSV outputs written with ``--out`` get the manifest in a sidecar
``<out>.json``.

Exit codes: 0 success, 1 usage or validation error, 2 numerical or
precision failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from fractions import Fraction
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path

import mpmath

from .asymptotics import alpha0_of, c0_of, moment_asymptotic, saddle_constants
from .errors import ConvergenceError, DomainError, NumericalError, OverflowGuardError, PrecisionError
from .momproblem import build_scaled_sequence, check_completely_monotone
from .moments import as_sigma_sq, log_moments_upto, mgf_log_y, moment_y, semicircle_cdf
from .radius import radius_curve
from .rmt import EIG_SCHEMES, SimConfig, empirical_log_moment, empirical_moments, free_product_clt, histogram
from .series import verify_closed_form_identities
from .specfun import DEFAULT_BITS, MONOTONE_BITS, PrecisionContext, to_mpf

ENV_BITS = "FREECLT_BITS"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _version() -> str:
    try:
        return version("freeclt")
    except PackageNotFoundError:
        return "unknown"


def _sigma_sq(text: str):
    try:
        val = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None
    if val <= 0:
        raise argparse.ArgumentTypeError("sigma2 must be positive")
    return val


def _positive_int(text: str) -> int:
    try:
        val = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if val < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return val


def _default_bits() -> int | None:
    raw = os.environ.get(ENV_BITS)
    if raw is None:
        return None
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{ENV_BITS} must be an integer, got {raw!r}") from None


def _global_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--sigma2", type=_sigma_sq, default=Fraction(1), help="variance of log X_i (rational, default 1)")
    p.add_argument("--bits", type=int, default=None, help=f"working precision in bits (default {DEFAULT_BITS}, or ${ENV_BITS})")
    p.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    p.add_argument("--out", type=Path, default=None, help="output file (default stdout)")
    p.add_argument("--digits", type=int, default=20, help="significant digits in CSV output")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _global_flags()
    parser = _Parser(prog="freeclt", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {_version()}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("moments", parents=[common], help="moments E[Y^k] as CSV k,value")
    p.add_argument("--kmax", type=_positive_int, required=True)

    p = sub.add_parser("log-moments", parents=[common], help="even log-moments E[(log Y)^(2k)] as CSV k,value")
    p.add_argument("--kmax", type=_positive_int, required=True)
    p.add_argument("--exact", action="store_true", help="print exact rationals")

    p = sub.add_parser("mgf", parents=[common], help="E[Y^s] on a grid of s as CSV s,value")
    p.add_argument("--smin", type=float, default=-5.0)
    p.add_argument("--smax", type=float, default=5.0)
    p.add_argument("--points", type=_positive_int, default=11)

    sub.add_parser("c0", parents=[common], help="support radius c0 and prefactor alpha0 as JSON")

    p = sub.add_parser("asym", parents=[common], help="exact vs asymptotic moments as CSV")
    p.add_argument("--kmax", type=_positive_int, default=100)
    p.add_argument("--kmin", type=_positive_int, default=1)

    p = sub.add_parser("radius", parents=[common], help="implied radii as CSV k,r_k")
    p.add_argument("--kind", choices=("y", "log"), required=True)
    p.add_argument("--kmax", type=_positive_int, default=100)
    p.add_argument("--catalan-as-printed", action="store_true",
                   help="use C_{2k} instead of C_k in the log-kind radius")

    p = sub.add_parser("monotone", parents=[common], help="complete-monotonicity report as JSON")
    p.add_argument("--K", type=_positive_int, default=200)
    p.add_argument("--J", type=int, default=64)

    p = sub.add_parser("simulate", parents=[common], help="random-matrix histogram of log-eigenvalues")
    p.add_argument("--dim", type=_positive_int, default=128)
    p.add_argument("--factors", type=_positive_int, default=64)
    p.add_argument("--trials", type=_positive_int, default=20)
    p.add_argument("--bins", type=_positive_int, default=None, help="histogram bins (default: Freedman-Diaconis)")
    p.add_argument("--range-mult", type=float, default=1.25)
    p.add_argument("--eig-scheme", choices=EIG_SCHEMES, default="iid_normal")
    p.add_argument("--normalize", action="store_true", help="divide the x-axis by c0")
    p.add_argument("--workers", type=_positive_int, default=1)
    p.add_argument("--sidecar", type=Path, default=None, help="JSON sidecar path (default <out>.json)")

    sub.add_parser("series-verify", parents=[common], help="check the closed-form g/h polynomial identities")

    p = sub.add_parser("density", parents=[common], help="bin-averaged semicircle(c0) reference density as CSV")
    p.add_argument("--bins", type=_positive_int, default=101)
    p.add_argument("--range-mult", type=float, default=1.25)
    p.add_argument("--normalize", action="store_true", help="divide the x-axis by c0")
    return parser


def _manifest(args, bits, wall) -> dict:
    flags = {}
    for key, val in sorted(vars(args).items()):
        if isinstance(val, Fraction):
            val = str(val)
        elif isinstance(val, Path):
            val = str(val)
        flags[key] = val
    return {
        "subcommand": args.command,
        "flags": flags,
        "seed": args.seed,
        "bits": bits,
        "version": _version(),
        "wall_time": round(wall, 3),
    }


def _fmt(x, digits, pc=None):
    if isinstance(x, Fraction):
        x = to_mpf(x, pc or PrecisionContext(max(64, 4 * digits)))
    return mpmath.nstr(x, digits)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def _emit(text: str, out: Path | None):
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def _sidecar_path(out: Path) -> Path:
    return out.with_name(out.name + ".json")


# subcommand handlers return (kind, payload, extra_json)
def _cmd_moments(args, pc):
    s2 = as_sigma_sq(args.sigma2)
    rows = [(k, _fmt(moment_y(k, s2, pc), args.digits)) for k in range(1, args.kmax + 1)]
    return "csv", (("k", "value"), rows), None


def _cmd_log_moments(args, pc):
    vals = log_moments_upto(args.kmax, as_sigma_sq(args.sigma2))
    fmt = (lambda v: str(v)) if args.exact else (lambda v: _fmt(v, args.digits, pc))
    rows = [(k, fmt(v)) for k, v in enumerate(vals, start=1)]
    return "csv", (("k", "value"), rows), None


def _cmd_mgf(args, pc):
    if args.points == 1:
        grid = [args.smin]
    else:
        step = (args.smax - args.smin) / (args.points - 1)
        grid = [args.smin + i * step for i in range(args.points)]
    rows = [(repr(s), _fmt(mgf_log_y(s, args.sigma2, pc), args.digits)) for s in grid]
    return "csv", (("s", "value"), rows), None


def _cmd_c0(args, pc):
    sad = saddle_constants(math.inf, pc, sigma_sq=args.sigma2)
    return "json", {
        "sigma2": str(args.sigma2),
        "c0": float(c0_of(args.sigma2, pc)),
        "alpha0": float(alpha0_of(args.sigma2, pc)),
        "saddle_kappa": float(sad.kappa),
        "saddle_c0": float(sad.c0),
    }, None


def _cmd_asym(args, pc):
    if args.kmin > args.kmax:
        raise DomainError("kmin must not exceed kmax")
    rows = []
    for k in range(args.kmin, args.kmax + 1):
        exact = moment_y(k, args.sigma2, pc)
        approx = moment_asymptotic(k, args.sigma2, pc)
        rows.append((k, _fmt(exact, args.digits), _fmt(approx, args.digits), _fmt(exact / approx - 1, 6)))
    return "csv", (("k", "value", "asymptotic", "rel_error"), rows), None


def _cmd_radius(args, pc):
    curve = radius_curve(args.kind, args.kmax, args.sigma2, pc, catalan_double_index=args.catalan_as_printed)
    rows = [(k, _fmt(r, args.digits)) for k, r in curve.points]
    extra = {"kind": args.kind, "monotone_decreasing": curve.monotone_decreasing,
             "span": float(curve.span)}
    return "csv", (("k", "r_k"), rows), extra


def _cmd_monotone(args, pc):
    seq = build_scaled_sequence(args.K, args.sigma2, pc)
    report = check_completely_monotone(seq, args.J)
    return "json", report.to_dict(), None


def _cmd_simulate(args, pc):
    config = SimConfig(
        dim=args.dim, n_factors=args.factors, trials=args.trials, sigma_sq=float(args.sigma2),
        seed=args.seed, eig_scheme=args.eig_scheme, bins=args.bins, range_mult=args.range_mult,
    )
    sample = free_product_clt(config, workers=args.workers)
    hist = histogram(sample, config, normalize=args.normalize)
    moments = []
    for est in empirical_moments(sample, [1, 2]):
        moments.append({"k": est.k, "y_moment": est.y_moment, "y_stderr": est.y_stderr,
                        "log_moment": est.log_moment, "log_stderr": est.log_stderr})
    odd = {}
    for p in (1, 3):
        m, se = empirical_log_moment(sample, p)
        odd[f"log_moment_{p}"] = {"value": m, "stderr": se}
    extra = {
        "config": config.to_dict(),
        "bins": config.n_bins,
        "c0": config.c0,
        "max_abs_log_eig": sample.max_abs,
        "max_abs_over_c0": sample.max_abs / config.c0,
        "empirical_moments": moments,
        "odd_log_moments": odd,
        "outside_range": hist.n_outside,
    }
    rows = [(repr(a), repr(b), repr(d)) for a, b, d in hist.rows()]
    return "csv", (("bin_left", "bin_right", "density"), rows), extra


def _cmd_series_verify(args, pc):
    result = verify_closed_form_identities()
    return "json", {name: "pass" if ok else "fail" for name, ok in result.items()}, None


def _cmd_density(args, pc):
    if args.bins < 3 or args.range_mult < 1:
        raise DomainError("need bins >= 3 and range-mult >= 1")
    c0 = float(c0_of(args.sigma2, pc))
    half = args.range_mult * c0
    edges = [-half + 2 * half * i / args.bins for i in range(args.bins + 1)]
    cdf = semicircle_cdf(edges, c0)
    rows = []
    for i in range(args.bins):
        a, b = edges[i], edges[i + 1]
        dens = (cdf[i + 1] - cdf[i]) / (b - a)
        if args.normalize:
            a, b, dens = a / c0, b / c0, dens * c0
        rows.append((repr(a), repr(b), repr(float(dens))))
    return "csv", (("bin_left", "bin_right", "density"), rows), {"c0": c0}


HANDLERS = {
    "moments": _cmd_moments,
    "log-moments": _cmd_log_moments,
    "mgf": _cmd_mgf,
    "c0": _cmd_c0,
    "asym": _cmd_asym,
    "radius": _cmd_radius,
    "monotone": _cmd_monotone,
    "simulate": _cmd_simulate,
    "series-verify": _cmd_series_verify,
    "density": _cmd_density,
}


def _resolve_bits(args) -> int:
    if args.bits is not None:
        return args.bits
    env = _default_bits()
    if env is not None:
        return env
    return MONOTONE_BITS if args.command == "monotone" else DEFAULT_BITS


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        bits = _resolve_bits(args)
        pc = PrecisionContext(bits)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except DomainError as exc:
        print(f"freeclt: error: {exc}", file=sys.stderr)
        return 1

    t0 = time.perf_counter()
    try:
        kind, payload, extra = HANDLERS[args.command](args, pc)
        status = 0
        if args.command == "series-verify" and any(v != "pass" for v in payload.values()):
            status = 2
    except (DomainError, ValueError) as exc:
        print(f"freeclt: error: {exc}", file=sys.stderr)
        return 1
    except (PrecisionError, ConvergenceError, NumericalError, OverflowGuardError, ArithmeticError) as exc:
        print(f"freeclt: numerical failure: {exc}", file=sys.stderr)
        return 2
    manifest = _manifest(args, bits, time.perf_counter() - t0)

    if kind == "json":
        doc = dict(payload)
        if extra:
            doc.update(extra)
        doc["manifest"] = manifest
        _emit(_json_text(doc), args.out)
        return status

    header, rows = payload
    _emit(_csv_text(header, rows), args.out)
    side = {**(extra or {}), "manifest": manifest}
    side_path = getattr(args, "sidecar", None) or (_sidecar_path(args.out) if args.out else None)
    if side_path is not None:
        side_path.write_text(_json_text(side))
    elif args.command == "simulate":
        sys.stderr.write(_json_text(side))
    return status


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
