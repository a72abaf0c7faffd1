"""Command-line interface: ``grusin <command> ...``.

Points are written as comma-separated reals whose last entry is the fiber
coordinate ``u``, e.g. ``1,0`` for ``(x, u) = (1, 0)`` in dimension one.

Exit codes: 0 success, 1 failed verification, 2 usage error, 3 numerical
nonconvergence.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys

import numpy as np

from . import bounds, geodesics, heat_kernel
from . import scalar_functions as sf
from .heat_kernel import KernelConfig, QuadratureError
from .verify import SUITES, run_suite

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_NONCONVERGED = 0, 1, 2, 3


class UsageError(Exception):
    """Bad command-line input, reported with exit code 2."""


def _floats(text: str, field: str) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"{field}: expected comma-separated numbers, got {text!r}") from None
    if not all(math.isfinite(v) for v in vals):
        raise UsageError(f"{field}: values must be finite")
    return vals


def _point(text: str, field: str, n: int | None) -> geodesics.Point:
    vals = _floats(text, field)
    if len(vals) < 2:
        raise UsageError(f"{field}: a point needs at least one x coordinate and u")
    if n is not None and len(vals) != n + 1:
        raise UsageError(f"{field}: expected {n + 1} coordinates for n={n}, got {len(vals)}")
    return geodesics.Point.from_coords(vals)


def _vector(text: str, field: str, n: int) -> np.ndarray:
    vals = _floats(text, field)
    if len(vals) != n:
        raise UsageError(f"{field}: expected {n} coordinates for n={n}, got {len(vals)}")
    return np.array(vals)


def _fmt(v) -> str:
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, (str, int, np.integer)):
        return str(v)
    return "%.17g" % v


def _emit(args, obj, rows=None, header=None):
    """Print ``obj`` as JSON, or ``rows`` as CSV when ``--format csv``."""
    if args.format == "csv" and rows is not None:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) for v in r])
    else:
        json.dump(obj, sys.stdout, indent=2)
        sys.stdout.write("\n")


def cmd_distance(args) -> int:
    p1 = _point(args.p1, "--p1", args.n)
    p2 = _point(args.p2, "--p2", args.n)
    if p1.n != p2.n:
        raise UsageError("--p2: dimension differs from --p1")
    res = geodesics.cc_distance(p1, p2)
    obj = res.to_dict()
    g = res.geodesic
    row = [res.d, res.b0, res.case, g.b] + g.c.tolist()
    header = ["d", "b0", "case", "b"] + [f"c{i + 1}" for i in range(g.c.size)]
    _emit(args, obj, [row], header)
    return EXIT_OK


def cmd_geodesics(args) -> int:
    p1 = _point(args.p1, "--p1", args.n)
    p2 = _point(args.p2, "--p2", args.n)
    if p1.n != p2.n:
        raise UsageError("--p2: dimension differs from --p1")
    if not args.b_max > 0:
        raise UsageError("--b-max: must be positive")
    if args.samples is not None and args.samples < 2:
        raise UsageError("--samples: need at least 2 points per geodesic")
    found = geodesics.enumerate_geodesics(p1, p2, args.b_max)
    found.sort(key=lambda item: item[1])
    n = p1.n
    entries, rows = [], []
    for idx, (spec, length) in enumerate(found):
        entry = {
            "index": idx, "b": spec.b, "c": spec.c.tolist(), "c_norm": float(np.linalg.norm(spec.c)),
            "length": length, "degenerate": spec.degenerate,
        }
        base = [idx, spec.b, entry["c_norm"], length, spec.degenerate]
        if args.samples:
            t = np.linspace(0.0, 1.0, args.samples)
            xs, us = geodesics.sample_geodesic(spec, t)
            entry["samples"] = [{"t": float(ti), "x": xi.tolist(), "u": float(ui)} for ti, xi, ui in zip(t, xs, us)]
            rows.extend(base + [ti] + xi.tolist() + [ui] for ti, xi, ui in zip(t, xs, us))
        else:
            rows.append(base)
        entries.append(entry)
    header = ["index", "b", "c_norm", "length", "degenerate"]
    if args.samples:
        header += ["t"] + [f"x{i + 1}" for i in range(n)] + ["u"]
    _emit(args, {"p1": p1.coords.tolist(), "p2": p2.coords.tolist(), "geodesics": entries}, rows, header)
    return EXIT_OK


def _shift(text: str):
    if text in ("auto", "none"):
        return text
    try:
        b = float(text)
    except ValueError:
        raise UsageError(f"--shift: expected auto, none or a number, got {text!r}") from None
    if not abs(b) < math.pi:
        raise UsageError("--shift: a fixed shift must satisfy |b| < pi")
    return b


def cmd_kernel(args) -> int:
    n = args.n
    x = _vector(args.x, "--x", n)
    xi = _vector(args.xi, "--xi", n)
    if not args.t > 0:
        raise UsageError("--t: must be positive")
    if args.slice_lambda is not None:
        val = heat_kernel.mehler_kernel(args.t, args.slice_lambda, x, xi, n)
        obj = {"value": val, "abs_err_est": 0.0, "shift_used": 0.0, "slice_lambda": args.slice_lambda}
        _emit(args, obj, [[val, 0.0, 0.0]], ["value", "abs_err_est", "shift_used"])
        return EXIT_OK
    if not 0 < args.rel_tol < 1:
        raise UsageError("--rel-tol: must lie in (0, 1)")
    cfg = KernelConfig(n, rel_tol=args.rel_tol, shift_policy=_shift(args.shift))
    try:
        kv = heat_kernel.heat_kernel(args.t, x, xi, args.u, cfg)
    except QuadratureError as exc:
        scale = (4 * math.pi * args.t) ** (-0.5 * n - 1)
        obj = {"value": scale * exc.partial.real, "abs_err_est": scale * exc.abs_err,
               "shift_used": None, "error": str(exc)}
        _emit(args, obj)
        print(f"grusin kernel: error: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGED
    _emit(args, kv.to_dict(), [[kv.value, kv.abs_err_est, kv.shift_used]], ["value", "abs_err_est", "shift_used"])
    return EXIT_OK


def cmd_bound_check(args) -> int:
    reference = args.reference
    if reference is None and args.n in bounds.SEED_SUP_RATIO:
        reference = 1.01 * bounds.SEED_SUP_RATIO[args.n]
    grid = bounds.seed_grid(args.n, small=(args.grid == "small"))
    if args.scale != 1.0:
        if not args.scale > 0:
            raise UsageError("--scale: must be positive")
        grid = grid.rescaled(args.scale)
    rep = bounds.verify_bound_grid(grid, KernelConfig(args.n, rel_tol=args.rel_tol), reference_ratio=reference)
    _emit(args, rep.to_dict())
    return EXIT_OK


_TABULATE = {
    "mu": lambda b, a: sf.mu(b, a),
    "mu_prime": lambda b, a: sf.mu_prime(b, a),
    "mu_tilde": lambda b, a: sf.mu_tilde(b),
    "mu_hat": lambda b, a: sf.mu_hat(b),
    "delta": lambda b, a: sf.delta(b),
    "ell": lambda b, a: sf.ell(b, a),
    "psi_ib": lambda b, a: sf.psi_ib(b, a),
}


def cmd_tabulate(args) -> int:
    if args.num < 1:
        raise UsageError("--num: must be at least 1")
    if not -1 <= args.a <= 1:
        raise UsageError("--a: must lie in [-1, 1]")
    f = _TABULATE[args.function]
    rows = []
    for b in np.linspace(args.b_min, args.b_max, args.num):
        try:
            v = float(f(b, args.a))
        except sf.DomainError:
            v = math.nan
        rows.append([float(b), v])
    obj = {"function": args.function, "a": args.a,
           "rows": [{"b": b, "value": None if math.isnan(v) else v} for b, v in rows]}
    _emit(args, obj, rows, ["b", args.function])
    return EXIT_OK


def cmd_verify(args) -> int:
    report = run_suite(args.suite, seed=args.seed, grid=args.grid)
    json.dump(report, sys.stdout, indent=2)
    sys.stdout.write("\n")
    if not report["passed"]:
        for c in report["checks"]:
            if not c["passed"]:
                print(f"FAILED {c['name']}: {c['value']!r} > {c['tolerance']!r}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="grusin", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, csv_ok=True):
        p.add_argument("--format", choices=["json", "csv"] if csv_ok else ["json"], default="json")

    p = sub.add_parser("distance", help="Carnot–Carathéodory distance between two points")
    p.add_argument("--p1", required=True)
    p.add_argument("--p2", required=True)
    p.add_argument("--n", type=int, default=None, help="dimension of x (checked against the points)")
    common(p)
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("geodesics", help="all geodesics between two points up to a frequency bound")
    p.add_argument("--p1", required=True)
    p.add_argument("--p2", required=True)
    p.add_argument("--b-max", type=float, required=True)
    p.add_argument("--samples", type=int, default=None, help="points per geodesic to emit for plotting")
    p.add_argument("--n", type=int, default=None)
    common(p)
    p.set_defaults(func=cmd_geodesics)

    p = sub.add_parser("kernel", help="heat kernel K_t(x, xi, u) or a Mehler slice")
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--xi", required=True)
    p.add_argument("--u", type=float, default=0.0)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--slice-lambda", type=float, default=None, help="evaluate k_t^lambda instead of K_t")
    p.add_argument("--shift", default="auto", help="auto, none, or a fixed imaginary shift")
    p.add_argument("--rel-tol", type=float, default=1e-8)
    common(p)
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("bound-check", help="sweep |K_t| / Gaussian bound over the seed grid")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--grid", choices=["seed", "small"], default="seed")
    p.add_argument("--scale", type=float, default=1.0, help="parabolic rescaling applied to the grid")
    p.add_argument("--reference", type=float, default=None, help="constant for the decay-shape check")
    p.add_argument("--rel-tol", type=float, default=1e-8)
    common(p, csv_ok=False)
    p.set_defaults(func=cmd_bound_check)

    p = sub.add_parser("tabulate", help="tabulate a scalar function on a uniform grid in b")
    p.add_argument("--function", choices=sorted(_TABULATE), required=True)
    p.add_argument("--a", type=float, default=0.0)
    p.add_argument("--b-min", type=float, default=0.0)
    p.add_argument("--b-max", type=float, default=3.0)
    p.add_argument("--num", type=int, default=31)
    common(p)
    p.set_defaults(func=cmd_tabulate)

    p = sub.add_parser("verify", help="run a self-check suite")
    p.add_argument("suite", choices=list(SUITES) + ["all"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--grid", choices=["seed", "small"], default="small")
    p.set_defaults(func=cmd_verify)
    return parser


# options whose values may start with a minus sign, e.g. ``--p2 -1,5``
_VALUE_OPTIONS = {"--p1", "--p2", "--x", "--xi", "--u", "--a", "--b-min", "--b-max",
                  "--shift", "--slice-lambda", "--t", "--scale"}


def _glue_values(argv: list[str]) -> list[str]:
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_OPTIONS and i + 1 < len(argv):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_glue_values(argv))
    if getattr(args, "n", None) is not None and args.n < 1:
        parser.error("--n: must be at least 1")
    try:
        return args.func(args)
    except (UsageError, ValueError) as exc:
        print(f"grusin {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
