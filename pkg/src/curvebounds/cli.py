"""Command-line front end.  JSON and CSV go to stdout, logs to stderr."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import constructions as cons
from .checks import run_checks
from .curves import PolyCurve, curve_from_json, dumps, sample
from .errors import DegenerateCurveError, DegenerateHullError, DomainError, InvalidArgumentError
from .horizon import horizon, horizon_by_counting, horizon_diagnostics, i_grid
from .hull import hull, to_off
from .integral import crofton_length_2d, spherical_crofton_length
from .metrics import verify_bounds

log = logging.getLogger("curvebounds")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
DEFAULT_SEED = 42


class UsageError(Exception):
    """Bad input detected after argument parsing; exits with status 2."""


def _load_curve(path: str, density: float):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    try:
        curve = curve_from_json(obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"{path}: not a curve: {exc}") from exc
    if isinstance(curve, PolyCurve):
        return curve
    log.info("sampling piecewise curve at %g points per unit length", density)
    return sample(curve, density)


def _emit_json(obj) -> None:
    json.dump(obj, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _emit_csv(header, rows) -> None:
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])


def cmd_metrics(args) -> int:
    curve = _load_curve(args.curve, args.density)
    if args.closed and not curve.closed:
        curve = PolyCurve(curve.points, closed=True)
    report = verify_bounds(curve, width_tol=args.tol, inradius_tol=max(args.tol, 1e-5))
    _emit_json(report.to_json())
    return EXIT_OK if report.consistent else EXIT_FAIL


def cmd_horizon(args) -> int:
    curve = _load_curve(args.curve, args.density)
    if args.mc:
        log.info("Monte-Carlo counting with seed %d", args.seed)
        est = horizon_by_counting(curve, args.mc, args.seed)
        out = est.to_json() | {"n_points": args.mc, "seed": args.seed}
    else:
        out = horizon(curve, args.tol).to_json()
    if args.diagnostics:
        rows = horizon_diagnostics(curve)
        with open(args.diagnostics, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(rows[0]))
            w.writeheader()
            w.writerows(rows)
        n_radial = sum(r["radial"] for r in rows)
        if n_radial:
            log.warning("%d radial edge(s): the horizon density is taken literally there", n_radial)
    _emit_json(out)
    return EXIT_OK


def cmd_construct(args) -> int:
    if args.name == "gamma-h":
        if args.h is None:
            raise UsageError("gamma-h needs --h")
        curve = cons.gamma_h(args.h)
    elif args.name == "l5":
        curve = cons.l5_curve()
    else:
        curve = cons.baseball_curve(args.scale)
    text = dumps(curve, indent=2)
    if args.output:
        Path(args.output).write_text(text + "\n")
        log.info("wrote %s", args.output)
    else:
        sys.stdout.write(text + "\n")
    return EXIT_OK


def cmd_sweep_h(args) -> int:
    if args.steps < 2 or not 0 < args.h_from < args.h_to:
        raise UsageError("sweep-h needs 0 < --from < --to and --steps >= 2")
    _emit_csv(["h", "L", "d", "w", "L_over_w"], cons.sweep_h(args.h_from, args.h_to, args.steps))
    return EXIT_OK


def cmd_solve_h0(args) -> int:
    h0 = cons.solve_h0(args.tol)
    length = cons.gamma_h_length(h0)
    width = cons.projected_width(h0)
    _emit_json({"h0": h0, "d_h0": cons.d_of_h(h0), "length": length, "width": width, "ratio": length / width})
    return EXIT_OK


def cmd_verify_paper(args) -> int:
    groups = set(args.only) if args.only else None
    rows = run_checks(groups)
    width = max(len(c.name) for c, _ in rows)
    print(f"{'status':6}  {'group':10}  {'check':{width}}  {'value':>18}  target")
    for c, _ in rows:
        status = "PASS" if c.passed else "FAIL"
        print(f"{status:6}  {c.group:10}  {c.name:{width}}  {c.value:18.10g}  {c.target}")
    n_fail = sum(not c.passed for c, _ in rows)
    print(f"{len(rows) - n_fail}/{len(rows)} checks passed")
    return EXIT_FAIL if n_fail else EXIT_OK


def cmd_crofton(args) -> int:
    curve = _load_curve(args.curve, args.density)
    if args.mode == "planar":
        value = crofton_length_2d(curve, args.n or 10_000)
        _emit_json({"mode": "planar", "length": value, "n_dirs": args.n or 10_000})
    else:
        log.info("spherical Crofton with seed %d", args.seed)
        est = spherical_crofton_length(curve, args.rho, args.n or 100_000, args.seed)
        _emit_json({"mode": "spherical", "rho": args.rho, "length": est.value,
                    "abs_error": est.abs_error, "n_circles": est.n, "seed": est.seed})
    return EXIT_OK


def cmd_bound_table(args) -> int:
    rows = cons.bound_table(args.kmax)
    _emit_csv(["k", "open_w", "open_r", "closed_w", "closed_r"],
              [(r.k, r.open_w, r.open_r, r.closed_w, r.closed_r) for r in rows])
    return EXIT_OK


def cmd_i_grid(args) -> int:
    X, Y, Z = i_grid(args.nx, args.ny)
    _emit_csv(["x", "y", "I"], zip(X.ravel(), Y.ravel(), Z.ravel()))
    return EXIT_OK


def cmd_hull(args) -> int:
    sys.stdout.write(to_off(hull(_load_curve(args.curve, args.density))))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="curvebounds", description="Length, width, inradius and horizon of space curves.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def curve_cmd(name, help_text):
        s = sub.add_parser(name, help=help_text)
        s.add_argument("curve", help="curve JSON file")
        s.add_argument("--density", type=float, default=200.0,
                       help="sampling density (points per unit length) for piecewise curves")
        return s

    s = curve_cmd("metrics", "length, width, inradius and bound checks")
    s.add_argument("--tol", type=float, default=1e-6)
    s.add_argument("--closed", action="store_true", help="treat the polyline as closed")
    s.set_defaults(func=cmd_metrics)

    s = curve_cmd("horizon", "horizon functional")
    s.add_argument("--tol", type=float, default=1e-8)
    s.add_argument("--mc", type=int, default=0, help="Monte-Carlo sample count (counting estimate)")
    s.add_argument("--seed", type=int, default=DEFAULT_SEED)
    s.add_argument("--diagnostics", help="write per-edge CSV diagnostics to this file")
    s.set_defaults(func=cmd_horizon)

    s = sub.add_parser("construct", help="emit a named curve as JSON")
    s.add_argument("name", choices=["gamma-h", "l5", "baseball"])
    s.add_argument("--h", type=float, help="cylinder height for gamma-h")
    s.add_argument("--scale", type=float, default=1.0, help="scale for baseball")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_construct)

    s = sub.add_parser("sweep-h", help="CSV of (h, L, d, w, L/w) for the cylinder family")
    s.add_argument("--from", dest="h_from", type=float, required=True)
    s.add_argument("--to", dest="h_to", type=float, required=True)
    s.add_argument("--steps", type=int, required=True)
    s.set_defaults(func=cmd_sweep_h)

    s = sub.add_parser("solve-h0", help="solve d(h) = h")
    s.add_argument("--tol", type=float, default=1e-12)
    s.set_defaults(func=cmd_solve_h0)

    s = sub.add_parser("verify-paper", help="recompute every published constant, PASS/FAIL table")
    s.add_argument("--only", nargs="*", help="restrict to these check groups")
    s.set_defaults(func=cmd_verify_paper)

    s = curve_cmd("crofton", "Crofton length estimates")
    s.add_argument("--mode", choices=["planar", "spherical"], required=True)
    s.add_argument("--rho", type=float, default=math.pi / 2)
    s.add_argument("--n", type=int, default=0, help="directions (planar) or circles (spherical)")
    s.add_argument("--seed", type=int, default=DEFAULT_SEED)
    s.set_defaults(func=cmd_crofton)

    s = sub.add_parser("bound-table", help="CSV of the higher-dimensional bounds")
    s.add_argument("--kmax", type=int, required=True)
    s.set_defaults(func=cmd_bound_table)

    s = sub.add_parser("i-grid", help="CSV of I(x, y) over x in [1, 3], y in [1/x, 1]")
    s.add_argument("--nx", type=int, default=400)
    s.add_argument("--ny", type=int, default=400)
    s.set_defaults(func=cmd_i_grid)

    s = curve_cmd("hull", "convex hull as OFF")
    s.set_defaults(func=cmd_hull)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InvalidArgumentError, DomainError, DegenerateCurveError, DegenerateHullError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
