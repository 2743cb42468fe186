"""Command line front end: run verification suites, write JSON/CSV reports.

Exit codes: 0 all cases pass, 1 at least one case failed, 2 usage error,
3 I/O error.  Two runs with identical flags and seed produce identical JSON
except for the wall-time fields.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .reporting import report_payload, write_json
from .suites import run_conformal, run_disc, run_indexsets, run_symbols

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_IO = 3


def _add_common(parser):
    parser.add_argument("--seed", type=int, default=7, help="seed for sampled cases")
    parser.add_argument("--tol", type=float, default=None,
                        help="override the per-suite default tolerance")
    parser.add_argument("--out", default=None, help="write the JSON report here")
    parser.add_argument("--csv-dir", default=None,
                        help="directory for kernel-grid CSV exports (disc suite)")
    parser.add_argument("--suite-filter", default=None,
                        help="only run cases whose id contains this substring")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="diracproj",
        description="Verification suites for the boundary-projector laboratory.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("disc", help="unit-disc projector and kernel oracles")
    p.add_argument("--modes", type=int, default=64, help="truncation band")
    _add_common(p)

    p = subs.add_parser("symbols", help="principal-symbol calculus checks")
    _add_common(p)

    p = subs.add_parser("indexsets", help="index-set composition golden values")
    p.add_argument("--n", type=int, default=2, help="boundary dimension")
    _add_common(p)

    p = subs.add_parser("conformal", help="torus conformal-operator checks")
    p.add_argument("--grid", type=int, default=32, help="grid resolution (power of two)")
    p.add_argument("--band", type=int, default=2, help="conformal factor band")
    p.add_argument("--amplitude", type=float, default=0.2, help="conformal factor size")
    _add_common(p)

    p = subs.add_parser("all", help="run every suite")
    p.add_argument("--modes", type=int, default=64)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--grid", type=int, default=32)
    p.add_argument("--band", type=int, default=2)
    p.add_argument("--amplitude", type=float, default=0.2)
    _add_common(p)
    return parser


def _run(args):
    reports = []
    common = {"seed": args.seed, "suite_filter": args.suite_filter}
    if args.command in ("disc", "all"):
        kwargs = dict(modes=args.modes, seed=args.seed,
                      suite_filter=args.suite_filter, csv_dir=args.csv_dir)
        if args.tol is not None:
            kwargs["tol"] = args.tol
        reports.append(run_disc(**kwargs))
    if args.command in ("symbols", "all"):
        kwargs = dict(seed=args.seed, suite_filter=args.suite_filter)
        if args.tol is not None:
            kwargs["tol_closed"] = args.tol
        reports.append(run_symbols(**kwargs))
    if args.command in ("indexsets", "all"):
        reports.append(run_indexsets(n=args.n, suite_filter=args.suite_filter))
    if args.command in ("conformal", "all"):
        kwargs = dict(grid_m=args.grid, band=args.band, amplitude=args.amplitude,
                      seed=args.seed, suite_filter=args.suite_filter,
                      csv_dir=args.csv_dir)
        if args.tol is not None:
            kwargs["tol_cov"] = args.tol
        reports.append(run_conformal(**kwargs))
    return reports


def _validate(args):
    if getattr(args, "modes", 1) < 1:
        raise ValueError("--modes must be >= 1")
    if getattr(args, "n", 1) < 1:
        raise ValueError("--n must be >= 1")
    grid = getattr(args, "grid", 32)
    if grid < 4 or grid & (grid - 1):
        raise ValueError("--grid must be a power of two >= 4")
    if getattr(args, "band", 1) > grid // 8:
        raise ValueError("--band exceeds the grid de-aliasing headroom (grid/8)")
    if getattr(args, "amplitude", 0.0) < 0:
        raise ValueError("--amplitude must be >= 0")
    if args.tol is not None and args.tol <= 0:
        raise ValueError("--tol must be positive")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse uses 2 for usage errors already
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    try:
        _validate(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    reports = _run(args)
    meta = {
        "command": args.command,
        "seed": args.seed,
        "version": __version__,
        # output destinations are not part of the report content
        "flags": {k: v for k, v in sorted(vars(args).items())
                  if k not in ("command", "out", "csv_dir")},
    }
    payload = report_payload(reports, meta)

    for report in reports:
        for row in report.rows:
            status = "pass" if row.passed else "FAIL"
            print(f"[{status}] {row.case_id}: error {row.error:.3e} "
                  f"(tol {row.tolerance:.3e}) [{row.provenance}]")
        print(f"suite {report.suite}: {report.n_pass}/{len(report.rows)} passed")

    if args.out:
        try:
            write_json(payload, args.out)
        except OSError as exc:
            print(f"error: cannot write report: {exc}", file=sys.stderr)
            return EXIT_IO
    return EXIT_PASS if payload["pass"] else EXIT_FAIL


if __name__ == "__main__":
    raise SystemExit(main())
