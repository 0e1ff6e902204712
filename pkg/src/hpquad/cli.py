"""Command line front end: run benchmark cases, emit reports and meshes."""

import argparse
import sys
from pathlib import Path

from .adaptive import AdaptiveConfig
from .benchmarks import PRESETS, emit_graph, emit_mesh, format_report, run_benchmarks
from .rules import get_tables


def build_parser():
    parser = argparse.ArgumentParser(
        prog="hpquad-bench",
        description="hp-adaptive quadrature benchmarks",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="integrate benchmark cases and report")
    run.add_argument(
        "--case",
        default="all",
        choices=sorted(PRESETS) + ["all"],
        help="benchmark case to run (default: all)",
    )
    run.add_argument("--tol", type=float, default=0.3e-15, help="target relative accuracy")
    run.add_argument("--tau", type=float, default=0.6, help="smoothness threshold")
    run.add_argument("--pmax", type=int, default=15, help="largest rule order")
    run.add_argument(
        "--pinit",
        type=int,
        default=None,
        help="starting rule order for every case (default: each case's own)",
    )
    run.add_argument("--emit-mesh", metavar="PATH", help="write the accepted mesh here")
    run.add_argument(
        "--format",
        default="csv",
        choices=["csv", "json"],
        help="mesh file format (default: csv)",
    )
    run.add_argument("--emit-graph", metavar="PATH", help="write sampled integrand values here")
    run.add_argument(
        "--samples", type=int, default=512, help="sample count for --emit-graph"
    )
    run.add_argument(
        "--compare-simpson",
        action="store_true",
        help="also run the adaptive Simpson baseline at the same tolerance",
    )
    run.add_argument("--json", action="store_true", help="machine-readable report on stdout")
    return parser


def _out_path(template, name, multi):
    # With several cases, tag each file by case name before the suffix.
    path = Path(template)
    if not multi:
        return path
    return path.with_name(f"{path.stem}_{name}{path.suffix}")


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command != "run":  # pragma: no cover - argparse enforces this
        return 2

    try:
        kw = {} if args.pinit is None else {"p_init": args.pinit}
        cfg = AdaptiveConfig(tol=args.tol, tau=args.tau, p_max=args.pmax, **kw)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    names = sorted(PRESETS) if args.case == "all" else [args.case]
    cases = [PRESETS[name] for name in names]
    tables = get_tables(cfg.p_max)
    report = run_benchmarks(
        cases,
        cfg,
        compare_simpson=args.compare_simpson,
        tables=tables,
        p_init=args.pinit,
    )
    sys.stdout.write(format_report(report, as_json=args.json))

    multi = len(cases) > 1
    if args.emit_mesh:
        for name in names:
            if name not in report.results:
                continue
            path = _out_path(args.emit_mesh, name, multi)
            path.write_text(emit_mesh(report.results[name], args.format))
    if args.emit_graph:
        for case in cases:
            path = _out_path(args.emit_graph, case.name, multi)
            path.write_text(emit_graph(case, args.samples))
    return 0 if report.ok else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
