"""Command line: ``wignertails {simulate,report,cb,laws}``.

Exit status is 0 when every criterion passes, 1 when any fails and 2 when
the command could not run.
"""
from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

import numpy as np

from ..limit_laws import Interval, frechet_cdf, order_stat_cdf, poisson_mean
from ..tail_laws import solve_bn
from .config import ExperimentConfig
from .records import read_records
from .report import emit_report

EXIT_PASS, EXIT_FAIL, EXIT_ERROR = 0, 1, 2

log = logging.getLogger("wignertails")


def _formats(config: ExperimentConfig) -> tuple:
    return ("json", "csv", "svg") if config.svg else ("json", "csv")


def _finish(report, out_dir) -> int:
    written = emit_report(report, out_dir, formats=_formats(ExperimentConfig.from_dict(report.config)))
    for line in report.summary_lines():
        print(line)
    print(f"b_n = {report.b_n:.10g}; records = {report.n_records} ({report.n_failed} failed); "
          f"report: {written['json'][0]}")
    return EXIT_PASS if report.passed else EXIT_FAIL


def cmd_simulate(args) -> int:
    from .runner import run_experiment

    config = ExperimentConfig.load(args.config, output_dir=args.out)
    if args.workers is not None:
        config.workers = args.workers
    report = run_experiment(config)
    return _finish(report, config.output_dir)


def cmd_report(args) -> int:
    from .analysis import build_report

    csv_path = Path(args.inp)
    config_path = csv_path.with_name("config.json")
    if not config_path.exists():
        raise FileNotFoundError(f"{config_path} not found next to {csv_path}")
    config = ExperimentConfig.load(config_path)
    records = read_records(csv_path)
    walls = [r.wall_time for r in records if math.isfinite(r.wall_time)]
    b_n = solve_bn(config.law, config.n)
    report = build_report(config, records, b_n=b_n, runtime=float(sum(walls)), cache_dir=csv_path.parent)
    return _finish(report, args.out)


def cmd_cb(args) -> int:
    from ..stable_cb import cb_iterate, save_solution
    from .analysis import DEFAULT_CRITERIA, cb_assessment, cb_criterion

    grid = np.linspace(-args.grid_span, args.grid_span, args.grid_points)
    sol = cb_iterate(args.alpha, grid, max_iters=args.max_iters, tol=args.tol, damping=args.damping)
    assess = cb_assessment(sol)
    crit = cb_criterion(assess, DEFAULT_CRITERIA["cb_density"])
    print(f"status: {sol.status} after {sol.iterations} iterations")
    for key, val in sol.residual.items():
        print(f"residual[{key}] = {val:.4g}")
    print(f"clamps: {sol.clamp_counts}")
    print(f"asymmetry: C {assess['asymmetry_C']:.4g}, f {assess['asymmetry_f']:.4g}")
    print(f"normalization with tails: {assess['normalization']:.6f}")
    if args.out:
        print(f"solution: {save_solution(sol, Path(args.out))}")
    print(("[PASS] " if crit["passed"] else "[FAIL] ") + crit["description"])
    return EXIT_PASS if crit["passed"] else EXIT_FAIL


def cmd_laws(args) -> int:
    a = args.alpha
    xs = args.x or [0.25, 0.5, 1.0, 2.0, 3.0, 5.0, 10.0]
    if args.table == "frechet":
        print("x\tF(x)")
        for x in xs:
            print(f"{x:g}\t{frechet_cdf(a, x):.10f}")
    elif args.table == "orderstat":
        print("x\t" + "\t".join(f"k={k}" for k in range(1, args.k + 1)))
        for x in xs:
            print(f"{x:g}\t" + "\t".join(f"{order_stat_cdf(a, k, x):.10f}" for k in range(1, args.k + 1)))
    else:
        edges = sorted(xs)
        print("interval\tmu")
        for lo, hi in zip(edges, edges[1:] + [math.inf]):
            print(f"({lo:g}, {hi:g})\t{poisson_mean(a, Interval(lo, hi)):.10f}")
    return EXIT_PASS


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wignertails", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="run an experiment from a JSON config")
    s.add_argument("--config", required=True)
    s.add_argument("--out", help="override output_dir")
    s.add_argument("--workers", type=int)
    s.set_defaults(func=cmd_simulate)

    r = sub.add_parser("report", help="rebuild a report from records.csv (config.json must sit beside it)")
    r.add_argument("--in", dest="inp", required=True)
    r.add_argument("--out", required=True)
    r.set_defaults(func=cmd_report)

    c = sub.add_parser("cb", help="solve the bulk-density fixed point")
    c.add_argument("--alpha", type=float, required=True)
    c.add_argument("--grid-span", type=float, default=10.0)
    c.add_argument("--grid-points", type=int, default=201)
    c.add_argument("--tol", type=float, default=1e-3)
    c.add_argument("--max-iters", type=int, default=200)
    c.add_argument("--damping", type=float, default=0.5)
    c.add_argument("--out", help="CSV path for the solution")
    c.set_defaults(func=cmd_cb)

    l = sub.add_parser("laws", help="print reference values of the limit laws")
    l.add_argument("--alpha", type=float, required=True)
    l.add_argument("--table", choices=("frechet", "orderstat", "poisson"), required=True)
    l.add_argument("--k", type=int, default=3, help="largest order for the orderstat table")
    l.add_argument("--x", type=float, nargs="+", help="evaluation points (interval edges for poisson)")
    l.set_defaults(func=cmd_laws)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except Exception as exc:  # reported as an execution error
        print(f"error: {exc}", file=sys.stderr)
        log.debug("traceback", exc_info=True)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
