"""Command line entry point: ``batchbandit run|grid|fit``."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from batchbandit.core.grid import build_grid, sequential_grid, solve_a_for_batches
from batchbandit.errors import BatchBanditError
from batchbandit.harness.config import load_config
from batchbandit.harness.fitting import fit_log2_curve
from batchbandit.harness.output import read_trace, write_outputs
from batchbandit.harness.runner import run_experiment

EXIT_OK, EXIT_TRIALS, EXIT_CONFIG = 0, 1, 2


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="batchbandit", description="Batched high-dimensional bandit experiments")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment from a config file")
    run.add_argument("--config", required=True)
    run.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE")
    run.add_argument("--jobs", type=int, default=1)
    run.add_argument("--out")

    grid = sub.add_parser("grid", help="print a batch grid")
    grid.add_argument("--T", type=int, required=True)
    grid.add_argument("--t1", type=int, required=True)
    g = grid.add_mutually_exclusive_group(required=True)
    g.add_argument("--a", type=float)
    g.add_argument("--L", type=int)

    fit = sub.add_parser("fit", help="fit cumulative regret against (ln t)^2")
    fit.add_argument("--trace", required=True)
    fit.add_argument("--t-start", type=int, default=100)
    return p


def _cmd_run(args) -> int:
    try:
        cfg = load_config(args.config, args.overrides)
    except BatchBanditError as exc:
        print(json.dumps({"error": "config", "message": str(exc)}), file=sys.stderr)
        return EXIT_CONFIG
    out_dir = args.out or cfg.out or "results"
    try:
        result = run_experiment(cfg, jobs=max(1, args.jobs))
    except (BatchBanditError, ValueError, OSError) as exc:
        print(json.dumps({"error": "config", "message": str(exc)}), file=sys.stderr)
        return EXIT_CONFIG
    paths = write_outputs(result, out_dir)
    if result.errors:
        report = {"failed_trials": len(result.errors), "errors": result.errors}
        print(json.dumps(report, indent=2), file=sys.stderr)
        return EXIT_TRIALS
    print(f"wrote {paths['trace']} and {paths['summary']}")
    return EXIT_OK


def _cmd_grid(args) -> int:
    try:
        if args.L is not None:
            if args.L == args.T - args.t1 + 1:
                grid = sequential_grid(args.T, args.t1)
            else:
                a = solve_a_for_batches(args.T, args.t1, args.L)
                grid = build_grid(args.T, args.t1, a)
        else:
            grid = build_grid(args.T, args.t1, args.a)
    except (BatchBanditError, ValueError) as exc:
        print(json.dumps({"error": "grid", "message": str(exc)}), file=sys.stderr)
        return EXIT_CONFIG
    print(json.dumps({"T": grid.T, "t1": grid.t1, "a": grid.a, "L": grid.L, "points": list(grid.points)}))
    return EXIT_OK


def _cmd_fit(args) -> int:
    try:
        traces = read_trace(args.trace)
        if not traces:
            raise ValueError("trace file has no rows")
        rows = []
        for trial, cum in sorted(traces.items()):
            rows.append({"trial": trial, **fit_log2_curve(cum, args.t_start).as_dict()})
    except (BatchBanditError, ValueError, OSError) as exc:
        print(json.dumps({"error": "fit", "message": str(exc)}), file=sys.stderr)
        return EXIT_CONFIG
    print(json.dumps(rows, indent=2))
    return EXIT_OK


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handler = {"run": _cmd_run, "grid": _cmd_grid, "fit": _cmd_fit}[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
