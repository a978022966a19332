"""Command line entry point.

    ddreach run <config> [--seed S] [--samples N] [--reduce-order R] [--output DIR] [--timing]
    ddreach plot <run-dir> [--pairs 1,2 3,4]
    ddreach list

Exit status: 0 on success, 1 for an invalid config, 2 when a method fails.
"""

from __future__ import annotations

import argparse
import logging
import sys

from ddreach import config as cfgmod
from ddreach.errors import ConfigError


def _pair(text: str) -> tuple[int, int]:
    try:
        i, j = (int(t) - 1 for t in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected i,j (1-based), got {text!r}") from exc
    if i < 0 or j < 0 or i == j:
        raise argparse.ArgumentTypeError(f"invalid projection pair {text!r}")
    return i, j


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ddreach", description="Data-driven reachability experiments.")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run an experiment config (path or bundled name)")
    r.add_argument("config")
    r.add_argument("--seed", type=int, help="override the data seed (also seeds Monte Carlo)")
    r.add_argument("--samples", type=int, help="Monte Carlo samples per step (0 skips the check)")
    r.add_argument("--reduce-order", type=int, help="zonotope order limit (0 disables reduction)")
    r.add_argument("--output", help="output directory")
    r.add_argument("--timing", action="store_true", help="also write timing.json")
    pl = sub.add_parser("plot", help="write SVG projections of a run directory")
    pl.add_argument("run_dir")
    pl.add_argument("--pairs", nargs="+", type=_pair, help="1-based state pairs such as 1,2")
    sub.add_parser("list", help="list bundled configs")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(levelname)s: %(message)s")
    if args.command == "list":
        for name in cfgmod.bundled_configs():
            print(name)
        return 0
    if args.command == "plot":
        from ddreach.plot import plot_run

        try:
            for path in plot_run(args.run_dir, args.pairs):
                print(path)
        except (OSError, ValueError, KeyError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        return 0
    for name, value in (("--samples", args.samples), ("--reduce-order", args.reduce_order), ("--seed", args.seed)):
        if value is not None and value < 0:
            print(f"invalid configuration: {name} must be non-negative", file=sys.stderr)
            return 1
    try:
        cfg = cfgmod.validate(cfgmod.load(args.config))
    except ConfigError as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return 1
    from ddreach.runner import run_experiment

    try:
        run_experiment(cfg, args.seed, args.samples, args.reduce_order, args.output, args.timing)
    except ConfigError as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return 1
    except (ValueError, ArithmeticError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
