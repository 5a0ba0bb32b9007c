"""Command-line experiment runner.

  ialab <experiment> --config <path> [--seed S] [--out PATH]
        [--format csv|json] [--threads N]
  ialab list

Exit codes: 0 success, 1 usage/config error, 2 runtime/statistics error.
"""

import argparse
import sys
from dataclasses import replace

from .errors import ConfigError, StatisticsError
from .harness import EXPERIMENTS, emit, render, run_experiment, validate_config


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ialab", description=__doc__)
    sub = parser.add_subparsers(dest="command")
    sub.add_parser("list", help="enumerate experiments and their parameter schemas")
    run = sub.add_parser("run", help=argparse.SUPPRESS)
    run.add_argument("experiment")
    run.add_argument("--config", required=True)
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--out", default=None)
    run.add_argument("--format", choices=("csv", "json"), default=None)
    run.add_argument("--threads", type=int, default=1)
    return parser


def _print_schema():
    for name in sorted(EXPERIMENTS):
        exp = EXPERIMENTS[name]
        flags = []
        if exp.stochastic:
            flags.append("seed required")
        if exp.needs_trials:
            flags.append("trials required")
        print(f"{name}: {exp.description}" + (f"  [{', '.join(flags)}]" if flags else ""))
        for p in exp.params:
            req = "required" if p.required else f"default {p.default}"
            print(f"    {p.name} ({p.kind}, {req})")


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    # accept `ialab <experiment> ...` without an explicit `run` subcommand
    if argv and argv[0] not in ("list", "run", "-h", "--help"):
        argv = ["run"] + argv
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command == "list":
        _print_schema()
        return 0
    if args.command != "run":
        parser.print_help()
        return 1
    try:
        config = validate_config(args.config, args.experiment)
    except ConfigError as exc:
        for err in exc.errors:
            print(f"config error: {err}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    if args.seed is not None:
        config = replace(config, seed=args.seed)
    if args.format is not None:
        config = replace(config, format=args.format)
    if args.out is not None:
        config = replace(config, output=args.out)
    if args.threads < 1:
        print("config error: --threads must be >= 1", file=sys.stderr)
        return 1
    exp = EXPERIMENTS[config.experiment]
    if exp.stochastic and config.seed is None:
        print("config error: missing mandatory seed", file=sys.stderr)
        return 1
    try:
        table = run_experiment(config, threads=args.threads)
    except (StatisticsError, RuntimeError, ValueError, ArithmeticError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2
    if config.output:
        emit(table, config.output, config.format)
        print(f"wrote {config.output} ({len(table.rows)} rows)")
    else:
        sys.stdout.write(render(table, config.format))
    return 0


if __name__ == "__main__":
    sys.exit(main())
