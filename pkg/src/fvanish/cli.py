"""The ``fv`` command.

    fv <experiment> --config <path> [--out <dir>] [--threads N]
    fv accept [--only <id>] [--out <dir>] [--threads N]

Exit status: 0 when every flag passes, 2 when a flag fails, 1 on errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

EXPERIMENTS = ("decay", "tails", "knapp", "smooth", "dimension", "autoconv", "solve", "sobolev")


def _parser():
    ap = argparse.ArgumentParser(prog="fv", description=__doc__.split("\n\n")[0])
    sub = ap.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        sp = sub.add_parser(name, help=f"run the {name} experiment")
        sp.add_argument("--config", required=True, help="JSON config file")
        _common(sp)
    sp = sub.add_parser("accept", help="run the acceptance suite")
    sp.add_argument("--only", action="append", metavar="ID",
                    help="run just this criterion (repeatable)")
    sp.add_argument("--config", help="optional JSON config with experiment 'accept'")
    _common(sp)
    return ap


def _common(sp):
    sp.add_argument("--out", help="output directory (default: config output.dir or ./fv-out)")
    sp.add_argument("--threads", type=int, help="FFT worker threads (fallback: FV_THREADS)")


def _load(path):
    with open(path) as fh:
        return json.load(fh)


def _print_table(reports, stream):
    width = max(len(r.experiment) for r in reports)
    for r in reports:
        failed = [f.name for f in r.flags if not f.passed]
        tail = "" if not failed else "  failed: " + ", ".join(failed)
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.experiment:<{width}}  {r.elapsed:8.2f} s{tail}",
              file=stream)


def main(argv=None):
    args = _parser().parse_args(argv)
    if args.threads is not None:
        if args.threads < 1:
            print("fv: --threads must be positive", file=sys.stderr)
            return 1
        os.environ["FV_THREADS"] = str(args.threads)

    from .acceptance import CRITERIA
    from .experiments import ConfigError, run

    try:
        if args.config:
            config = _load(args.config)
        else:
            config = {"experiment": "accept"}
        if config.get("experiment") != args.experiment:
            raise ConfigError(f"config is for experiment {config.get('experiment')!r}, "
                              f"not {args.experiment!r}")
        if args.experiment == "accept" and args.only:
            unknown = [c for c in args.only if c not in CRITERIA]
            if unknown:
                raise ConfigError(f"unknown criterion {unknown[0]!r}; choose from {', '.join(CRITERIA)}")
            config.setdefault("params", {})["only"] = args.only
        out = args.out or config.get("output", {}).get("dir") or "fv-out"
        result = run(config)
    except ConfigError as e:
        print(f"fv: {e}", file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError) as e:
        print(f"fv: cannot read config: {e}", file=sys.stderr)
        return 1
    except (ValueError, ArithmeticError, RuntimeError) as e:
        print(f"fv: {args.experiment} failed: {e}", file=sys.stderr)
        return 1

    reports = result if isinstance(result, list) else [result]
    try:
        for r in reports:
            r.write(out)
    except OSError as e:
        print(f"fv: cannot write reports: {e}", file=sys.stderr)
        return 1
    _print_table(reports, sys.stdout)
    return 0 if all(r.passed for r in reports) else 2


if __name__ == "__main__":
    sys.exit(main())
