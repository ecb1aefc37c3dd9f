"""Command-line entry point: run / list / validate.

Exit codes: 0 ok, 2 configuration problem, 3 numeric-regime refusal,
4 budget exhausted.  Output directory resolution order: --output-dir,
config "output_dir", $COCYCLELAB_OUTDIR, ./runs/<experiment>.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from ..errors import BudgetExceeded, DomainError, RegimeError
from .config import ConfigError, apply_overrides, load_config, resolve
from .experiments import catalog, run_experiment
from .io import RunContext, finish_manifest

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_REGIME = 3
EXIT_BUDGET = 4


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="cocyclelab",
        description="Quasi-periodic cocycle experiments: run, list, validate.")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute an experiment config")
    run.add_argument("config", help="path to a JSON experiment config")
    run.add_argument("--set", action="append", default=[], metavar="KEY=VAL",
                     help="override a config key (dotted path, JSON value)")
    run.add_argument("--output-dir", default=None)
    run.add_argument("--reproducible", action="store_true",
                     help="suppress timestamps for byte-identical reruns")

    lst = sub.add_parser("list", help="print the experiment catalog")
    lst.add_argument("--json", action="store_true", dest="as_json")

    val = sub.add_parser("validate", help="schema-check a config and echo it")
    val.add_argument("config")
    val.add_argument("--set", action="append", default=[], metavar="KEY=VAL")
    return ap


def _outdir(args, resolved: dict) -> Path:
    if args.output_dir:
        return Path(args.output_dir)
    if "output_dir" in resolved:
        return Path(resolved["output_dir"])
    env = os.environ.get("COCYCLELAB_OUTDIR")
    if env:
        return Path(env) / resolved["experiment"]
    return Path("runs") / resolved["experiment"]


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)

    if args.command == "list":
        cat = catalog()
        if args.as_json:
            print(json.dumps(cat, sort_keys=True, indent=2))
        else:
            for name, info in cat.items():
                print(f"{name:18s} {info['description']}")
                print(f"{'':18s} checks: {info['checks']}")
                for k, doc in info["params"].items():
                    print(f"{'':20s}{k}: {doc}")
        return EXIT_OK

    try:
        cfg = load_config(args.config)
        cfg = apply_overrides(cfg, args.set)
        resolved = resolve(cfg)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG

    if args.command == "validate":
        print(json.dumps(resolved, sort_keys=True, indent=2))
        return EXIT_OK

    ctx = RunContext(outdir=_outdir(args, resolved),
                     reproducible=args.reproducible)
    try:
        run_experiment(resolved, ctx)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except DomainError as err:
        print(f"config error (domain): {err}", file=sys.stderr)
        return EXIT_CONFIG
    except RegimeError as err:
        print(f"numeric-regime error: {err}", file=sys.stderr)
        return EXIT_REGIME
    except BudgetExceeded as err:
        print(f"budget exceeded: {err}", file=sys.stderr)
        return EXIT_BUDGET
    manifest = finish_manifest(ctx, resolved["experiment"], resolved)
    print(manifest)
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
