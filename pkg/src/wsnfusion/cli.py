"""Command line entry point: ``wsnfusion {roc,sweep,alloc,validate}``."""

from __future__ import annotations

import argparse
import sys

from .config import ConfigError, format_value
from .experiments import SWEEP_AXES, run_experiment, validate_config


def _common(p: argparse.ArgumentParser, out: bool = True) -> None:
    p.add_argument("--config", help="flat key = value config file (a manifest also works)")
    if out:
        p.add_argument("--out", default="out", help="output directory (default: %(default)s)")
    p.add_argument("--seed", type=int, help="master seed, overrides the config")
    p.add_argument("--trials", type=int, help="Monte Carlo trials per hypothesis")
    p.add_argument("--workers", type=int, help="worker threads (results do not depend on it)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wsnfusion", description="Quantized soft-fusion detection experiments.")
    sub = parser.add_subparsers(dest="verb", required=True)
    _common(sub.add_parser("roc", help="analytic and empirical ROC curves"))
    sweep = sub.add_parser("sweep", help="detection probability against one parameter")
    sweep.add_argument("--axis", choices=sorted(SWEEP_AXES), required=True)
    _common(sweep)
    _common(sub.add_parser("alloc", help="transmit-power allocation by branch and bound"))
    validate = sub.add_parser("validate", help="check a config and print the resolved values")
    _common(validate, out=False)
    return parser


def _experiment(args) -> str | None:
    if args.verb == "roc":
        return "roc"
    if args.verb == "sweep":
        return SWEEP_AXES[args.axis]
    if args.verb == "alloc":
        return "power-alloc"
    return None


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = validate_config(
            args.config,
            experiment=_experiment(args),
            seed=args.seed,
            trials=args.trials,
            workers=args.workers,
        )
    except (ConfigError, OSError) as exc:
        print(f"wsnfusion: error: {exc}", file=sys.stderr)
        return 2
    if args.verb == "validate":
        for key, value in spec.to_config().items():
            print(f"{key} = {format_value(value)}")
        return 0
    result = run_experiment(spec, args.out)
    for key, value in result["summary"].items():
        print(f"{key} = {format_value(value)}")
    print(f"wrote {', '.join(result['outputs'])} and manifest.txt to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
