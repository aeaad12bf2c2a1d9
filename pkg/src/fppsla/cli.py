"""Command-line entry point: ``fppsla <subcommand> [flags]``."""
from __future__ import annotations

import argparse
import logging
import sys

from .errors import ConfigError
from .harness import ExperimentSpec, Mode, run_experiment
from .model import default_config, load_config

SUBCOMMANDS = {
    "run": Mode.SINGLE,
    "convergence": Mode.CONVERGENCE,
    "sweep-n": Mode.SWEEP_N,
    "sweep-snr": Mode.SWEEP_SNR,
    "timing": Mode.TIMING,
}


def _value_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of numbers, got {text!r}") from None


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _seed(text):
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer, got {text}")
    return value


def build_parser():
    parser = argparse.ArgumentParser(prog="fppsla", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in [*SUBCOMMANDS, "verify"]:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--seed", type=_seed)
        p.add_argument("--trials", type=_positive_int)
        p.add_argument("--out", help="output file")
        p.add_argument("--workers", type=_positive_int, default=1)
        p.add_argument("--values", type=_value_list, help="comma-separated sweep values")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")

    try:
        config = load_config(args.config) if args.config else default_config()
        if args.seed is not None:
            config = config.replace(rng_seed=args.seed)
    except ConfigError as exc:
        print(f"fppsla: error: {exc}", file=sys.stderr)
        return 2

    if args.command == "verify":
        from .verify import run_verify

        results = run_verify(seed=config.rng_seed)
        for result in results:
            print(result.line())
        return 0 if all(r.passed for r in results) else 1

    mode = SUBCOMMANDS[args.command]
    values = args.values or []
    if mode in (Mode.SWEEP_N, Mode.TIMING):
        values = [int(v) for v in values]
    try:
        spec = ExperimentSpec(
            mode=mode,
            trials=args.trials or (1 if mode is Mode.SINGLE else 100),
            sweep_values=values,
            base_config=config,
            output_path=args.out,
            parallel_workers=args.workers,
        )
        run_experiment(spec)
    except (ConfigError, ValueError) as exc:
        print(f"fppsla: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"fppsla: error: cannot write {exc.filename or spec.output_path}: {exc.strerror}", file=sys.stderr)
        return 3
    print(spec.output_path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
