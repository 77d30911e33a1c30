"""Command-line entry point.

Usage:
    thermowave <kind> --config <path> [--out <dir>]
    thermowave --list-catalog

Exit codes: 0 success, 1 configuration error, 2 numerical failure.
The THERMOWAVE_THREADS environment variable caps the worker pool.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .coefficients import CATALOG
from .epsilon import SolveError
from .experiments import EXPERIMENT_KINDS, ConfigError, ExperimentConfig, run
from .spectra import SpectrumError

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="thermowave",
        description="Thermoelastic wave laboratory: spectra, energy decay, homogenization",
    )
    parser.add_argument("kind", nargs="?", choices=EXPERIMENT_KINDS,
                        help="experiment kind to run")
    parser.add_argument("--config", help="path to the JSON experiment config")
    parser.add_argument("--out", help="output directory (overrides the config)")
    parser.add_argument("--list-catalog", action="store_true",
                        help="print the coefficient catalog and exit")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)

    if args.list_catalog:
        for name, desc in CATALOG.items():
            print(f"{name:12s} {desc}")
        return EXIT_OK

    if args.kind is None or args.config is None:
        parser.print_usage(sys.stderr)
        print("error: need an experiment kind and --config (or --list-catalog)", file=sys.stderr)
        return EXIT_CONFIG

    try:
        config = ExperimentConfig.from_file(args.config)
        if config.kind != args.kind:
            raise ConfigError(
                f"config declares kind {config.kind!r} but {args.kind!r} was requested")
        manifest = run(config, out_dir=args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SpectrumError, SolveError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"numerical failure in stage {args.kind!r}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL

    for entry in manifest["files"]:
        print(f"wrote {entry['name']}  sha256={entry['sha256'][:12]}...")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
