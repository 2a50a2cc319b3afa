"""``kmpath`` command line.

Exit codes: 0 success, 2 configuration error, 3 numerical or stage failure.
"""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace

from ._jit import set_threads
from .config import load_config
from .errors import ConfigError, KmpathError
from .pipeline import STAGES, StageError, run_pipeline, run_stage

EXIT_OK, EXIT_CONFIG, EXIT_FAILURE = 0, 2, 3


def _u64(text):
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True,
                        help="JSON config file, or the name of a bundled one (example1, example2)")
    common.add_argument("--output-dir", help="override output_dir from the config")
    common.add_argument("--seed", type=_u64, help="override the simulation seed")
    common.add_argument("--threads", type=int, help="worker-count hint; results do not depend on it")
    common.add_argument("--strict-repro", action="store_true",
                        help="refuse configs whose seeds are not written out explicitly")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="kmpath", description="Learn an SDE from data and compute its most probable transition path.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in STAGES + ("pipeline",):
        sub.add_parser(name, parents=[common])
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args.config, seed_override=args.seed, strict_repro=args.strict_repro)
    except ConfigError as exc:
        print(f"kmpath: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.output_dir:
        cfg = replace(cfg, output_dir=args.output_dir)
    set_threads(args.threads)
    try:
        if args.command == "pipeline":
            run_pipeline(cfg)
        else:
            run_stage(args.command, cfg)
    except StageError as exc:
        print(f"kmpath: {exc}", file=sys.stderr)
        return EXIT_CONFIG if isinstance(exc.cause, ConfigError) else EXIT_FAILURE
    except KmpathError as exc:  # pragma: no cover
        print(f"kmpath: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
