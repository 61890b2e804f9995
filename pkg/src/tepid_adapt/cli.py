"""Command-line entry point: ``tepid-adapt <subcommand> --config FILE``.

Exit codes: 0 success, 2 configuration error, 3 resource error, 4 run failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .config import load_config
from .errors import ConfigError, ResourceError, TepidError
from .experiments import COMMANDS, RunOptions

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RESOURCE = 3
EXIT_RUN = 4


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, type=Path, help="experiment config (TOML)")
    common.add_argument("--out", type=Path, help="output directory (default: output_dir from the config)")
    common.add_argument("--seed", type=int, help="master seed (default: seed from the config)")
    common.add_argument("--workers", type=int, default=1, help="parallel worker processes")
    common.add_argument("--smoke", action="store_true", help="reduced counts for a quick check")
    common.add_argument("-v", "--verbose", action="count", default=0)

    parser = argparse.ArgumentParser(prog="tepid-adapt",
                                     description="Adaptive variational Gibbs-state experiments.")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "run": "one adaptive run with per-eigenstate diagnostics",
        "m-scan": "one run per truncation size m",
        "beta-extrapolate": "optimized and extrapolated Gibbs states over a beta grid",
        "tolerance-scan": "convergence versus pool-gradient tolerance",
        "scaling-study": "exact-diagonalization scaling of m_min and beta_min",
        "random-restart": "random re-initializations along the adaptive path",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config, args.command)
    except ConfigError as exc:
        print(f"{args.config}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.workers < 1:
        print("--workers must be at least 1", file=sys.stderr)
        return EXIT_CONFIG
    seed = cfg.seed if args.seed is None else args.seed
    cfg = replace(cfg, seed=seed)
    opts = RunOptions(out_dir=args.out or Path(cfg.output_dir), seed=seed,
                      workers=args.workers, smoke=args.smoke)
    try:
        written = COMMANDS[args.command](cfg, opts)
    except ConfigError as exc:
        print(f"{args.config}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ResourceError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except TepidError as exc:
        print(f"run failed: {exc}", file=sys.stderr)
        return EXIT_RUN
    for path in written:
        print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
