"""Command line front end: run experiments, parameter sweeps, and emit the
asymptotic reference constants."""
from __future__ import annotations

import argparse
import sys

from .experiments import (ConfigError, emit_reference_constants, parse_config,
                          run_experiment)

_MODES = {
    "run": "run",
    "sweep-alpha": "alpha",
    "sweep-delta": "delta",
    "sweep-topology": "topology",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gossip-bandits",
        description="Monte Carlo simulator for gossip-constrained "
                    "multi-agent bandits.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("run", "single experiment at the configured parameters"),
        ("sweep-alpha", "sweep the exploration exponent alpha"),
        ("sweep-delta", "sweep the minimum mean gap"),
        ("sweep-topology", "sweep the gossip topology"),
        ("constants", "emit the asymptotic reference constants"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="experiment config file")
        p.add_argument("--out", default=None, help="output directory "
                       "(default: out_dir from the config)")
        p.add_argument("--seed", type=int, default=None,
                       help="override the master seed")
        if name != "constants":
            p.add_argument("--workers", type=int, default=1,
                           help="worker processes (output is identical "
                           "for any worker count)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = parse_config(args.config)
        if args.seed is not None:
            if not 0 <= args.seed < 2**64:
                raise ConfigError("seed must fit in 64 bits")
            config = type(config)(**{**config.__dict__, "seed": args.seed})
        if args.command == "constants":
            path = emit_reference_constants(config, args.out)
            print(f"wrote {path}")
        else:
            paths = run_experiment(config, _MODES[args.command], args.out,
                                   workers=args.workers)
            print(f"wrote {paths['trace']}")
            print(f"wrote {paths['summary']}")
    except (ConfigError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
