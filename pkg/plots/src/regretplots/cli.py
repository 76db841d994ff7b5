"""Command line front end for chart rendering."""
from __future__ import annotations

import argparse
import sys

from .render import FigureSpec, RenderError, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plot",
        description="Render regret charts from experiment summary CSVs.")
    parser.add_argument("--summary", required=True, action="append",
                        help="summary CSV (repeatable)")
    parser.add_argument("--mode", required=True, choices=["time", "sweep"],
                        help="x axis: time grid or sweep value")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--constants", default=None,
                        help="reference constants CSV for the ln t guide line")
    parser.add_argument("--logx", action="store_true",
                        help="logarithmic x axis")
    parser.add_argument("--title", default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = FigureSpec(summary_paths=tuple(args.summary), mode=args.mode,
                          out_path=args.out, constants_path=args.constants,
                          logx=args.logx, title=args.title)
        render(spec)
    except (RenderError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
