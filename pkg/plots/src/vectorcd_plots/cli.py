"""Batch figure rendering: `vectorcd-plots render --spec <json>`."""

from __future__ import annotations

import argparse
import sys

from .render import PlotSpec, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vectorcd-plots", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render a figure from summary CSVs")
    p.add_argument("--spec", required=True, help="plot spec JSON file")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = render(PlotSpec.from_file(args.spec))
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
