"""plot: turn a satchain CSV artifact into a static figure."""

from __future__ import annotations

import argparse
import sys

from .csvio import PlotError
from .figures import KINDS, PlotSpec, render


def _tri_state(value: str) -> bool:
    return {"log": True, "linear": False}[value]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="plot", description=__doc__)
    parser.add_argument("--kind", required=True, choices=KINDS)
    parser.add_argument("--in", dest="input_path", required=True, metavar="CSV")
    parser.add_argument("--out", dest="output_path", required=True, metavar="IMG")
    parser.add_argument("--x-scale", choices=("log", "linear"), default=None,
                        help="override the kind's default x-axis scale")
    parser.add_argument("--y-scale", choices=("log", "linear"), default=None,
                        help="override the kind's default y-axis scale")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    spec = PlotSpec(
        input_path=args.input_path,
        kind=args.kind,
        output_path=args.output_path,
        log_x=_tri_state(args.x_scale) if args.x_scale else None,
        log_y=_tri_state(args.y_scale) if args.y_scale else None,
    )
    try:
        out = render(spec)
    except PlotError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(out)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
