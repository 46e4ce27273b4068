"""Command line: ``plots --kind <k> --in a.csv [b.csv ...] --out fig.png [--log]``."""

from __future__ import annotations

import argparse
import sys

from .figures import KINDS, FigureSpec, render


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> _Parser:
    parser = _Parser(prog="plots", description="render solver trace figures")
    parser.add_argument("--kind", choices=KINDS, required=True)
    parser.add_argument("--in", dest="inputs", nargs="+", required=True,
                        help="trace CSV files")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--log", action="store_true",
                        help="log-scale the y axis (suboptimality always is)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        spec = FigureSpec(kind=args.kind, inputs=tuple(args.inputs),
                          output=args.out, log_scale=args.log)
        series = render(spec)
    except (ValueError, OSError) as exc:
        print(f"plots: error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.out}: {len(series)} curve(s)")
    return 0


def main_entry() -> None:
    sys.exit(main())
