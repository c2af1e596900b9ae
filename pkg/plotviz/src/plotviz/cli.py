"""Command-line entry point: `plotviz <kind> <inputs...> -o FILE`."""

from __future__ import annotations

import argparse
import sys

from .figures import KINDS, FigureRequest, SchemaError, render


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise SchemaError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="plotviz", description="Render figures from riskwaves CSV outputs")
    p.add_argument("kind", choices=KINDS)
    p.add_argument("inputs", nargs="+", help="input CSV file(s)")
    p.add_argument("-o", "--output", required=True, help="output image file")
    p.add_argument("--title", default=None)
    p.add_argument("--xlim", nargs=2, type=float, default=None, metavar=("LO", "HI"))
    p.add_argument("--ylim", nargs=2, type=float, default=None, metavar=("LO", "HI"))
    p.add_argument("--column", default=None, help="density column for heatmaps")
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        req = FigureRequest(
            kind=args.kind,
            inputs=tuple(args.inputs),
            output=args.output,
            title=args.title,
            xlim=tuple(args.xlim) if args.xlim else None,
            ylim=tuple(args.ylim) if args.ylim else None,
            column=args.column,
        )
        render(req)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
