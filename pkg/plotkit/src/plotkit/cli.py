"""plotkit <kind> <input.csv> -o <output image>; exits 0 on success, 1 on error."""

from __future__ import annotations

import argparse
import sys

from .figures import KINDS, FigureSpec, PlotkitError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plotkit", description="Render simulator CSV artifacts into figures"
    )
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument("input_csv")
    parser.add_argument("-o", "--output", required=True, help="output image path")
    parser.add_argument("--title", default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        result = FigureSpec(
            kind=args.kind, input_csv=args.input_csv, output=args.output, title=args.title
        ).render()
    except PlotkitError as exc:
        print(f"plotkit error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {result.output}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
