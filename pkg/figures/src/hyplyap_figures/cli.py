"""make-figures: render one experiment figure from a CSV file."""

from __future__ import annotations

import argparse
import sys

from .figures import KINDS, FigureSpec, SchemaMismatch, make_figures


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="make-figures")
    parser.add_argument("--kind", required=True, choices=KINDS)
    parser.add_argument("--in", dest="input_csv", required=True)
    parser.add_argument("--out", dest="output_path", required=True)
    parser.add_argument("--sigma", type=float, default=3.0,
                        help="good/bad threshold multiplier")
    args = parser.parse_args(argv)
    spec = FigureSpec(args.kind, args.input_csv, args.output_path, args.sigma)
    try:
        path = make_figures(spec)
    except SchemaMismatch as exc:
        print(f"schema mismatch: {exc}", file=sys.stderr)
        return 2
    print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
