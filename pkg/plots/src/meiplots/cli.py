"""CLI: plots --input DIR --figure {mei-trace,quartile-table} --out PATH
[--series LABEL ...]"""

from __future__ import annotations

import argparse
import sys

from .render import Figure, PlotSpec, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plots", description="Render experiment harness results"
    )
    parser.add_argument("--input", required=True, help="harness output directory")
    parser.add_argument("--figure", required=True, choices=[f.value for f in Figure])
    parser.add_argument("--out", required=True, help="output file (svg/png or md)")
    parser.add_argument("--series", nargs="*", default=[],
                        help="config labels to include (default: all)")
    args = parser.parse_args(argv)
    try:
        path = render(
            PlotSpec(input_dir=args.input, figure=args.figure,
                     output=args.out, series=list(args.series))
        )
    except (FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
