"""Command-line front end: `figures render` and `figures render-all`."""

from __future__ import annotations

import argparse
import sys

from .render import FigureSpec, RenderIndex, render, render_all
from .schemas import FIGURE_KINDS, SchemaError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="figures",
        description="Render publication-style figures from simulator CSV output")
    sub = parser.add_subparsers(dest="command", required=True)

    one = sub.add_parser("render", help="render one figure from CSVs or a JSON spec")
    one.add_argument("inputs", nargs="+",
                     help="CSV input path(s), or a single .json figure spec")
    one.add_argument("--kind", choices=FIGURE_KINDS,
                     help="figure kind (required unless a JSON spec is given)")
    one.add_argument("--out", help="output image path (required unless JSON spec)")
    one.add_argument("--title")

    many = sub.add_parser("render-all", help="render every recognized CSV in a tree")
    many.add_argument("results_dir")
    many.add_argument("--out", help="image directory (default <results_dir>/figures)")
    return parser


def _spec_from_args(args: argparse.Namespace) -> FigureSpec:
    if len(args.inputs) == 1 and args.inputs[0].endswith(".json"):
        return FigureSpec.from_json(args.inputs[0])
    if not args.kind or not args.out:
        raise SchemaError("--kind and --out are required when passing CSVs directly")
    return FigureSpec(kind=args.kind, inputs=tuple(args.inputs),
                      output=args.out, title=args.title)


def _report(index: RenderIndex) -> int:
    for csv_path, image in index.rendered:
        print(f"rendered {image} <- {csv_path}")
    for csv_path in index.unrecognized:
        print(f"skipped unrecognized {csv_path}")
    for csv_path, message in index.failures:
        print(f"FAILED {csv_path}: {message}", file=sys.stderr)
    print(f"index: {index.index_path}")
    return 1 if index.failures else 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "render":
            image = render(_spec_from_args(args))
            print(f"rendered {image}")
            return 0
        index = render_all(args.results_dir, args.out)
        return _report(index)
    except (SchemaError, OSError) as exc:
        print(f"figures: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
