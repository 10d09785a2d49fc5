"""Command line: render a report bundle to a box-plot image."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .bundle import BundleError
from .render import FigureSpec, render_boxplots


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="halfnormal-figures",
        description="Render box plots from a halfnormal JSON report bundle.",
    )
    parser.add_argument("bundle", type=Path, help="input JSON bundle")
    parser.add_argument(
        "--out", type=Path, required=True, help="output image (png or svg)"
    )
    parser.add_argument(
        "--estimator", default=None, help="only render this estimator's cells"
    )
    parser.add_argument(
        "--title", default="{experiment}  panel {panel}", help="panel title template"
    )
    parser.add_argument("--dpi", type=int, default=150)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    selection = {}
    if args.estimator:
        selection["estimator"] = args.estimator
    spec = FigureSpec(
        input_path=args.bundle,
        output_path=args.out,
        title_template=args.title,
        selection=selection,
        dpi=args.dpi,
    )
    try:
        render_boxplots(spec)
    except BundleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
