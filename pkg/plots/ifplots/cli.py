"""Shared entry point for the per-family plotting scripts."""

from __future__ import annotations

import argparse
import sys

from .families import FigureJob, render


def main(family: str, argv=None) -> int:
    parser = argparse.ArgumentParser(description=f"Render a {family} table")
    parser.add_argument("input", help="CSV table produced by the experiment CLI")
    parser.add_argument("output", help="image file to write (png/pdf/svg)")
    parser.add_argument("--title", default="")
    parser.add_argument("--linear-y", action="store_true", help="disable the log y-axis")
    args = parser.parse_args(argv)
    job = FigureJob(
        inputs=(args.input,),
        family=family,
        output=args.output,
        log_y=False if args.linear_y else None,
        title=args.title,
    )
    try:
        result = render(job)
    except Exception as exc:
        print(f"plot-{family}: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {result.output} ({result.n_curves} curves)")
    return 0
