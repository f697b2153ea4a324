"""Batch plotting CLI over simulator artifact directories.

    socmig-plot opinions    --in runs/fig1a --out fig1a_opinions.png
    socmig-plot populations --in runs/fig5a --out fig5a_population.png
    socmig-plot rates       --in runs/fig5a --out fig5a_rates.md
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .figures import (
    OPINIONS,
    POPULATIONS,
    RATES_TABLE,
    FigureSpec,
    NoDataError,
    SchemaError,
    render,
)

SOURCES = {
    "opinions": (OPINIONS, "opinions.csv"),
    "populations": (POPULATIONS, "populations.csv"),
    "rates": (RATES_TABLE, "rates.csv"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="socmig-plot", description="render simulator artifacts"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SOURCES:
        p = sub.add_parser(name, help=f"render {name} from an artifact directory")
        p.add_argument("--in", dest="in_dir", required=True, help="artifact directory")
        p.add_argument("--out", required=True, help="output file")
        p.add_argument("--title", default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    kind, filename = SOURCES[args.command]
    spec = FigureSpec(
        kind=kind,
        source=Path(args.in_dir) / filename,
        output=Path(args.out),
        title=args.title,
    )
    try:
        render(spec)
    except (SchemaError, NoDataError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
