"""Command-line front end: one subcommand per figure.

Examples
--------
oscflux-figures fig3 --simulated out/flow.csv --analytic out_analytic/flow.csv \
    --out fig3.png
oscflux-figures fig5 --sweeps s0.csv s05.csv --fits f0.csv f05.csv \
    --labels "0" "0.5" --out fig5.png
"""
from __future__ import annotations

import argparse
import sys

from .render import FigureError, FigureSpec, render

_SINGLE = {
    "fig2": ["ratios"],
    "fig3": ["simulated", "analytic"],
    "fig4": ["realization", "potential"],
}
_MULTI = {"fig1": ["spectra"], "fig5": ["sweeps", "fits"]}
_OPTIONAL = {("fig5", "fits")}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="oscflux-figures")
    sub = parser.add_subparsers(dest="figure", required=True)
    for fid, keys in _SINGLE.items():
        p = sub.add_parser(fid)
        for key in keys:
            p.add_argument(f"--{key}", required=True)
        p.add_argument("--out", required=True)
        p.add_argument("--labels", nargs="*", default=[])
    for fid, keys in _MULTI.items():
        p = sub.add_parser(fid)
        for key in keys:
            required = (fid, key) not in _OPTIONAL
            p.add_argument(f"--{key}", nargs="+" if required else "*",
                           required=required, default=None if required else [])
        p.add_argument("--out", required=True)
        p.add_argument("--labels", nargs="*", default=[])
    args = parser.parse_args(argv)

    keys = _SINGLE.get(args.figure, []) + _MULTI.get(args.figure, [])
    inputs = {}
    for key in keys:
        value = getattr(args, key)
        if value:
            inputs[key] = value
    spec = FigureSpec(figure_id=args.figure, inputs=inputs, output=args.out,
                      labels=list(args.labels))
    try:
        path = render(spec)
    except FigureError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
