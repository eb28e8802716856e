"""Command line entry point: classify one derivation file."""

from __future__ import annotations

import argparse
import sys

from .atlas import load_splitting_file
from .driver import classify_driver
from .errors import AlgebraError
from .io import parse, render


def build_parser():
    ap = argparse.ArgumentParser(
        prog="triangular-ga",
        description="Classify a triangular additive-group action on affine 3-space over Q[x]_(x).",
    )
    ap.add_argument("--input", required=True, help="JSON file with n, q, p (or n, p_plus, p_minus)")
    ap.add_argument("--format", choices=("json", "text"), default="json")
    ap.add_argument("--splitting", help="JSON file with splitting data for branch polynomials of degree >= 3")
    ap.add_argument("--shear-budget", type=int, default=100, help="general-position search bound")
    ap.add_argument("--max-steps", type=int, default=None, help="guard on the number of sharp-reduction steps")
    ap.add_argument("--no-timings", action="store_true", help="omit timings so reports compare byte for byte")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        d = parse(args.input)
        splittings = load_splitting_file(args.splitting) if args.splitting else ()
        report = classify_driver(d, splittings, args.shear_budget, args.max_steps)
    except (AlgebraError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.buffer.write(render(report, args.format, timings=not args.no_timings))
    return 0


if __name__ == "__main__":
    sys.exit(main())
