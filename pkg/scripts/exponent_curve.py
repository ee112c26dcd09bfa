#!/usr/bin/env python3
"""CSV of the theta-series constants W_p and C_p over an exponent grid,
bracketing the threshold where C_p becomes defined."""

import argparse
import sys

import numpy as np

from latgad import identities


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--lo", type=float, default=2.15)
    parser.add_argument("--hi", type=float, default=8.0)
    parser.add_argument("--count", type=int, default=40)
    parser.add_argument("--out", type=argparse.FileType("w"), default=sys.stdout)
    args = parser.parse_args()

    p0 = identities.find_p0()
    print(f"# threshold exponent p0 = {p0:.6f}", file=args.out)
    print("p,W,C", file=args.out)
    for p in np.linspace(args.lo, args.hi, args.count):
        const = identities.svp_constants(float(p))
        c_str = f"{const.C:.10g}" if const.C is not None else ""
        print(f"{const.p:.6g},{const.W:.10g},{c_str}", file=args.out)


if __name__ == "__main__":
    main()
