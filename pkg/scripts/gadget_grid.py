#!/usr/bin/env python3
"""Sweep the gadget existence grid and print the achieved separation gaps.

Rows are norm exponents, columns arities; entries show eps of the verified
isolating parallelepiped, or the refusal reason.
"""

import argparse
import math

from latgad import gadgets
from latgad.errors import UnsupportedParametersError


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--kmax", type=int, default=6)
    parser.add_argument(
        "--p", type=float, nargs="*", default=[1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, math.pi]
    )
    args = parser.parse_args()

    ks = list(range(1, args.kmax + 1))
    print("p \\ k  " + "".join(f"{k:>12d}" for k in ks))
    for p in args.p:
        cells = []
        for k in ks:
            try:
                g = gadgets.find_isolating_parallelepiped(k, p)
                report = gadgets.verify_parallelepiped(g)
                cells.append(f"{g.eps:12.3e}" if report.passed else "      BADVER")
            except UnsupportedParametersError:
                cells.append("           -")
        print(f"{p:<7.4g}" + "".join(cells))
    print("\n'-' marks the even-integer region p < k where no gadget exists.")


if __name__ == "__main__":
    main()
