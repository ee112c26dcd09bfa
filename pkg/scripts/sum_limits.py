#!/usr/bin/env python3
"""CSV of the normalized alternating sums |S_{k,p}| against their infinite-k
limit, for plotting the approach from above."""

import argparse
import sys

from latgad import identities


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--p", type=float, nargs="*", default=[1.0, 1.5, 2.5, 3.0])
    parser.add_argument("--kmax", type=int, default=40)
    parser.add_argument("--out", type=argparse.FileType("w"), default=sys.stdout)
    args = parser.parse_args()

    print("p,k,abs_value,limit,weak_bound", file=args.out)
    for p in args.p:
        limit = identities.c_p_limit(p)
        for k in range(3, args.kmax + 1):
            if not p < k:
                continue
            res = identities.s_kp(k, p)
            print(
                f"{p},{k},{abs(res.value):.12g},{limit.value:.12g},{limit.weak_bound:.12g}",
                file=args.out,
            )


if __name__ == "__main__":
    main()
