"""Ratio (t - phi1(t)) / ((1 - c) pi(t)) along the ladder, one row per sample height."""

import argparse

import numpy as np

from jladder.ladder import load_ladder
from jladder.primes import build_sieve, check_A


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ladder", default="ladder.csv")
    ap.add_argument("--points", type=int, default=40)
    args = ap.parse_args()

    table = load_ladder(args.ladder)
    sieve = build_sieve()
    print("t,ratio")
    for t in np.linspace(table.anchor_t * 1.05, table.t_max, args.points):
        print(f"{t:.1f},{check_A(table, sieve, float(t)):.6f}")


if __name__ == "__main__":
    main()
