"""Largest Gram deviation across periods 2l and block heights, on a saved ladder."""

import argparse
import math

from jladder.harmonics import GramSpec, family_deviations, gram_matrix
from jladder.ladder import load_ladder


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ladder", default="ladder.csv")
    ap.add_argument("--n-max", type=int, default=8)
    args = ap.parse_args()

    table = load_ladder(args.ladder)
    print("two_l,K,start,max_abs_deviation,relative_to_l,worst_family")
    for two_l in (2.0, 20.0, 200.0, 2000.0):
        for height in (1.2e5, 2e5, 3e5, 4e5):
            K = int(height // two_l)
            if two_l > two_l * K / math.log(two_l * K) or two_l * (K + 1) > table.phi_max:
                continue
            rep = gram_matrix(table, GramSpec(two_l, K, args.n_max, table.mode))
            fam = family_deviations(rep)
            worst = max(fam, key=fam.get)
            print(f"{two_l:g},{K},{two_l * K:g},{rep.max_abs_deviation:.3e},"
                  f"{rep.max_abs_deviation / (two_l / 2):.3e},{worst}")


if __name__ == "__main__":
    main()
