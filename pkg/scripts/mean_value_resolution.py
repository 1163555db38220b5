"""How close can a double hit the mean-value level?

For each unit segment the script reports the residual found, the local slope of the weighted
square at xi and the spacing of doubles there.  The best double at a crossing lands somewhere
in [0, half_step] with half_step = |slope| * spacing / 2, depending on where the level happens
to fall between neighbouring doubles.  Once half_step is well above 1e-10 a residual that small
is a matter of luck.
"""

import argparse

import numpy as np

from jladder.harmonics import mean_value
from jladder.ladder import Segment, load_ladder
from jladder.zeta_core import z_tilde_sq


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ladder", default="ladder.csv")
    ap.add_argument("--count", type=int, default=20)
    ap.add_argument("--seed", type=int, default=4)
    args = ap.parse_args()

    table = load_ladder(args.ladder)
    rng = np.random.default_rng(args.seed)
    print("T,xi,residual,slope,spacing,half_step,reverse_length")
    for T in rng.uniform(1.1e5, 4e5, args.count).tolist():
        mv = mean_value(table, Segment(T, T + 1.0))
        h = 1e-6
        slope = (z_tilde_sq(mv.xi + h, table.mode) - z_tilde_sq(mv.xi - h, table.mode)) / (2 * h)
        spacing = float(np.spacing(mv.xi))
        print(f"{T!r},{mv.xi!r},{mv.residual:.3e},{slope:.3e},{spacing:.3e},"
              f"{abs(slope) * spacing / 2:.3e},{mv.seg_reverse.length():.6f}")


if __name__ == "__main__":
    main()
