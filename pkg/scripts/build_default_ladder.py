"""Build the default ladder (anchor 1e5, moser weight, up to 4.2e5) and write it to disk."""

import argparse
import time

from jladder.ladder import build_ladder, check_integrity, save_ladder
from jladder.primes import build_sieve, moser_anchor_phi
from jladder.zeta_core import MoserCalibrated


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="ladder.csv")
    ap.add_argument("--t-max", type=float, default=4.2e5)
    args = ap.parse_args()

    anchor = 1e5
    t0 = time.perf_counter()
    table = build_ladder(anchor, moser_anchor_phi(anchor, build_sieve()), args.t_max, MoserCalibrated())
    built = time.perf_counter() - t0
    save_ladder(table, args.out)
    rep = check_integrity(table)
    print(f"checkpoints={len(table.ts)} phi=[{table.phi_min:.6f}, {table.phi_max:.6f}] build={built:.1f}s")
    print(f"integrity ok={rep.ok} max_deviation={rep.max_deviation:.3e}")


if __name__ == "__main__":
    main()
