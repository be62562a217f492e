"""Blockade loci of the first moments with inverted gain and damping.

Coupling-induced m1_AB blockade against its small-g estimate, the blockade
width around equal rates, and the two m1_A branches at strong coupling.

    python scripts/blockade_loci.py
    python scripts/blockade_loci.py --m1a   # adds the slower m1_A branch scan
"""

from __future__ import annotations

import argparse

import numpy as np

from spinsync.analytics import (
    M1A_BRANCH_A_COUPLING,
    M1A_BRANCH_B_COUPLING,
    M1A_BRANCH_B_SLOPE,
    NoSignChange,
    blockade_width,
    blockade_width_numerical,
    locate_blockade_locus,
    m1AB_blockade_ratio,
    m1AB_blockade_ratio_exact,
)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--m1a", action="store_true")
    args = ap.parse_args()

    print("m1_AB blockade, gamma_g + gamma_d = 1")
    print(f"{'g':>6} {'numerical':>11} {'exact form':>11} {'small g':>11}")
    for g in (0.01, 0.02, 0.05, 0.1):
        root = locate_blockade_locus("m1AB", g, omega_a=1e-3, scale="sum")
        print(f"{g:6.2f} {root:11.6f} {m1AB_blockade_ratio_exact(g):11.6f} {m1AB_blockade_ratio(g):11.6f}")

    print("\nblockade width |m1_A / m1_B| = 1, gamma_d = 1")
    for g in (0.05, 0.1, 0.2):
        lo, hi = blockade_width_numerical(g)
        print(f"g = {g:.2f}: -{1 - lo:.3e} / +{hi - 1:.3e}  (estimate {blockade_width(g)[1] - 1:.3e})")

    if args.m1a:
        print(f"\nm1_A roots (gamma_d = 1); branch (a) diverges at g = {M1A_BRANCH_A_COUPLING:.4f}, "
              f"branch (b) starts at g = {M1A_BRANCH_B_COUPLING} with slope {M1A_BRANCH_B_SLOPE}")
        for g in (0.8, 0.9, 1.0, 1.01, 1.03, 1.3, 1.35, 2.0, 10.0, 100.0):
            try:
                r = locate_blockade_locus("m1A", g)
                print(f"g = {g:7.2f}: gamma_g/gamma_d = {r:.5g} (ratio/g = {r / g:.4f})")
            except NoSignChange:
                print(f"g = {g:7.2f}: no root away from equal rates")


if __name__ == "__main__":
    main()
