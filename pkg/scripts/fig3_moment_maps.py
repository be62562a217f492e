"""Moment maps over the (Omega_A, g) plane at equal rates.

Runs the sweep2d job from ``configs/fig3_sweep.ini`` (or a given config),
then summarises the threshold masks behind the contour lines: the fraction
of grid points where |m| exceeds the contour level, and where the second
moment of spin B dominates its first moment.

    python scripts/fig3_moment_maps.py --points 50 --out results/fig3.csv
"""

from __future__ import annotations

import argparse
from dataclasses import replace
from pathlib import Path

import numpy as np

from spinsync.config import parse_config
from spinsync.runner import render, run

HERE = Path(__file__).parent
LEVEL = 5e-4


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", type=Path, default=HERE / "configs" / "fig3_sweep.ini")
    ap.add_argument("--points", type=int, help="override the grid count on both axes")
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", type=Path, default=Path("results/fig3.csv"))
    args = ap.parse_args()

    spec = parse_config(args.config.read_text())
    if args.points:
        spec = replace(spec, grid=tuple(replace(a, count=args.points) for a in spec.grid))
    spec = replace(spec, workers=args.workers)
    (table,) = run(spec)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text(render([table], spec)[0][1])

    col = {name: np.array([row[k] for row in table.rows], dtype=float)
           for k, name in enumerate(table.header) if name != "error"}
    for m in ("m1_A", "m1_B", "m1_AB", "m2_A", "m2_B", "m2_AB"):
        if m + "_abs" in col:
            frac = np.mean(col[m + "_abs"] > LEVEL)
            print(f"{m:6s} max |m| = {np.max(col[m + '_abs']):.3e}, above {LEVEL:g} on {frac:.1%} of the grid")
    if "m1_B_abs" in col and "m2_B_abs" in col:
        two = col["m2_B_abs"] > col["m1_B_abs"]
        print(f"|m2_B| > |m1_B| on {np.mean(two):.1%} of the grid (two maxima in S1(phi_B))")
    print(f"max p_max = {np.max(col['p_max']):.4f}")


if __name__ == "__main__":
    main()
