"""Export the default 132-sample scheme in every supported format.

Writes bvals/bvecs, the JSON descriptor, and a mirrored full-sphere point
list into the chosen directory, then reports per-shell totals.
"""

import argparse
import json
import os

from qspf import build_grid
from qspf.cli import (
    descriptor_from_grid,
    format_bvals,
    format_bvecs,
    format_points_csv,
)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", default="grid_export")
    ap.add_argument("--shells", type=int, default=4)
    ap.add_argument("--bmax", type=float, default=8000.0)
    ap.add_argument("--bandlimits", default="3,5,9,11")
    args = ap.parse_args()

    bandlimits = tuple(int(t) for t in args.bandlimits.split(","))
    grid = build_grid(args.shells, args.bmax, bandlimits)
    os.makedirs(args.outdir, exist_ok=True)

    with open(os.path.join(args.outdir, "scheme.bvals"), "w") as f:
        f.write(format_bvals(grid))
    with open(os.path.join(args.outdir, "scheme.bvecs"), "w") as f:
        f.write(format_bvecs(grid))
    with open(os.path.join(args.outdir, "scheme.json"), "w") as f:
        json.dump(descriptor_from_grid(grid), f, indent=2)
        f.write("\n")
    with open(os.path.join(args.outdir, "points_full_sphere.csv"), "w") as f:
        f.write(format_points_csv(grid, mirror=True))

    print(f"wrote {args.outdir}/: scheme.bvals scheme.bvecs scheme.json points_full_sphere.csv")
    print(f"total samples: {grid.n_samples}")
    for i in range(grid.n_shells):
        L = grid.bandlimits[i]
        print(
            f"  shell {i}: b = {grid.radial.bvalues[i]:9.1f} s/mm^2, "
            f"band limit {L:2d}, {L * (L + 1) // 2:3d} directions"
        )


if __name__ == "__main__":
    main()
