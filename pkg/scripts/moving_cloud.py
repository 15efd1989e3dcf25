"""Threshold asymmetry about delta_c = N U0 for a cloud moving at k v = 5 kappa."""
import argparse
import csv
from pathlib import Path

import numpy as np

from ringcarl import meanfield as mf
from ringcarl import stability as stab
from ringcarl.dynamics import SystemParams


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path("results"))
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    base = SystemParams(n_particles=3000, u0=-0.0017, kappa=1.0, kB_T=1.0, v=5.0)
    deltas = np.round(base.nu0 + np.arange(-8, 8.01, 0.5), 10)
    etas = np.geomspace(20, 400, 300)
    cols = mf.threshold_per_column(mf.sweep_contour(base, deltas, etas, jobs=args.jobs))
    path = args.out / "moving_cloud.csv"
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["delta_c", "eta_threshold_moving", "eta_threshold_rest", "eta_meanfield"])
        for dc in deltas:
            w.writerow([dc, stab.eta_threshold(base.with_(delta_c=dc)),
                        stab.eta_threshold(base.with_(delta_c=dc, v=0.0)), cols[dc]])
    print(f"-> {path}")


if __name__ == "__main__":
    main()
