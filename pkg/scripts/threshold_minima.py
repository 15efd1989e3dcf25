"""Analytic and mean-field ordering thresholds versus cavity detuning.

Writes one CSV per parameter set and prints where each curve is lowest.
The analytic minimum should sit at delta_c = N U0.
"""
import argparse
import csv
from pathlib import Path

import numpy as np

from ringcarl import meanfield as mf
from ringcarl import stability as stab
from ringcarl.dynamics import SystemParams

CASES = {"n200": (200, -1 / 115), "n1000": (1000, -1 / 375)}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("results"))
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    deltas = np.round(np.arange(-3.5, 1e-9, 0.1), 10)
    for tag, (n, u0) in CASES.items():
        base = SystemParams(n_particles=n, u0=u0, kappa=1.0, kB_T=1.0)
        floor = stab.eta_threshold_min(base)
        etas = floor * np.arange(0.8, 2.0 + 1e-9, 0.005)
        cols = mf.threshold_per_column(mf.sweep_contour(base, deltas, etas, jobs=args.jobs))
        path = args.out / f"threshold_{tag}.csv"
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["delta_c", "eta_threshold", "eta_meanfield"])
            for dc in deltas:
                w.writerow([dc, stab.eta_threshold(base.with_(delta_c=dc)), cols[dc]])
        found = {dc: th for dc, th in cols.items() if th is not None}
        best = min(found, key=found.get)
        print(f"{tag}: NU0 = {base.nu0:.3f}, eta_min = {floor:.4f}, mean-field minimum at "
              f"delta_c = {best:.1f} (eta = {found[best]:.3f}) -> {path}")


if __name__ == "__main__":
    main()
