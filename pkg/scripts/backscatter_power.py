"""Backscattered intensity |a-|^2 versus detuning for a perfectly bunched cloud.

Good cavities (kappa < N|U0|) show two maxima at NU0 +- sqrt(N^2 U0^2 - kappa^2);
bad cavities show a single one at NU0.
"""
import argparse
import csv
from pathlib import Path

import numpy as np

from ringcarl import stability as stab
from ringcarl.dynamics import SystemParams, steady_fields


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("results"))
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    kappas = (0.2, 1.0, 3.0)
    grid = np.linspace(-6, 2, 1601)
    table = {}
    for kappa in kappas:
        p = SystemParams(n_particles=1000, u0=-0.002, kappa=kappa, eta=1.0)
        table[kappa] = [abs(steady_fields(p.with_(delta_c=d), 1.0).a_minus) ** 2 for d in grid]
        print(f"kappa = {kappa}: predicted maxima {stab.optimal_backscatter_detuning(p, 1.0) or (p.nu0,)}")
    path = args.out / "backscatter_power.csv"
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["delta_c"] + [f"kappa_{k}" for k in kappas])
        for i, d in enumerate(grid):
            w.writerow([d] + [table[k][i] for k in kappas])
    print(f"-> {path}")


if __name__ == "__main__":
    main()
