"""Deceleration of a fast particle beam crossing the pumped ring cavity.

The beam moves at k v = -5 kappa in the lab frame (p0 = -2000 hbar k,
m = 400). With a fixed lab-frame pump the collective resonances sit at
delta_c = N U0 (pump) and delta_c = N U0 + 2 k v (backscatter); the scan
shows where momentum is removed from the beam.
"""
import argparse
import csv
from pathlib import Path

import numpy as np

from ringcarl import simulate as sim
from ringcarl.dynamics import SystemParams


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("results"))
    ap.add_argument("--eta", type=float, default=300.0)
    ap.add_argument("--t_end", type=float, default=60.0)
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    base = SystemParams(n_particles=3000, u0=-5 / 3000, kappa=1.0, kB_T=1.0, mass=400.0, eta=args.eta)
    p0 = -2000.0
    deltas = np.arange(-25.0, 5.01, 2.5)
    dt = min(sim.max_stable_dt(base.with_(delta_c=d)) for d in deltas)
    cfg = sim.SimConfig(dt=dt, t_end=args.t_end, record_every=1000, seed=1)
    rows = sim.sweep_sim(base, deltas, [args.eta], cfg, p0, args.jobs)
    path = args.out / "beam_stopping.csv"
    with path.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=sim.SWEEP_COLUMNS)
        w.writeheader()
        w.writerows(rows)
    print(f"resonances: pump {base.nu0:.1f}, backscatter {base.nu0 - 10:.1f}")
    for r in rows:
        print(f"delta_c = {r['delta_c']:6.1f}  momentum removed per particle = {r['final_com_p'] - p0:8.3f}")
    print(f"-> {path}")


if __name__ == "__main__":
    main()
