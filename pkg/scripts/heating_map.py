"""Print a text map of an N-body heating sweep written by ``ring-carl sweep-sim``.

``*`` marks cells whose kinetic energy grew by more than ten times the thermal
spread of the initial energy; ``|`` marks cells at or above the analytic
threshold.
"""
import argparse
import math
from collections import defaultdict

from ringcarl.runner import read_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("csv")
    ap.add_argument("--n_particles", type=int, default=200)
    ap.add_argument("--kB_T", type=float, default=1.0)
    args = ap.parse_args()

    with open(args.csv) as fh:
        rows = read_csv(fh.read())
    cut = 10 * args.kB_T / math.sqrt(2 * args.n_particles)
    by_delta = defaultdict(list)
    for r in rows:
        by_delta[float(r["delta_c"])].append(r)
    heated = above = 0
    for dc, cells in by_delta.items():
        line = ""
        for r in cells:
            hot = r["error_flag"] == "" and float(r["energy_change"]) > cut
            over = float(r["eta"]) >= float(r["eta_threshold"])
            heated += hot
            above += hot and over
            line += ("*" if hot else ".") + ("|" if over else " ")
        print(f"{dc:7.2f}  {line}")
    if heated:
        print(f"{above}/{heated} heated cells lie on or above the threshold curve")


if __name__ == "__main__":
    main()
