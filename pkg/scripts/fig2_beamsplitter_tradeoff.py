"""Exact energy/error tradeoff for beamsplitter-type devices at several delta.

Writes one CSV with columns delta_over_pi, p_error, energy, n_star.
"""

import argparse
import csv
import math
from pathlib import Path

import numpy as np

from optodiscrim.beamsplitter import optimal_beamsplitter_state

DELTAS_OVER_PI = (1 / 12, 1 / 8, 1 / 4, 1 / 2, 3 / 4, 1)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="results")
    ap.add_argument("--points", type=int, default=200)
    args = ap.parse_args()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    qs = np.linspace(1e-3, 0.5, args.points)
    path = out / "beamsplitter_tradeoff.csv"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["delta_over_pi", "p_error", "energy", "n_star"])
        for f in DELTAS_OVER_PI:
            for q in qs:
                opt = optimal_beamsplitter_state(f * math.pi, float(q))
                w.writerow([f"{f:.6g}", f"{q:.17g}", f"{opt.point.energy:.17g}", opt.n_star])
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
