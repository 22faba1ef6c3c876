"""Logical T-state fidelity against squeezing for the proposed gate and two cubic phase gates.

Writes one CSV with a row per (gate, squeezing) and prints a compact table.

    python scripts/fidelity_vs_squeezing.py --out results/fidelity_vs_squeezing.csv
"""
import argparse
import csv
from pathlib import Path

import numpy as np

from gkp_tgate.cpg import GKP_GAINS, OPTIMIZED_GAINS, cpg_logical_fidelity
from gkp_tgate.gkp import db_to_delta
from gkp_tgate.tgate import fidelity_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--db-min", type=float, default=2.0)
    ap.add_argument("--db-max", type=float, default=20.0)
    ap.add_argument("--db-step", type=float, default=1.0)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="results/fidelity_vs_squeezing.csv")
    args = ap.parse_args()

    dbs = np.round(np.arange(args.db_min, args.db_max + 1e-9, args.db_step), 10).tolist()
    curves = {}
    for mode in ("ideal", "equal"):
        curves[f"proposed/{mode}"] = [r.fidelity for r in fidelity_sweep(dbs, mode, workers=args.workers)]
    for name, g in (("cpg-gkp", GKP_GAINS), ("cpg-optimized", OPTIMIZED_GAINS)):
        curves[name] = [cpg_logical_fidelity(db_to_delta(db), g) for db in dbs]

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["squeezing_db", "curve", "fidelity"])
        for name, fs in curves.items():
            w.writerows((db, name, repr(f)) for db, f in zip(dbs, fs))

    names = list(curves)
    print("dB     " + "  ".join(f"{n:>16s}" for n in names))
    for i, db in enumerate(dbs):
        print(f"{db:5.1f}  " + "  ".join(f"{curves[n][i]:16.5f}" for n in names))
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
