"""Best cubic-phase-gate fidelity per n0 as a function of squeezing.

For each squeezing level the full integer gain search is run and the top
triple of every n0 is kept. Both gauge-origin conventions can be compared.

    python scripts/gain_search_vs_squeezing.py --origin 1 --out results/gain_search.csv
"""
import argparse
import csv
from pathlib import Path

import numpy as np

from gkp_tgate.cpg import best_per_n0, gain_search
from gkp_tgate.gkp import db_to_delta


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--db-min", type=float, default=2.0)
    ap.add_argument("--db-max", type=float, default=24.0)
    ap.add_argument("--db-step", type=float, default=2.0)
    ap.add_argument("--n0", type=int, nargs=2, default=(-3, 3))
    ap.add_argument("--n1", type=int, nargs=2, default=(-2, 3))
    ap.add_argument("--n2", type=int, nargs=2, default=(-1, 1))
    ap.add_argument("--origin", type=int, choices=(1, -1), default=1)
    ap.add_argument("--out", default="results/gain_search.csv")
    args = ap.parse_args()

    dbs = np.round(np.arange(args.db_min, args.db_max + 1e-9, args.db_step), 10).tolist()
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    table = {}
    with open(out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["squeezing_db", "origin", "n0", "n1", "n2", "fidelity"])
        for db in dbs:
            best = best_per_n0(gain_search(args.n0, args.n1, args.n2, db_to_delta(db), origin=args.origin))
            for n0 in sorted(best):
                r = best[n0]
                w.writerow([db, args.origin, r.n0, r.n1, r.n2, repr(r.fidelity)])
                table.setdefault(n0, []).append(r.fidelity)

    print("dB     " + "  ".join(f"n0={n0:+d}".rjust(8) for n0 in sorted(table)))
    for i, db in enumerate(dbs):
        print(f"{db:5.1f}  " + "  ".join(f"{table[n0][i]:8.4f}" for n0 in sorted(table)))
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
