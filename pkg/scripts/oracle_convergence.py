"""Grid-oracle fidelity under grid refinement, compared with the analytic value.

    python scripts/oracle_convergence.py --db 8 --dx 0.06 0.03 --half-width 16 32
"""
import argparse

from gkp_tgate.gkp import db_to_delta
from gkp_tgate.oracle import GridConfig, simulate_circuit
from gkp_tgate.tgate import tgate_logical_fidelity


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--db", type=float, default=8.0)
    ap.add_argument("--sigma", default="equal", help="'equal' or a numeric ancilla width")
    ap.add_argument("--dx", type=float, nargs="+", default=[0.06, 0.03])
    ap.add_argument("--half-width", type=float, nargs="+", default=[16.0, 32.0])
    args = ap.parse_args()
    if len(args.dx) != len(args.half_width):
        ap.error("--dx and --half-width need the same number of values")

    d = db_to_delta(args.db)
    sigma = d if args.sigma == "equal" else float(args.sigma)
    analytic = tgate_logical_fidelity(d, "equal" if args.sigma == "equal" else sigma)
    print(f"{args.db:g} dB  analytic F = {analytic:.8f}")
    prev = None
    for dx, hw in zip(args.dx, args.half_width):
        res = simulate_circuit(d, sigma, GridConfig(dx=dx, half_width=hw))
        f = res.fidelity()
        step = "" if prev is None else f"  change {abs(f - prev):.2e}"
        print(f"dx {dx:g}  X {hw:g}  F = {f:.8f}  |dF| {abs(f - analytic):.2e}  P {res.total_probability:.6f}{step}")
        prev = f


if __name__ == "__main__":
    main()
