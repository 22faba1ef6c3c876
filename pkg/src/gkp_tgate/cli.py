"""Command-line driver: fidelity sweeps, gain search, oracle cross-checks, comb verification.

Every subcommand accepts ``--config FILE`` with flat ``key = value`` lines
(keys are flag names without the leading dashes); flags given on the
command line win over the file.
"""

import argparse
import csv
import io
import json
import math
import os
import sys
import time
import warnings
from dataclasses import asdict, replace
from fractions import Fraction

import numpy as np

from . import __version__
from .combs import verify_tgate_identity
from .config import QuadratureConfig
from .cpg import (
    GKP_GAINS,
    OPTIMIZED_GAINS,
    CpgGains,
    classify_distillation,
    cpg_logical_dm,
    gain_search,
)
from .errors import AccuracyError, EmptyResultError, GridError, InvalidGainsError
from .gkp import ONE, PLUS, T_STATE, ZERO, LogicalAmplitudes, db_to_delta
from .modular import logical_fidelity
from .oracle import GridConfig, simulate_circuit
from .tgate import fidelity_sweep, row_from_dm, tgate_logical_fidelity

WORKERS_ENV = "GKP_TGATE_WORKERS"
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_EMPTY, EXIT_ACCURACY = 0, 1, 2, 3, 4
SWEEP_COLUMNS = ["squeezing_db", "gate", "sigma_mode", "fidelity",
                 "rho00_re", "rho11_re", "rho01_re", "rho01_im", "est_error"]
SEARCH_COLUMNS = ["squeezing_db", "n0", "n1", "n2", "c0", "c1", "c2",
                  "fidelity", "above_distillation_threshold"]


class UsageError(Exception):
    pass


def _number(text):
    return float(Fraction(text.strip())) if "/" in text else float(text)


def parse_db_list(text):
    vals = [_number(t) for t in str(text).replace(";", ",").split(",") if t.strip()]
    if not vals:
        raise UsageError("empty dB list")
    return vals


def db_values(args):
    if args.db_list is not None:
        return parse_db_list(args.db_list)
    if args.db_min is None or args.db_max is None:
        raise UsageError("give --db-list or both --db-min and --db-max")
    if args.db_step <= 0 or args.db_max < args.db_min:
        raise UsageError("need --db-step > 0 and --db-max >= --db-min")
    n = int(math.floor((args.db_max - args.db_min) / args.db_step + 1e-9)) + 1
    return [round(args.db_min + i * args.db_step, 10) for i in range(n)]


def parse_gate(text):
    """'proposed', 'cpg-gkp', 'cpg-optimized' or 'cpg-custom:c0,c1,c2' (fractions allowed)."""
    if text == "proposed":
        return "proposed", None
    if text == "cpg-gkp":
        return text, GKP_GAINS
    if text == "cpg-optimized":
        return text, OPTIMIZED_GAINS
    if text.startswith("cpg-custom:"):
        parts = text.split(":", 1)[1].split(",")
        try:
            vals = [_number(p) for p in parts]
        except (ValueError, ZeroDivisionError):
            raise UsageError(f"cannot parse gains in {text!r}") from None
        if len(vals) != 3:
            raise UsageError(f"cpg-custom needs three gains, got {len(vals)}")
        return text, CpgGains(*vals)
    raise UsageError(f"unknown gate {text!r}")


def parse_sigma_mode(text):
    if text in ("equal", "ideal"):
        return text
    if text.startswith("value:"):
        try:
            sigma = float(text.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"cannot parse sigma in {text!r}") from None
        if sigma < 0:
            raise UsageError("sigma must be non-negative")
        return sigma
    raise UsageError(f"unknown sigma mode {text!r}")


def parse_int_range(text):
    """'lo:hi' (inclusive) or a comma list."""
    text = str(text).strip()
    try:
        if ":" in text:
            lo, hi = (int(t) for t in text.split(":"))
            return list(range(lo, hi + 1))
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"cannot parse integer range {text!r}") from None


def load_config_file(path):
    """Flat key = value file, or a run manifest (its recorded parameters are replayed)."""
    if path.endswith(".json"):
        with open(path) as fh:
            params = json.load(fh).get("parameters", {})
        return {k: (str(v).lower() if isinstance(v, bool) else str(v))
                for k, v in params.items() if v is not None and k not in ("command", "out")}
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key = value")
            key, val = (s.strip() for s in line.split("=", 1))
            values[key.replace("-", "_")] = val
    return values


def quadrature_config(args):
    cfg = QuadratureConfig()
    overrides = {k: getattr(args, k) for k in
                 ("u_nodes", "x3_order", "q1_nodes", "tolerance", "max_refinements", "q1_method")
                 if getattr(args, k, None) is not None}
    try:
        return replace(cfg, **overrides)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def workers():
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None
    return max(1, n)


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_csv(rows, columns, out):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in columns])
    text = buf.getvalue()
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def write_manifest(out, command, params, wall_time, extra=None):
    if out is None or out == "-":
        return None
    manifest = {
        "command": command,
        "parameters": params,
        "tool_version": __version__,
        "wall_time_s": round(wall_time, 3),
    }
    if extra:
        manifest.update(extra)
    path = out + ".manifest.json"
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")
    return path


def _params(args):
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "config")}


def _cpg_row(db, g, cfg, strict):
    delta = db_to_delta(db)
    try:
        rho = cpg_logical_dm(delta, g, cfg)
    except AccuracyError as exc:
        if strict:
            raise
        rho = exc.estimate
    return row_from_dm(db, rho, T_STATE, cfg.tolerance)


def cmd_fidelity_sweep(args):
    dbs = sorted(db_values(args))
    gate, gains = parse_gate(args.gate)
    sigma_mode = parse_sigma_mode(args.sigma_mode)
    cfg = quadrature_config(args)
    t0 = time.perf_counter()
    if gate == "proposed":
        rows = fidelity_sweep(dbs, sigma_mode, cfg, workers=workers())
    else:
        rows = [_cpg_row(db, gains, cfg, args.strict) for db in dbs]
    flagged = [r.squeezing_db for r in rows if r.flagged]
    if flagged:
        msg = f"accuracy target {cfg.tolerance:g} missed at dB {flagged}"
        if args.strict:
            print(f"error: {msg}", file=sys.stderr)
            return EXIT_ACCURACY
        print(f"warning: {msg}; see est_error", file=sys.stderr)
    out_rows = [{
        "squeezing_db": r.squeezing_db, "gate": gate, "sigma_mode": args.sigma_mode,
        "fidelity": r.fidelity, "rho00_re": r.rho00, "rho11_re": r.rho11,
        "rho01_re": r.rho01.real, "rho01_im": r.rho01.imag, "est_error": r.est_error,
    } for r in sorted(rows, key=lambda r: r.squeezing_db)]
    write_csv(out_rows, SWEEP_COLUMNS, args.out)
    write_manifest(args.out, "fidelity-sweep", _params(args), time.perf_counter() - t0,
                   {"quadrature": asdict(cfg), "flagged_db": flagged})
    return EXIT_OK


def cmd_cpg_search(args):
    dbs = sorted(db_values(args))
    n0, n1, n2 = (parse_int_range(r) for r in (args.n0_range, args.n1_range, args.n2_range))
    cfg = quadrature_config(args)
    t0 = time.perf_counter()
    out_rows = []
    for db in dbs:
        for r in gain_search(n0, n1, n2, db_to_delta(db), cfg):
            out_rows.append({
                "squeezing_db": db, "n0": r.n0, "n1": r.n1, "n2": r.n2,
                "c0": r.c0, "c1": r.c1, "c2": r.c2, "fidelity": r.fidelity,
                "above_distillation_threshold": classify_distillation(r.fidelity) == "above",
            })
    write_csv(out_rows, SEARCH_COLUMNS, args.out)
    write_manifest(args.out, "cpg-search", _params(args), time.perf_counter() - t0,
                   {"quadrature": asdict(cfg)})
    return EXIT_OK


def cmd_cpg_fidelity(args):
    dbs = sorted(db_values(args))
    gate, gains = parse_gate(args.gate)
    if gains is None:
        raise UsageError("cpg-fidelity needs a cpg-* gate")
    cfg = quadrature_config(args)
    for db in dbs:
        rho = cpg_logical_dm(db_to_delta(db), gains, cfg)
        f = logical_fidelity(rho, T_STATE)
        print(f"{db:g} dB  {gate}  F = {f:.6f}  ({classify_distillation(f)} distillation threshold)")
    return EXIT_OK


def cmd_oracle_check(args):
    dbs = parse_db_list(args.db_list)
    sigma_mode = parse_sigma_mode(args.sigma_mode)
    grid = GridConfig(dx=args.dx, half_width=args.half_width, q1_nodes=args.grid_q1_nodes,
                      q2_points=args.q2_points)
    worst = 0.0
    for db in dbs:
        delta = db_to_delta(db)
        analytic = tgate_logical_fidelity(delta, sigma_mode)
        if sigma_mode == "equal":
            grid_sigma = delta
        elif sigma_mode == "ideal":
            grid_sigma = args.ideal_sigma
        else:
            grid_sigma = sigma_mode
        try:
            res = simulate_circuit(delta, grid_sigma, grid)
        except GridError as exc:
            print(f"FAIL {db:g} dB: {exc}")
            return EXIT_FAIL
        df = abs(res.fidelity() - analytic)
        worst = max(worst, df)
        print(f"{db:g} dB  analytic {analytic:.8f}  grid {res.fidelity():.8f}  "
              f"|dF| {df:.2e}  P_total {res.total_probability:.6f}")
    ok = worst < args.tol
    print(f"max |dF| = {worst:.3e}  tol {args.tol:g}  {'PASS' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_FAIL


def _verify_inputs(n_angles):
    states = [("0", ZERO), ("1", ONE), ("+", PLUS), ("T", T_STATE)]
    for i in range(n_angles):
        t = math.pi * (i + 0.5) / (2 * n_angles)
        for j, phi in enumerate((0.3, 1.9)):
            states.append((f"grid{i}.{j}", LogicalAmplitudes(math.cos(t), np.exp(1j * phi) * math.sin(t))))
    return states


def cmd_comb_verify(args):
    worst = 0.0
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        for label, amps in _verify_inputs(args.angles):
            dev = verify_tgate_identity(amps, args.truncation, args.shell)
            worst = max(worst, dev)
            print(f"input {label:8s} max deviation {dev:.3e}")
    for msg in sorted({str(w.message) for w in caught}):
        print(f"warning: {msg}", file=sys.stderr)
    ok = worst < args.tol
    print(f"max deviation = {worst:.3e}  tol {args.tol:g}  {'PASS' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_FAIL


def _add_db_flags(p):
    p.add_argument("--db-list", help="comma-separated squeezing levels in dB")
    p.add_argument("--db-min", type=float)
    p.add_argument("--db-max", type=float)
    p.add_argument("--db-step", type=float, default=1.0)


def _add_quadrature_flags(p):
    g = p.add_argument_group("quadrature overrides")
    g.add_argument("--u-nodes", type=int)
    g.add_argument("--x3-order", type=int)
    g.add_argument("--q1-nodes", type=int)
    g.add_argument("--tolerance", type=float)
    g.add_argument("--max-refinements", type=int)
    g.add_argument("--q1-method", choices=["closed", "cells"])


def build_parser():
    parser = argparse.ArgumentParser(
        prog="gkp-tgate",
        description="Logical fidelities of GKP T-gate implementations.",
        epilog=f"Worker count for sweeps: ${WORKERS_ENV} (default 1). "
               "Pass negative ranges with '=', e.g. --n0-range=-3:3.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fidelity-sweep", help="fidelity vs squeezing, CSV output")
    _add_db_flags(p)
    p.add_argument("--gate", default="proposed",
                   help="proposed | cpg-gkp | cpg-optimized | cpg-custom:c0,c1,c2")
    p.add_argument("--sigma-mode", default="equal", help="equal | ideal | value:SIGMA")
    p.add_argument("--out", help="CSV path (default stdout); a .manifest.json is written next to it")
    p.add_argument("--strict", action="store_true", help="exit 4 on a missed accuracy target")
    _add_quadrature_flags(p)
    p.set_defaults(func=cmd_fidelity_sweep)

    p = sub.add_parser("cpg-search", help="scan integer gain triples, CSV output")
    p.add_argument("--n0-range", default="-3:3")
    p.add_argument("--n1-range", default="-2:3")
    p.add_argument("--n2-range", default="-1:1")
    _add_db_flags(p)
    p.add_argument("--out")
    _add_quadrature_flags(p)
    p.set_defaults(func=cmd_cpg_search)

    p = sub.add_parser("cpg-fidelity", help="fidelity of one cubic-phase gate setting")
    _add_db_flags(p)
    p.add_argument("--gate", default="cpg-optimized")
    _add_quadrature_flags(p)
    p.set_defaults(func=cmd_cpg_fidelity)

    p = sub.add_parser("oracle-check", help="analytic vs brute-force grid simulation")
    p.add_argument("--db-list", default="8")
    p.add_argument("--sigma-mode", default="equal", help="equal | ideal | value:SIGMA")
    p.add_argument("--ideal-sigma", type=float, default=1e-3,
                   help="ancilla width used by the grid when --sigma-mode ideal")
    p.add_argument("--dx", type=float, default=0.04)
    p.add_argument("--half-width", type=float)
    p.add_argument("--grid-q1-nodes", type=int, default=24)
    p.add_argument("--q2-points", type=int, default=241)
    p.add_argument("--tol", type=float, default=1e-3)
    p.set_defaults(func=cmd_oracle_check)

    p = sub.add_parser("comb-verify", help="exact comb-level check of the circuit identity")
    p.add_argument("--truncation", type=int, default=8)
    p.add_argument("--shell", type=int, default=2)
    p.add_argument("--angles", type=int, default=3, help="extra (a, b) grid points per phase")
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(func=cmd_comb_verify)

    for sp in sub.choices.values():
        sp.add_argument("--config", help="key = value file supplying any flag")
    return parser


def _apply_config(parser, args, argv):
    values = load_config_file(args.config)
    sp = parser._subparsers._group_actions[0].choices[args.command]
    known = {a.dest: a for a in sp._actions}
    defaults = {}
    for key, val in values.items():
        if key not in known or key in ("help", "config"):
            raise UsageError(f"unknown config key {key!r} for {args.command}")
        action = known[key]
        if isinstance(action, argparse._StoreTrueAction):
            defaults[key] = val.lower() in ("1", "true", "yes", "on")
        else:
            defaults[key] = val
    sp.set_defaults(**defaults)
    return parser.parse_args(argv)


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "config", None):
            args = _apply_config(parser, args, argv)
        return args.func(args)
    except (UsageError, InvalidGainsError) as exc:
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except EmptyResultError as exc:
        print(f"{parser.prog} {args.command}: {exc}", file=sys.stderr)
        return EXIT_EMPTY
    except AccuracyError as exc:
        print(f"{parser.prog} {args.command}: {exc}", file=sys.stderr)
        return EXIT_ACCURACY


if __name__ == "__main__":
    sys.exit(main())
