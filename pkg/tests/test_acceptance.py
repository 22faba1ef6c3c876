"""Acceptance criteria, one test per criterion.

Each test records a PASS/FAIL verdict that is printed in the terminal summary.
"""
import csv
import io
import math
from functools import lru_cache

import numpy as np
import pytest

from gkp_tgate.cli import main
from gkp_tgate.combs import branch_deviations
from gkp_tgate.cpg import (
    DISTILLATION_THRESHOLD,
    OPTIMIZED_GAINS,
    CpgGains,
    IntegerGainTriple,
    check_ideal_tgate_conditions,
    classify_distillation,
    cpg_output_wavefunction,
    gain_search,
    gains_from_integers,
)
from gkp_tgate.gkp import ONE, PLUS, T_STATE, ZERO, GkpWavefunction, db_to_delta
from gkp_tgate.modular import decompose_positions, logical_fidelity, reconstruct_positions
from gkp_tgate.oracle import GridConfig, simulate_circuit
from gkp_tgate.tgate import kappa, t_target, tgate_logical_dm, tgate_logical_fidelity

SEARCH = ((-3, 3), (-2, 3), (-1, 1))


def sweep(capsys, *args):
    code = main(["fidelity-sweep", *args])
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    return code, rows


@lru_cache(maxsize=None)
def oracle_run(db, sigma, dx, half_width):
    d = db_to_delta(db)
    return simulate_circuit(d, d if sigma is None else sigma, GridConfig(dx=dx, half_width=half_width))


@pytest.mark.criterion(1, "threshold F > 0.90 at 10 dB")
def test_c01_threshold_at_10db(capsys, acceptance):
    fs = {}
    for mode in ("equal", "ideal"):
        code, rows = sweep(capsys, "--db-list", "10", "--gate", "proposed", "--sigma-mode", mode)
        assert code == 0
        fs[mode] = float(rows[0]["fidelity"])
    ok = all(f > 0.90 for f in fs.values())
    assert acceptance.record(1, "threshold F > 0.90 at 10 dB", ok,
                             f"equal {fs['equal']:.5f}, ideal {fs['ideal']:.5f}")


@pytest.mark.criterion(2, "ideal ancilla dominates")
def test_c02_ideal_dominates(acceptance):
    gaps = {}
    for db in (4, 6, 8, 10, 12, 14):
        d = db_to_delta(db)
        gaps[db] = tgate_logical_fidelity(d, "ideal") - tgate_logical_fidelity(d, "equal")
    ok = all(g >= -1e-6 for g in gaps.values())
    assert acceptance.record(2, "ideal ancilla dominates", ok, f"min F(ideal) - F(equal) = {min(gaps.values()):.3e}")


@pytest.mark.criterion(3, "approach to unity")
def test_c03_approach_to_unity(acceptance):
    fs = [tgate_logical_fidelity(db_to_delta(db), "ideal") for db in (6, 10, 14, 18)]
    ok = fs[-1] > 0.98 and all(a < b for a, b in zip(fs, fs[1:]))
    assert acceptance.record(3, "approach to unity", ok, "F = " + ", ".join(f"{f:.5f}" for f in fs))


@pytest.mark.criterion(4, "CPG with GKP gains saturates near 0.78")
def test_c04_cpg_gkp(capsys, acceptance):
    code, rows = sweep(capsys, "--db-list", "20", "--gate", "cpg-gkp")
    f = float(rows[0]["fidelity"])
    assert acceptance.record(4, "CPG with GKP gains saturates near 0.78", code == 0 and abs(f - 0.78) <= 0.02,
                             f"F(20 dB) = {f:.5f}")


@pytest.mark.criterion(5, "optimized CPG near 0.95 and above distillation")
def test_c05_cpg_optimized(capsys, acceptance):
    code, rows = sweep(capsys, "--db-list", "20", "--gate", "cpg-optimized")
    f = float(rows[0]["fidelity"])
    gains_ok = (OPTIMIZED_GAINS.c0, OPTIMIZED_GAINS.c1, OPTIMIZED_GAINS.c2) == pytest.approx(
        (-1 / 6, 1 / 4, 1 / 6), abs=1e-15)
    ok = code == 0 and gains_ok and abs(f - 0.95) <= 0.02 and classify_distillation(f) == "above"
    ok = ok and f > DISTILLATION_THRESHOLD
    assert acceptance.record(5, "optimized CPG near 0.95 and above distillation", ok,
                             f"F(20 dB) = {f:.5f}, {classify_distillation(f)}")


@pytest.mark.criterion(6, "gain search optimum at |n0| = 1")
def test_c06_gain_search(acceptance):
    rows = gain_search(*SEARCH, db_to_delta(20))
    top = rows[0]
    mapped = gains_from_integers(IntegerGainTriple(3, 2, 0))
    ok = abs(top.n0) == 1 and mapped == CpgGains(0.5, 0.25, -0.5)
    assert acceptance.record(6, "gain search optimum at |n0| = 1", ok,
                             f"top ({top.n0},{top.n1},{top.n2}) F = {top.fidelity:.5f}; (3,2,0) -> "
                             f"({mapped.c0:g},{mapped.c1:g},{mapped.c2:g})")


@pytest.mark.criterion(7, "integer-condition suite")
def test_c07_integer_conditions(acceptance):
    mismatches, n_valid = [], 0
    for n0 in range(SEARCH[0][0], SEARCH[0][1] + 1):
        for n1 in range(SEARCH[1][0], SEARCH[1][1] + 1):
            for n2 in range(SEARCH[2][0], SEARCH[2][1] + 1):
                t = IntegerGainTriple(n0, n1, n2)
                g = CpgGains(n0 / 6, -n0 / 4 + n1 / 2, n2 - n0 / 6)
                n_valid += t.valid
                if check_ideal_tgate_conditions(g, s_range=20).passed != t.valid:
                    mismatches.append((n0, n1, n2))
    zero_ok = not any(IntegerGainTriple(0, a, b).valid for a in range(-20, 21) for b in range(-20, 21))
    ok = not mismatches and zero_ok and n_valid > 0
    assert acceptance.record(7, "integer-condition suite", ok,
                             f"{n_valid} valid triples, {len(mismatches)} mismatches, n0 = 0 empty: {zero_ok}")


@pytest.mark.criterion(8, "comb-level exactness")
def test_c08_comb_exactness(capsys, acceptance):
    worst = {0: 0.0, 1: 0.0}
    for amps in (ZERO, ONE, PLUS, T_STATE):
        dev = branch_deviations(amps, 8)
        for k in worst:
            worst[k] = max(worst[k], dev[k])
    code = main(["comb-verify", "--truncation", "8"])
    capsys.readouterr()
    ok = code == 0 and max(worst.values()) < 1e-10
    assert acceptance.record(8, "comb-level exactness", ok,
                             f"max deviation kappa=0 {worst[0]:.2e}, kappa=1 {worst[1]:.2e}")


@pytest.mark.criterion(9, "grid oracle agrees with analytic fidelity")
def test_c09_oracle_equivalence(acceptance):
    cases = [(8, None, "equal", 0.06, 16.0), (10, 1e-3, "ideal", 0.05, None)]
    diffs = []
    for db, sigma, mode, dx, hw in cases:
        grid = oracle_run(db, sigma, dx, hw).fidelity()
        diffs.append(abs(grid - tgate_logical_fidelity(db_to_delta(db), mode)))
    ok = max(diffs) < 1e-3
    assert acceptance.record(9, "grid oracle agrees with analytic fidelity", ok,
                             f"|dF| 8 dB {diffs[0]:.2e}, 10 dB {diffs[1]:.2e}")


@pytest.mark.criterion(10, "property suites and grid convergence")
def test_c10_properties(acceptance):
    rng = np.random.default_rng(2024)
    x = rng.uniform(-60, 60, 100_000)
    recon = max(float(np.max(np.abs(reconstruct_positions(*decompose_positions(x, o), o) - x))) for o in (1, -1))
    q1 = rng.uniform(-50, 50, 10_000)
    periodic = np.array_equal(kappa(q1 + math.sqrt(2 * math.pi)), kappa(q1))

    dm_ok = True
    for db in (6, 12):
        for mode in ("equal", "ideal"):
            rho = tgate_logical_dm(db_to_delta(db), mode)
            f = logical_fidelity(rho, t_target(PLUS))
            dm_ok &= (rho.is_hermitian(1e-12) and abs(rho.trace - 1) < 1e-12
                      and min(rho.eigenvalues()) > -1e-8 and 0 <= f <= 1)

    xs = rng.uniform(-25, 25, 10_000)
    d = db_to_delta(12)
    phase_ok = np.allclose(np.abs(cpg_output_wavefunction(xs, d, OPTIMIZED_GAINS)),
                           np.abs(GkpWavefunction(PLUS, d)(xs)), rtol=1e-12, atol=1e-300)

    coarse = oracle_run(8, None, 0.06, 16.0).fidelity()
    fine = oracle_run(8, None, 0.03, 32.0).fidelity()
    change = abs(fine - coarse)

    ok = recon < 1e-12 and periodic and dm_ok and phase_ok and change < 3e-4
    assert acceptance.record(10, "property suites and grid convergence", ok,
                             f"reconstruction {recon:.1e}, kappa periodic {periodic}, dm invariants {dm_ok}, "
                             f"|psi| preserved {phase_ok}, grid change {change:.1e}")
