import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gkp_tgate.combs import (
    IdealComb1,
    IdealComb2,
    apply_displacement_x,
    apply_shear,
    apply_t,
    apply_usq,
    beam_splitter_5050,
    branch_deviations,
    gkp_comb,
    homodyne_x_condition,
    lattice_step,
    run_branch,
    tensor,
    verify_tgate_identity,
)
from gkp_tgate.errors import LatticeError
from gkp_tgate.gkp import ONE, PLUS, SQRT_PI, T_PHASE, T_STATE, ZERO, LogicalAmplitudes

TRUNC = 8


def post_bs(amps=PLUS, truncation=TRUNC):
    return beam_splitter_5050(tensor(gkp_comb(T_STATE, truncation), gkp_comb(amps, truncation)))


def test_bs_point_map():
    s = IdealComb2(0, {(0, 0): 1.0, (1, 1): 1.0})
    out = beam_splitter_5050(s)
    step = out.step
    assert out.amplitudes[(0, 0)] == 1.0
    # (sqrt(pi), sqrt(pi)) -> (0, sqrt(2 pi))
    assert (0 * step, 2 * step) == pytest.approx((0.0, math.sqrt(2 * math.pi)))
    assert (0, 2) in out.amplitudes


def test_bs_output_term_by_term():
    """Every output point carries c_T(i) c_psi(j) of the input pair it came from."""
    amps = LogicalAmplitudes(0.6, 0.8j)
    t_comb, p_comb = gkp_comb(T_STATE, TRUNC), gkp_comb(amps, TRUNC)
    out = beam_splitter_5050(tensor(t_comb, p_comb))
    assert len(out.amplitudes) == len(t_comb.amplitudes) * len(p_comb.amplitudes)
    s0, s1 = lattice_step(0), out.step
    for i, ct in t_comb.amplitudes.items():
        for j, cp in p_comb.amplitudes.items():
            xa, xin = (-i * s0 + j * s0) / math.sqrt(2), (i * s0 + j * s0) / math.sqrt(2)
            key = (round(xa / s1), round(xin / s1))
            assert out.amplitudes[key] == pytest.approx(ct * cp, abs=1e-15)
    # four logical sectors: (T bit, input bit) -> a_T a, a_T b, b_T a, b_T b
    sectors = {}
    for (ka, kin), v in out.amplitudes.items():
        i, j = (kin - ka) // 2, (kin + ka) // 2
        sectors.setdefault((i % 2, j % 2), set()).add(complex(round(v.real, 12), round(v.imag, 12)))
    r2 = 1 / math.sqrt(2)
    expect = {(0, 0): r2 * 0.6, (0, 1): r2 * 0.8j, (1, 0): T_PHASE * r2 * 0.6, (1, 1): T_PHASE * r2 * 0.8j}
    for key, val in expect.items():
        assert sectors[key] == {complex(round(val.real, 12), round(val.imag, 12))}


def test_bs_preserves_norm():
    s = tensor(gkp_comb(T_STATE, 5), gkp_comb(LogicalAmplitudes(0.3, 0.7j), 5))
    assert beam_splitter_5050(s).norm_sq() == s.norm_sq()


def _interior(comb, shell=3):
    keys = sorted(comb.amplitudes)
    return keys[shell:-shell]


@pytest.mark.parametrize("k", [0, 2, -4])
def test_homodyne_kappa0_branch(k):
    """Even lattice outcome: a on even, e^{i pi/4} b on odd multiples of sqrt(2 pi), shifted by -q1."""
    joint = post_bs()
    q1 = k * joint.step
    out = homodyne_x_condition(joint, "A", q1)
    for idx in _interior(out):
        x = idx * out.step
        j = (x + q1) / math.sqrt(2 * math.pi)
        assert j == pytest.approx(round(j), abs=1e-12)
        parity = round(j) % 2
        want = (1 / math.sqrt(2)) * (PLUS.a if parity == 0 else T_PHASE * PLUS.b)
        assert out.amplitudes[idx] == pytest.approx(want, abs=1e-14)


@pytest.mark.parametrize("k", [1, -3, 5])
def test_homodyne_kappa1_branch(k):
    """Odd lattice outcome: e^{i pi/4} a on even and b on odd multiples."""
    joint = post_bs()
    q1 = k * joint.step
    out = homodyne_x_condition(joint, "A", q1)
    for idx in _interior(out):
        j = round((idx * out.step + q1) / math.sqrt(2 * math.pi))
        want = (1 / math.sqrt(2)) * (T_PHASE * PLUS.a if j % 2 == 0 else PLUS.b)
        assert out.amplitudes[idx] == pytest.approx(want, abs=1e-14)


def test_homodyne_outside_support_is_zero():
    joint = post_bs(truncation=4)
    out = homodyne_x_condition(joint, "A", 200 * joint.step)
    assert out.is_zero()


def test_homodyne_off_lattice_raises():
    with pytest.raises(LatticeError):
        homodyne_x_condition(post_bs(truncation=4), "A", 0.1)
    with pytest.raises(ValueError):
        homodyne_x_condition(post_bs(truncation=4), "B", 0.0)


def test_usq_and_displacement():
    c = IdealComb1(0, {1: 1.0, -2: 0.5j})
    u = apply_usq(c)
    assert u.level == 1 and u.step == pytest.approx(SQRT_PI / math.sqrt(2))
    d = apply_displacement_x(u, 3 * u.step)
    assert d.amplitudes == {4: 1.0, 1: 0.5j}
    with pytest.raises(LatticeError):
        apply_displacement_x(u, 0.123)


@settings(max_examples=30)
@given(st.floats(-3, 3), st.integers(0, 3))
def test_shear_preserves_magnitudes(kappa, level):
    c = IdealComb1(level, {i: complex(1 + 0.1 * i, -0.2 * i) for i in range(-9, 10)})
    s = apply_shear(c, kappa)
    for i in c.amplitudes:
        assert abs(s.amplitudes[i]) == pytest.approx(abs(c.amplitudes[i]), rel=1e-14)


def test_integer_shear_matches_float_phase():
    c = IdealComb1(1, {i: 1.0 for i in range(-6, 7)})
    s = apply_shear(c, 1)
    for i, v in s.amplitudes.items():
        assert v == pytest.approx(cmath.exp(0.5j * (i * c.step) ** 2), abs=1e-12)


def test_on_lattice_q1_gives_binary_kappa():
    joint = post_bs(truncation=4)
    for k in range(-20, 21):
        v = math.sqrt(2 / math.pi) * k * joint.step
        assert v == pytest.approx(round(v), abs=1e-12)
        assert round(v) % 2 in (0, 1)


def test_apply_t():
    out = apply_t(gkp_comb(PLUS, 2))
    assert out.amplitudes[1] == pytest.approx(T_PHASE / math.sqrt(2))
    assert out.amplitudes[2] == pytest.approx(1 / math.sqrt(2))


def test_run_branch_kappa_bit():
    for k in range(-5, 6):
        _, kap = run_branch(PLUS, 6, k)
        assert kap == k % 2


@pytest.mark.parametrize("amps", [ZERO, ONE, PLUS, T_STATE])
def test_both_branches_exact(amps):
    dev = branch_deviations(amps, TRUNC)
    assert dev[0] < 1e-10 and dev[1] < 1e-10


def test_zero_input_deviation():
    assert verify_tgate_identity(ZERO, TRUNC) < 1e-12


@settings(max_examples=20, deadline=None)
@given(st.floats(0, math.pi / 2), st.floats(0, 2 * math.pi))
def test_random_inputs_exact(t, phi):
    amps = LogicalAmplitudes(math.cos(t), cmath.exp(1j * phi) * math.sin(t))
    assert verify_tgate_identity(amps, 6) < 1e-10


def test_deviation_non_increasing_in_truncation():
    devs = [verify_tgate_identity(T_STATE, n) for n in (4, 6, 8, 10)]
    for a, b in zip(devs, devs[1:]):
        assert b <= max(a, 1e-15) * (1 + 1e-9) or b < 1e-14


def test_small_truncation_warns():
    with pytest.warns(UserWarning, match="truncation"):
        verify_tgate_identity(PLUS, 2)


def test_mismatched_levels():
    with pytest.raises(LatticeError):
        tensor(IdealComb1(0, {0: 1}), IdealComb1(1, {0: 1}))
    with pytest.raises(LatticeError):
        apply_t(IdealComb1(1, {0: 1}))


def test_coarsening_rejects_off_lattice():
    c = IdealComb1(1, {1: 1.0})
    with pytest.raises(LatticeError):
        c.at_level(0)
    assert IdealComb1(2, {2: 1.0}).at_level(0).amplitudes == {1: 1.0}
    assert np.isclose(IdealComb1(2, {4: 1.0}).at_level(0).step, SQRT_PI)
