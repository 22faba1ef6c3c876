"""Exact bookkeeping of truncated ideal GKP combs through the T-gate circuit.

A comb stores complex amplitudes on lattice points ``index * step`` with
``step = sqrt(pi) * 2**(-level/2)``. Every sqrt(2) rescaling moves the
level, so positions never need float comparison. Dirac-comb Jacobians are
uniform and are ignored; comparisons are made up to a global factor.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import LatticeError
from .gkp import SQRT_PI, T_PHASE, LogicalAmplitudes


def lattice_step(level):
    return SQRT_PI * 2.0 ** (-level / 2)


def _lattice_index(x, level, tol=1e-9):
    idx = round(x / lattice_step(level))
    if abs(x - idx * lattice_step(level)) > tol * max(1.0, abs(x)):
        raise LatticeError(f"{x!r} is not on the level-{level} lattice")
    return idx


@dataclass
class IdealComb1:
    level: int
    amplitudes: dict = field(default_factory=dict)

    @property
    def step(self):
        return lattice_step(self.level)

    def positions(self):
        return {i: i * self.step for i in self.amplitudes}

    def norm_sq(self):
        return sum(abs(v) ** 2 for v in self.amplitudes.values())

    def is_zero(self):
        return not self.amplitudes

    def at_level(self, level):
        """Re-express on a coarser lattice (level lowered in steps of 2)."""
        if level > self.level or (self.level - level) % 2:
            raise LatticeError("can only coarsen by whole factors of 2")
        factor = 2 ** ((self.level - level) // 2)
        out = {}
        for i, v in self.amplitudes.items():
            if i % factor:
                raise LatticeError(f"index {i} has no image on level {level}")
            out[i // factor] = v
        return IdealComb1(level, out)


@dataclass
class IdealComb2:
    level: int
    amplitudes: dict = field(default_factory=dict)

    @property
    def step(self):
        return lattice_step(self.level)

    def norm_sq(self):
        return sum(abs(v) ** 2 for v in self.amplitudes.values())


def gkp_comb(amps, truncation):
    """a|0_L> + b|1_L> on the points n sqrt(pi), |n| <= 2*truncation + 1."""
    n_max = 2 * truncation + 1
    return IdealComb1(0, {n: complex(amps.a if n % 2 == 0 else amps.b) for n in range(-n_max, n_max + 1)})


def tensor(first, second):
    if first.level != second.level:
        raise LatticeError("modes live on incommensurate lattices")
    return IdealComb2(
        first.level,
        {(i, j): u * v for i, u in first.amplitudes.items() for j, v in second.amplitudes.items()},
    )


def beam_splitter_5050(state):
    """(x1, x2) -> ((-x1 + x2)/sqrt(2), (x1 + x2)/sqrt(2)); moves to level + 1."""
    return IdealComb2(
        state.level + 1,
        {(-i + j, i + j): v for (i, j), v in state.amplitudes.items()},
    )


def homodyne_x_condition(state, mode, q1):
    """Unnormalized comb left on the other mode after measuring x = q1.

    ``mode`` is 'A' (first slot) or 'in' (second slot). ``q1`` must lie on
    the state's lattice; an outcome without support gives the zero comb.
    """
    if mode not in ("A", "in"):
        raise ValueError("mode must be 'A' or 'in'")
    k = _lattice_index(q1, state.level)
    slot = 0 if mode == "A" else 1
    return IdealComb1(
        state.level,
        {key[1 - slot]: v for key, v in state.amplitudes.items() if key[slot] == k},
    )


def apply_usq(state):
    """x -> x / sqrt(2)."""
    return IdealComb1(state.level + 1, dict(state.amplitudes))


def apply_displacement_x(state, x0):
    k = _lattice_index(x0, state.level)
    return IdealComb1(state.level, {i + k: v for i, v in state.amplitudes.items()})


def apply_shear(state, kappa):
    """Multiply by exp(i kappa x^2 / 2)."""
    if float(kappa).is_integer() and state.level >= 0:
        # kappa x^2 / 2 = pi * kappa i^2 / 2^(level+1); reduce the numerator exactly mod 2^(level+2)
        period = 2 ** (state.level + 2)
        den = 2 ** (state.level + 1)
        phase = {i: (int(kappa) * i * i) % period for i in state.amplitudes}
        return IdealComb1(
            state.level,
            {i: v * complex(np.exp(1j * math.pi * phase[i] / den)) for i, v in state.amplitudes.items()},
        )
    s = state.step
    return IdealComb1(
        state.level,
        {i: v * complex(np.exp(0.5j * kappa * (i * s) ** 2)) for i, v in state.amplitudes.items()},
    )


def apply_t(state):
    """Logical T on a level-0 comb: odd sites pick up e^{i pi/4}."""
    if state.level != 0:
        raise LatticeError("logical T needs the sqrt(pi) lattice")
    return IdealComb1(0, {i: v * (T_PHASE if i % 2 else 1.0) for i, v in state.amplitudes.items()})


def run_branch(amps, truncation, q1_index):
    """Fig. 1(b) pipeline for one first-homodyne outcome q1 = q1_index * sqrt(pi/2).

    Returns the output comb on the sqrt(pi) lattice and the feedforward bit.
    """
    ancilla = gkp_comb(LogicalAmplitudes(1 / math.sqrt(2), T_PHASE / math.sqrt(2)), truncation)
    joint = beam_splitter_5050(tensor(ancilla, gkp_comb(amps, truncation)))
    q1 = q1_index * joint.step
    kappa = q1_index % 2
    out = homodyne_x_condition(joint, "A", q1)
    out = apply_usq(out)
    out = apply_displacement_x(out, q1 / math.sqrt(2))
    out = apply_shear(out, kappa)
    return out.at_level(0), kappa


def _interior(keys, shell):
    lo, hi = min(keys), max(keys)
    return [i for i in keys if lo + shell <= i <= hi - shell]


def branch_deviations(amps, truncation, shell=2):
    """Largest interior deviation from T|psi> per feedforward branch.

    Each outcome's comb is aligned to the expected one by the complex ratio
    at its largest-magnitude interior site (global phase and the uniform
    normalization both drop out).
    """
    if truncation < 4:
        warnings.warn(
            f"truncation {truncation} < 4: boundary shell covers most of the comb", stacklevel=2
        )
    expected = apply_t(gkp_comb(amps, truncation)).amplitudes
    n_max = 2 * truncation + 1
    worst = {0: 0.0, 1: 0.0}
    for k in range(-2 * n_max, 2 * n_max + 1):
        out, kap = run_branch(amps, truncation, k)
        if out.is_zero():
            continue
        sites = _interior(list(out.amplitudes), shell)
        if not sites:
            continue
        got = np.array([out.amplitudes[i] for i in sites])
        want = np.array([expected[i] for i in sites])
        ref = int(np.argmax(np.abs(got)))
        if abs(got[ref]) == 0:
            continue
        scale = want[ref] / got[ref]
        worst[kap] = max(worst[kap], float(np.max(np.abs(scale * got - want))))
    return worst


def verify_tgate_identity(amps, truncation, shell=2):
    """Maximum deviation of the comb-level circuit from T, over both branches."""
    return max(branch_deviations(amps, truncation, shell).values())
