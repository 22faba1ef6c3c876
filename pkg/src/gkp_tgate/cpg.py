"""T gate from a single (ideal) cubic phase gate plus Gaussian gates.

The gate is the position-diagonal phase
exp{i pi [c0 t^3 + c1 t^2 + c2 t]} with t = x / sqrt(pi). It acts as a
logical T on ideal GKP combs exactly when

    c0 = n0/6,  c1 = -n0/4 + n1/2,  c2 = n2 - n0/6,  -n0 + 2 n1 + 4 n2 = 1 (mod 8)

for integers (n0, n1, n2).
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .config import QuadratureConfig
from .errors import EmptyResultError, InvalidGainsError
from .gkp import PLUS, SQRT_PI, GkpWavefunction
from .modular import logical_dm_from_pure, logical_fidelity
from .tgate import t_target

DISTILLATION_THRESHOLD = 0.853


@dataclass(frozen=True)
class CpgGains:
    c0: float
    c1: float
    c2: float

    def __post_init__(self):
        if not all(math.isfinite(c) for c in (self.c0, self.c1, self.c2)):
            raise ValueError("gains must be finite")


@dataclass(frozen=True)
class IntegerGainTriple:
    n0: int
    n1: int
    n2: int

    @property
    def valid(self):
        return (-self.n0 + 2 * self.n1 + 4 * self.n2) % 8 == 1


GKP_GAINS = CpgGains(0.5, 0.25, -0.5)
OPTIMIZED_GAINS = CpgGains(-1 / 6, 0.25, 1 / 6)


def gains_from_integers(t):
    if not t.valid:
        raise InvalidGainsError(f"-n0 + 2 n1 + 4 n2 is not 1 mod 8 for {t}")
    return CpgGains(t.n0 / 6, -t.n0 / 4 + t.n1 / 2, t.n2 - t.n0 / 6)


@dataclass(frozen=True)
class ConditionReport:
    passed: bool
    failing_s: int | None = None
    failing_condition: str | None = None


def _is_integer(v, tol):
    return abs(v - round(v)) <= tol


def check_ideal_tgate_conditions(g, s_range=20, tol=1e-9):
    """Check the integer conditions on f(s), g(s) for |s| <= s_range and 4h = 1 (mod 8)."""
    if s_range < 2:
        raise ValueError("s_range must be >= 2")
    four_h = 4 * (g.c0 + g.c1 + g.c2)
    if not (_is_integer(four_h, tol) and (round(four_h) - 1) % 8 == 0):
        return ConditionReport(False, None, "4h = 1 (mod 8)")
    for s in itertools.chain.from_iterable((k, -k) for k in range(1, s_range + 1)):
        f = 4 * g.c0 * s**3 + 2 * g.c1 * s**2 + g.c2 * s
        if not _is_integer(f, tol):
            return ConditionReport(False, s, "f(s) integer")
        gs = 6 * g.c0 * s**2 + (3 * g.c0 + 2 * g.c1) * s
        if not _is_integer(gs, tol):
            return ConditionReport(False, s, "g(s) integer")
    return ConditionReport(True)


def cpg_phase(x, g):
    t = np.asarray(x, dtype=float) / SQRT_PI
    return np.pi * ((g.c0 * t + g.c1) * t + g.c2) * t


class CpgOutput:
    """Callable output wavefunction of the cubic-phase T gate on psi_delta."""

    def __init__(self, delta, g, amps=PLUS, envelope_floor=1e-14):
        self.gains = g
        self.psi = GkpWavefunction(amps, delta, envelope_floor)
        self.half_width = self.psi.half_width

    def __call__(self, x):
        return np.exp(1j * cpg_phase(x, self.gains)) * self.psi(x)


def cpg_output_wavefunction(x, delta, g, amps=PLUS):
    return CpgOutput(delta, g, amps)(x)


def cpg_logical_dm(delta, g, cfg=QuadratureConfig(), origin=1, amps=PLUS):
    return logical_dm_from_pure(CpgOutput(delta, g, amps, cfg.envelope_floor), cfg, origin)


def cpg_logical_fidelity(delta, g, cfg=QuadratureConfig(), origin=1, amps=PLUS):
    """Logical fidelity to T|psi> of the ideal cubic-phase gate output."""
    return logical_fidelity(cpg_logical_dm(delta, g, cfg, origin, amps), t_target(amps))


@dataclass(frozen=True)
class GainRow:
    n0: int
    n1: int
    n2: int
    c0: float
    c1: float
    c2: float
    fidelity: float


def _as_values(r):
    if isinstance(r, tuple) and len(r) == 2 and all(isinstance(v, (int, np.integer)) for v in r):
        return range(r[0], r[1] + 1)
    return r


def valid_triples(n0_range, n1_range, n2_range):
    """Admissible triples; a 2-tuple (lo, hi) means the inclusive range."""
    seen = sorted({(int(a), int(b), int(c)) for a in _as_values(n0_range)
                   for b in _as_values(n1_range) for c in _as_values(n2_range)})
    return [IntegerGainTriple(*t) for t in seen if IntegerGainTriple(*t).valid]


def gain_search(n0_range, n1_range, n2_range, delta, cfg=QuadratureConfig(), origin=1):
    """Evaluate every valid triple; rows sorted by decreasing fidelity."""
    triples = valid_triples(n0_range, n1_range, n2_range)
    if not triples:
        raise EmptyResultError("no valid (n0, n1, n2) in the given ranges")
    rows = []
    for t in triples:
        g = gains_from_integers(t)
        f = cpg_logical_fidelity(delta, g, cfg, origin)
        rows.append(GainRow(t.n0, t.n1, t.n2, g.c0, g.c1, g.c2, f))
    rows.sort(key=lambda r: (-r.fidelity, abs(r.n0), r.n0, r.n1, r.n2))
    return rows


def best_per_n0(rows):
    """Highest-fidelity row for each n0."""
    best = {}
    for r in rows:
        if r.n0 not in best or r.fidelity > best[r.n0].fidelity:
            best[r.n0] = r
    return dict(sorted(best.items()))


def classify_distillation(fidelity):
    return "above" if fidelity > DISTILLATION_THRESHOLD else "below"
