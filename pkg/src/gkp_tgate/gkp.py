"""Approximate square-lattice GKP wavefunctions in the position basis.

Conventions: hbar = 1, so [x, p] = i. A peak of the approximate code word
sits at ``n * sqrt(pi)`` with amplitude profile ``exp(-(x - n sqrt(pi))^2 / (4 delta^2))``
and envelope weight ``exp(-pi n^2 delta^2)``; even ``n`` carry logical 0 and
odd ``n`` logical 1. All wavefunctions here are unnormalized evaluation
functions; normalization is left to the consumer.
"""

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss

from .config import QuadratureConfig
from .errors import DegenerateStateError

SQRT_PI = math.sqrt(math.pi)
T_PHASE = complex(math.cos(math.pi / 4), math.sin(math.pi / 4))

# relative amplitude below which a neighbouring peak is ignored
_PEAK_FLOOR = 1e-17


def delta_to_db(delta):
    """Squeezing level in dB of a peak with position variance ``delta**2``."""
    delta = np.asarray(delta, dtype=float)
    if np.any(delta <= 0):
        raise ValueError("delta must be positive")
    out = -10.0 * np.log10(2.0 * delta**2)
    return float(out) if out.ndim == 0 else out


def db_to_delta(db):
    """Inverse of :func:`delta_to_db`."""
    db = np.asarray(db, dtype=float)
    out = np.sqrt(10.0 ** (-db / 10.0) / 2.0)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class GkpParams:
    """Peak width ``delta`` of the GKP states and width ``sigma`` of the
    Gaussian ancilla. ``sigma = 0`` stands for the ideal x = 0 ancilla."""

    delta: float
    sigma: float = 0.0

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError("delta must be positive")
        if not self.sigma >= 0:
            raise ValueError("sigma must be non-negative")

    @classmethod
    def from_db(cls, db, sigma_db=None):
        delta = db_to_delta(db)
        sigma = 0.0 if sigma_db is None else db_to_delta(sigma_db)
        return cls(delta, sigma)

    @property
    def squeezing_db(self):
        return delta_to_db(self.delta)

    @property
    def sigma_db(self):
        return math.inf if self.sigma == 0 else delta_to_db(self.sigma)


@dataclass(frozen=True)
class LogicalAmplitudes:
    """Coefficients of |0_L> and |1_L>."""

    a: complex
    b: complex

    def normalized(self):
        norm = math.sqrt(abs(self.a) ** 2 + abs(self.b) ** 2)
        if norm == 0:
            raise DegenerateStateError("zero logical amplitudes")
        return LogicalAmplitudes(self.a / norm, self.b / norm)

    def vector(self):
        return np.array([self.a, self.b], dtype=complex)


ZERO = LogicalAmplitudes(1.0, 0.0)
ONE = LogicalAmplitudes(0.0, 1.0)
PLUS = LogicalAmplitudes(1 / math.sqrt(2), 1 / math.sqrt(2))
T_STATE = LogicalAmplitudes(1 / math.sqrt(2), T_PHASE / math.sqrt(2))


def peak_cutoff(delta, floor=1e-14):
    """Largest peak index whose envelope weight exp(-pi n^2 delta^2) exceeds ``floor``."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    return int(math.floor(math.sqrt(-math.log(floor) / (math.pi * delta**2))))


def gkp_basis_amplitude(bit, delta, x, s_max):
    """Unnormalized |0_delta> (bit 0) or |1_delta> (bit 1) wavefunction.

    Direct sum over the peaks ``n = 2s + bit`` with ``|n| <= 2*s_max + bit``,
    which keeps the truncated comb symmetric under x -> -x.
    """
    if bit not in (0, 1):
        raise ValueError("bit must be 0 or 1")
    if delta <= 0:
        raise ValueError("delta must be positive")
    if s_max < 1:
        raise ValueError("s_max must be >= 1")
    x = np.asarray(x, dtype=float)
    n = np.arange(-2 * s_max - bit, 2 * s_max + bit + 1)
    n = n[(n - bit) % 2 == 0]
    env = np.exp(-math.pi * n**2 * delta**2)
    gauss = np.exp(-((x[..., None] - n * SQRT_PI) ** 2) / (4 * delta**2))
    out = gauss @ env
    return float(out) if out.ndim == 0 else out


class GkpWavefunction:
    """Callable ``x -> a*psi_0(x) + b*psi_1(x)`` for an approximate GKP qubit.

    Peaks are truncated where the envelope drops below ``envelope_floor``;
    each evaluation point only sums the handful of peaks close enough to
    contribute above double precision.
    """

    def __init__(self, amps, delta, envelope_floor=1e-14, n_max=None):
        if delta <= 0:
            raise ValueError("delta must be positive")
        self.amps = amps
        self.delta = float(delta)
        self.n_max = peak_cutoff(delta, envelope_floor) if n_max is None else int(n_max)
        reach = 2 * self.delta * math.sqrt(-math.log(_PEAK_FLOOR))
        self._window = int(math.ceil(reach / SQRT_PI + 0.5))
        self.half_width = (self.n_max + 0.5) * SQRT_PI + reach

    def coefficients(self, n):
        """Peak weight of index ``n`` (zero beyond the cutoff)."""
        n = np.asarray(n)
        env = np.exp(-math.pi * n.astype(float) ** 2 * self.delta**2)
        logical = np.where(n % 2 == 0, complex(self.amps.a), complex(self.amps.b))
        return np.where(np.abs(n) <= self.n_max, env * logical, 0.0)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        centre = np.rint(x / SQRT_PI).astype(np.int64)
        out = np.zeros(x.shape, dtype=complex)
        for off in range(-self._window, self._window + 1):
            n = centre + off
            out += self.coefficients(n) * np.exp(-((x - n * SQRT_PI) ** 2) / (4 * self.delta**2))
        return out


def superposition_amplitude(amps, delta, x, envelope_floor=1e-14):
    """``a*psi_0(x) + b*psi_1(x)``, unnormalized."""
    return GkpWavefunction(amps, delta, envelope_floor)(x)


def squeezed_vacuum_amplitude(sigma, x):
    """Unnormalized squeezed vacuum ``exp(-x^2 / (4 sigma^2))``."""
    if sigma <= 0:
        raise ValueError("sigma must be positive; the sigma -> 0 limit is analytic")
    return np.exp(-np.asarray(x, dtype=float) ** 2 / (4 * sigma**2))


def squeezed_vacuum_norm(sigma):
    """Normalization constant (2 pi sigma^2)^(-1/4) of the squeezed vacuum."""
    return (2 * math.pi * sigma**2) ** -0.25


def normalization_constant(wavefunction, cfg=QuadratureConfig(), half_width=None):
    """N > 0 with N^2 * integral |psi|^2 dx = 1.

    The line is cut into bins of width sqrt(pi) centred on the lattice and
    each bin is integrated with ``cfg.u_nodes``-point Gauss-Legendre. The
    integration range comes from ``half_width`` or the wavefunction's own
    ``half_width`` attribute.
    """
    if half_width is None:
        half_width = getattr(wavefunction, "half_width", None)
    if half_width is None:
        raise ValueError("half_width required for wavefunctions without one")
    t, w = leggauss(cfg.u_nodes)
    nbins = int(math.ceil(half_width / SQRT_PI))
    centres = np.arange(-nbins, nbins + 1) * SQRT_PI
    x = centres[:, None] + 0.5 * SQRT_PI * t[None, :]
    total = float(np.sum(np.abs(wavefunction(x)) ** 2 * (0.5 * SQRT_PI * w)))
    if not total > 1e-300:
        raise DegenerateStateError("wavefunction has vanishing norm")
    return 1.0 / math.sqrt(total)
