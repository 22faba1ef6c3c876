"""Modular subsystem decomposition of a position-quadrature mode.

A position x is split as x = sqrt(pi) * (2*m_tilde + l) + u_tilde with a
logical bit l, an integer gauge index m_tilde and a fractional part
u_tilde in [-sqrt(pi)/2, sqrt(pi)/2). Tracing out the gauge mode
(m_tilde, u_tilde) gives a 2x2 logical density matrix.

``origin=-1`` selects the mirrored gauge origin in which |1>_L (x) |0,0>_G
sits at x = -sqrt(pi) instead of +sqrt(pi).
"""

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss

from .config import QuadratureConfig
from .errors import AccuracyError, DegenerateStateError, NonHermitianError
from .gkp import SQRT_PI

HALF_BIN = 0.5 * SQRT_PI


@dataclass(frozen=True)
class ModularCoords:
    l: int
    m_tilde: int
    u_tilde: float

    def position(self, origin=1):
        return SQRT_PI * (2 * self.m_tilde + origin * self.l) + self.u_tilde


def _check_origin(origin):
    if origin not in (1, -1):
        raise ValueError("origin must be +1 or -1")


def decompose_positions(x, origin=1):
    """Vectorized decomposition; returns integer arrays (l, m_tilde) and float u_tilde."""
    _check_origin(origin)
    x = np.asarray(x, dtype=float)
    m = np.floor(x / SQRT_PI + 0.5).astype(np.int64)
    u = x - SQRT_PI * m
    # float rounding of x/sqrt(pi) can land one bin off at the edges
    hi = u >= HALF_BIN
    lo = u < -HALF_BIN
    m = m + hi - lo
    u = np.where(hi | lo, x - SQRT_PI * m, u)
    # x within an ulp of an edge can fall outside both neighbouring bins;
    # edges belong to the upper bin with u = -sqrt(pi)/2
    up = u >= HALF_BIN
    m = m + up
    u = np.where(up | (u < -HALF_BIN), -HALF_BIN, u)
    l = np.mod(m, 2)
    m_tilde = (m - origin * l) // 2
    return l, m_tilde, u


def decompose_position(x, origin=1):
    l, m_tilde, u = decompose_positions(float(x), origin)
    return ModularCoords(int(l), int(m_tilde), float(u))


def reconstruct_positions(l, m_tilde, u_tilde, origin=1):
    _check_origin(origin)
    return SQRT_PI * (2 * np.asarray(m_tilde) + origin * np.asarray(l)) + u_tilde


@dataclass(frozen=True)
class LogicalDensityMatrix:
    """2x2 logical density matrix; ``error`` carries the quadrature error estimate."""

    matrix: np.ndarray
    error: float = 0.0

    @classmethod
    def from_elements(cls, r00, r11, r01, error=0.0):
        """Build from the two diagonal entries and rho_01; rho_10 = conj(rho_01)."""
        m = np.array(
            [[complex(r00.real, 0.0), r01], [np.conj(r01), complex(r11.real, 0.0)]],
            dtype=complex,
        )
        return cls(m, error)

    @property
    def trace(self):
        return float(np.real(np.trace(self.matrix)))

    def normalized(self):
        tr = self.trace
        if not abs(tr) > 1e-300:
            raise DegenerateStateError("logical density matrix has zero trace")
        return LogicalDensityMatrix(self.matrix / tr, self.error)

    def eigenvalues(self):
        return np.linalg.eigvalsh(self.matrix)

    def is_hermitian(self, tol=1e-12):
        return bool(np.max(np.abs(self.matrix - self.matrix.conj().T)) <= tol)

    def __getitem__(self, idx):
        return self.matrix[idx]


class ModularGrid:
    """Quadrature points (2*m_tilde + zeta) sqrt(pi) + u_j for zeta in {0, 1}.

    ``points`` has shape (2, M, J) over (zeta, m_tilde, node) and ``weights``
    shape (J,) are Gauss-Legendre weights for the u_tilde integral over one bin.
    """

    def __init__(self, m_tilde_max, u_nodes, origin=1):
        _check_origin(origin)
        t, w = leggauss(u_nodes)
        self.m_tilde = np.arange(-m_tilde_max, m_tilde_max + 1)
        self.u = HALF_BIN * t
        self.weights = HALF_BIN * w
        self.origin = origin
        zeta = np.array([0, 1])
        self.points = (
            SQRT_PI * (2 * self.m_tilde[None, :, None] + origin * zeta[:, None, None])
            + self.u[None, None, :]
        )

    @classmethod
    def covering(cls, half_width, u_nodes, origin=1):
        return cls(int(math.ceil(half_width / (2 * SQRT_PI))) + 1, u_nodes, origin)

    @property
    def flat_points(self):
        return self.points.reshape(-1)


def logical_elements(values, weights):
    """rho_{zeta eta} = sum_{m, j} w_j v[zeta, m, j] conj(v[eta, m, j]).

    ``values`` has leading axis zeta of size 2; further leading axes (before
    the last two) are summed as independent samples.
    """
    v = np.asarray(values)
    wv = v * weights
    r00 = np.sum(wv[0] * v[0].conj()).real
    r11 = np.sum(wv[1] * v[1].conj()).real
    r01 = np.sum(wv[0] * v[1].conj())
    return r00, r11, r01


def _dm_from_pure(wavefunction, grid):
    vals = wavefunction(grid.points)
    r00, r11, r01 = logical_elements(vals, grid.weights)
    return LogicalDensityMatrix.from_elements(r00, r11, r01)


def logical_dm_from_pure(wavefunction, cfg=QuadratureConfig(), origin=1, half_width=None):
    """Trace-normalized logical density matrix of a pure state.

    The u_tilde integral is repeated at doubled Gauss-Legendre order until
    two successive levels agree to ``cfg.tolerance`` elementwise (at most
    ``cfg.max_refinements`` doublings); the last difference is the error
    estimate.
    """
    if half_width is None:
        half_width = getattr(wavefunction, "half_width", None)
    if half_width is None:
        raise ValueError("half_width required for wavefunctions without one")

    def at(order):
        grid = ModularGrid.covering(half_width, order, origin)
        return _dm_from_pure(wavefunction, grid).normalized()

    order = cfg.u_nodes
    prev = at(order)
    for _ in range(cfg.max_refinements):
        order *= 2
        cur = at(order)
        err = float(np.max(np.abs(cur.matrix - prev.matrix)))
        if err <= cfg.tolerance:
            return LogicalDensityMatrix(cur.matrix, err)
        prev = cur
    result = LogicalDensityMatrix(cur.matrix, err)
    raise AccuracyError(
        f"u-quadrature disagreement {err:.3e} exceeds {cfg.tolerance:.1e}", result, err
    )


def logical_fidelity(rho, target, tol=1e-10):
    """<target| rho |target> for a trace-normalized rho and normalized target."""
    m = rho.matrix if isinstance(rho, LogicalDensityMatrix) else np.asarray(rho)
    if np.max(np.abs(m - m.conj().T)) > tol:
        raise NonHermitianError("density matrix is not Hermitian")
    t = target.vector() if hasattr(target, "vector") else np.asarray(target, dtype=complex)
    f = np.conj(t) @ m @ t
    if abs(f.imag) > tol:
        raise NonHermitianError(f"fidelity has imaginary part {f.imag:.2e}")
    return float(f.real)
