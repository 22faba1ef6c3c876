"""Brute-force simulation of the full T-gate circuit on position grids.

Used as an independent check of :mod:`gkp_tgate.tgate`. The pipeline is
followed operator by operator:

1. the product state T(x1) psi(x2) is sampled on a 2-mode grid and pushed
   through the first 50:50 beam splitter by spline resampling;
2. mode A is sliced at each sampled q1 (Gauss-Legendre nodes on every
   constant-kappa cell), leaving a 1-mode state on "in";
3. "in" meets the squeezed vacuum at the second beam splitter, is rotated by
   pi/2 - theta(kappa) with the explicit rotation kernel and sliced at each
   q2 of a uniform grid (the ancilla coordinate lives on its own uniform
   grid scaled to sigma, so sigma may be tiny);
4. the B-mode state is displaced by D(q1/sqrt(2), kappa q1/sqrt(2) + sqrt(1+kappa^2) q2),
   evaluated on the modular quadrature points and accumulated into the
   logical blocks of rho(x, x').

No step uses the collapsed closed-form integrals.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.interpolate import CubicSpline
from scipy.ndimage import map_coordinates, spline_filter

from .errors import GridError
from .gkp import (PLUS, T_STATE, GkpWavefunction, normalization_constant,
                  squeezed_vacuum_amplitude, squeezed_vacuum_norm)
from .modular import LogicalDensityMatrix, ModularGrid, logical_elements, logical_fidelity
from .tgate import t_target, theta

SQRT_2 = math.sqrt(2.0)
Q1_CELL = math.sqrt(math.pi / 2)


def rotation_kernel(big_theta, x, xp):
    """<x| R(Theta) |x'> up to the constant phase convention used in the derivation."""
    s = math.sin(big_theta)
    if abs(s) < 1e-12:
        raise ValueError("singular rotation angle; use the identity map for Theta = 0")
    c = math.cos(big_theta)
    x = np.asarray(x, dtype=float)
    xp = np.asarray(xp, dtype=float)
    return np.exp(1j * ((x**2 + xp**2) * c - 2 * x * xp) / (2 * s)) / math.sqrt(2 * math.pi * abs(s))


def rotate_grid(big_theta, psi, x):
    """Apply the discretized rotation kernel to samples ``psi`` on the uniform grid ``x``."""
    dx = x[1] - x[0]
    return rotation_kernel(big_theta, x[:, None], x[None, :]) @ psi * dx


@dataclass(frozen=True)
class GridConfig:
    """Discretization of the brute-force simulator.

    ``half_width=None`` sizes the position grid from delta; ``q1_cells=None``
    covers +-7 standard deviations of the first homodyne outcome and
    ``q2_half_range=None`` about +-7 standard deviations of the second. The q2
    spread grows like 1/sigma and differs between the kappa branches, so a
    window that truncates it reweights the branches; the captured probability
    must reach ``1 - probability_tolerance``.

    ``x3_points=None`` sizes the ancilla grid so that its spacing resolves the
    full bandwidth of the x3 integrand (ancilla width, peak width, the q2
    phase and the kappa = 1 chirp); trapezoid sums of such Gaussian-decaying
    integrands then converge spectrally.
    """

    dx: float = 0.04
    half_width: float | None = None
    q1_cells: int | None = None
    q1_nodes: int = 24
    q2_half_range: float | None = None
    q2_points: int = 241
    x3_points: int | None = None
    u_nodes: int = 64
    leakage_floor: float = 1e-6
    probability_tolerance: float = 1e-3
    feedforward: bool = True

    def resolved_half_width(self, delta):
        return self.half_width if self.half_width is not None else max(14.0, 4.5 / delta)

    def resolved_q1_cells(self, delta):
        if self.q1_cells is not None:
            return self.q1_cells
        return int(math.ceil(7.0 / (2 * delta) / Q1_CELL))

    def resolved_q2_half_range(self, delta, sigma):
        if self.q2_half_range is not None:
            return self.q2_half_range
        return 5.0 * math.hypot(1 / (2 * sigma), 1 / (2 * delta))

    def resolved_x3_grid(self, delta, sigma, q2_max, support):
        """Uniform ancilla grid on +-12 sigma and its trapezoid weights."""
        half = 12.0 * sigma
        if self.x3_points is not None:
            n = self.x3_points
        else:
            bandwidth = 6 / sigma + 6 / delta + 2 * q2_max + SQRT_2 * support
            n = int(math.ceil(2 * half * bandwidth / (2 * math.pi))) + 1
        x3 = np.linspace(-half, half, n)
        w = np.full(n, x3[1] - x3[0])
        w[[0, -1]] *= 0.5
        return x3, w


@dataclass
class OracleResult:
    rho: LogicalDensityMatrix
    total_probability: float
    n_q1: int
    n_q2: int
    interpolation: str = "cubic-spline"
    kernel: np.ndarray | None = None
    grid: ModularGrid | None = field(default=None, repr=False)

    def fidelity(self, target=T_STATE):
        return logical_fidelity(self.rho, target)


def _check_grid(delta, x, cfg):
    dx = x[1] - x[0]
    if dx > SQRT_2 * delta / 4:
        raise GridError(
            f"grid too coarse: dx = {dx:.3g} does not resolve peaks of width "
            f"{SQRT_2 * delta:.3g} (need dx <= {SQRT_2 * delta / 4:.3g})"
        )


def _check_leakage(profile, name, floor):
    peak = np.max(np.abs(profile))
    edge = max(abs(profile[0]), abs(profile[-1]))
    if edge > floor * peak:
        raise GridError(
            f"grid too small: {name} has relative amplitude {edge / peak:.2e} at the boundary "
            f"(floor {floor:.0e}); increase half_width"
        )


def beam_splitter_grid(phi, x):
    """Resample a 2-mode grid state through (x1, x2) -> ((-x1 + x2)/sqrt(2), (x1 + x2)/sqrt(2)).

    Returns the output samples on the same grid and the relative norm change
    introduced by interpolation (the output is renormalized).
    """
    dx = x[1] - x[0]
    n = len(x)
    xa, xin = np.meshgrid(x, x, indexing="ij")
    x1 = (xin - xa) / SQRT_2
    x2 = (xin + xa) / SQRT_2
    coords = np.array([(x1 - x[0]) / dx, (x2 - x[0]) / dx])
    out = np.empty((n, n), dtype=complex)
    out.real = map_coordinates(phi.real, coords, order=3, mode="constant", cval=0.0)
    out.imag = map_coordinates(phi.imag, coords, order=3, mode="constant", cval=0.0)
    before = np.sum(np.abs(phi) ** 2)
    after = np.sum(np.abs(out) ** 2)
    out *= math.sqrt(before / after)
    return out, abs(after / before - 1.0)


def accumulate_logical_dm(rho_xx, grid):
    """Logical density matrix from a kernel rho(x, x') sampled on ``grid.flat_points``.

    Only the entries pairing (2m + zeta) sqrt(pi) + u with (2m + eta) sqrt(pi) + u
    enter; they are weighted by the u Gauss-Legendre weights.
    """
    rho_xx = np.asarray(rho_xx)
    shape = grid.points.shape
    idx = np.arange(rho_xx.shape[0]).reshape(shape)
    w = grid.weights
    r00 = np.sum(rho_xx[idx[0], idx[0]] * w).real
    r11 = np.sum(rho_xx[idx[1], idx[1]] * w).real
    r01 = np.sum(rho_xx[idx[0], idx[1]] * w)
    return LogicalDensityMatrix.from_elements(r00, r11, r01).normalized()


def simulate_circuit(delta, sigma, cfg=GridConfig(), amps=PLUS, keep_kernel=False):
    """Run the full circuit and return the trace-normalized logical density matrix."""
    if delta <= 0 or sigma <= 0:
        raise ValueError("delta and sigma must be positive (use a small sigma for the ideal ancilla)")
    hw = cfg.resolved_half_width(delta)
    n = int(round(2 * hw / cfg.dx)) + 1
    x = np.linspace(-hw, hw, n)
    dx = x[1] - x[0]
    _check_grid(delta, x, cfg)

    anc = GkpWavefunction(T_STATE, delta)
    psi = GkpWavefunction(amps, delta)
    t_samp = normalization_constant(anc) * anc(x)
    p_samp = normalization_constant(psi) * psi(x)
    _check_leakage(t_samp, "ancilla T state", cfg.leakage_floor)
    _check_leakage(p_samp, "input state", cfg.leakage_floor)

    # step 1: first beam splitter on the 2-mode grid (mode A first, "in" second)
    joint, _ = beam_splitter_grid(np.outer(t_samp, p_samp), x)
    joint_re = spline_filter(joint.real, order=3)
    joint_im = spline_filter(joint.imag, order=3)

    mgrid = ModularGrid.covering(psi.half_width, cfg.u_nodes)
    y = mgrid.points.reshape(2, -1)
    uw = np.broadcast_to(mgrid.weights, mgrid.points.shape).reshape(2, -1)

    k_cells = cfg.resolved_q1_cells(delta)
    t1, w1 = leggauss(cfg.q1_nodes)
    q2_max = cfg.resolved_q2_half_range(delta, sigma)
    q2 = np.linspace(-q2_max, q2_max, cfg.q2_points)
    w2 = np.full(cfg.q2_points, q2[1] - q2[0])
    w2[[0, -1]] *= 0.5
    x3, wx3 = cfg.resolved_x3_grid(delta, sigma, q2_max, hw)
    # squeezed-vacuum amplitude times quadrature weight; sqrt(2) from the second beam splitter
    wh = SQRT_2 * wx3 * squeezed_vacuum_norm(sigma) * squeezed_vacuum_amplitude(sigma, x3)

    blocks = np.zeros(3, dtype=complex)
    kernel = np.zeros((y.size, y.size), dtype=complex) if keep_kernel else None
    total = 0.0
    for k in range(-k_cells, k_cells + 1):
        kap = (k % 2) if cfg.feedforward else 0
        big_theta = math.pi / 2 - theta(kap)
        sin_t, cot_t = math.sin(big_theta), math.cos(big_theta) / math.sin(big_theta)
        kern_c = 1 / math.sqrt(2 * math.pi * abs(sin_t))
        for q1, wq1 in zip(Q1_CELL * (k + 0.5 * t1), 0.5 * Q1_CELL * w1):
            # step 2: homodyne slice of mode A at q1
            coords = np.array([np.full(n, (q1 - x[0]) / dx), np.arange(n, dtype=float)])
            phi = np.empty(n, dtype=complex)
            phi.real = map_coordinates(joint_re, coords, order=3, prefilter=False, mode="constant")
            phi.imag = map_coordinates(joint_im, coords, order=3, prefilter=False, mode="constant")
            spline = CubicSpline(x, phi)

            # step 3: second beam splitter + rotation + p-homodyne, with the x3 integral by quadrature
            x0 = q1 / SQRT_2
            b = y - x0
            yk = b[None, ...] + SQRT_2 * x3[:, None, None]
            arg = SQRT_2 * b[None, ...] + x3[:, None, None]
            inside = np.abs(arg) <= x[-1]
            vals = np.where(inside, spline(np.clip(arg, x[0], x[-1])), 0.0)
            m2 = vals * np.exp(0.5j * yk**2 * cot_t) * wh[:, None, None]
            m1 = np.exp(-1j * np.outer(q2, SQRT_2 * x3) / sin_t)
            phi_b = np.einsum("qk,kzp->qzp", m1, m2) * kern_c
            phi_b *= np.exp(-1j * q2[:, None, None] * b[None, ...] / sin_t)

            # step 4: displacement on B; the position shift is already in b = y - x0
            p0 = kap * q1 / SQRT_2 + math.sqrt(1 + kap * kap) * q2
            out = phi_b * np.exp(1j * p0[:, None, None] * y[None, ...])

            w = wq1 * w2
            total += float(np.sum(w[:, None, None] * uw[None, ...] * np.abs(out) ** 2))
            r00, r11, r01 = logical_elements(
                np.moveaxis(out, 1, 0) * np.sqrt(w)[None, :, None], uw[0]
            )
            blocks += (r00, r11, r01)
            if keep_kernel:
                flat = out.reshape(len(q2), -1)
                kernel += (flat.T * w) @ flat.conj()

    if abs(total - 1.0) > cfg.probability_tolerance:
        raise GridError(
            f"outcome probability sums to {total:.6f}; the (q1, q2) window or the modular "
            f"grid misses part of the distribution"
        )
    rho = LogicalDensityMatrix.from_elements(blocks[0], blocks[1], blocks[2]).normalized()
    n_q1 = (2 * k_cells + 1) * cfg.q1_nodes
    return OracleResult(rho, total, n_q1, cfg.q2_points, kernel=kernel, grid=mgrid)


def oracle_fidelity(delta, sigma, cfg=GridConfig(), amps=PLUS):
    return simulate_circuit(delta, sigma, cfg, amps).fidelity(t_target(amps))
