"""Numerical settings shared by the quadrature-based evaluators."""

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class QuadratureConfig:
    """Truncation and tolerance parameters for the nested integrals.

    ``q1_cells`` and ``q1_nodes`` only matter for the cell-by-cell
    Gauss-Legendre route over the first homodyne outcome; the default
    route integrates each cell in closed form. ``m_tilde_max = None`` picks
    the gauge-index range from ``envelope_floor``.
    """

    q1_cells: int | None = None
    q1_nodes: int = 32
    u_nodes: int = 64
    x3_order: int = 40
    m_tilde_max: int | None = None
    envelope_floor: float = 1e-14
    tolerance: float = 1e-6
    q1_method: str = "closed"
    max_refinements: int = 4

    def __post_init__(self):
        for name in ("q1_nodes", "u_nodes", "x3_order"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.q1_cells is not None and self.q1_cells < 1:
            raise ValueError("q1_cells must be >= 1")
        if self.m_tilde_max is not None and self.m_tilde_max < 0:
            raise ValueError("m_tilde_max must be >= 0")
        if not 0 < self.envelope_floor < 1:
            raise ValueError("envelope_floor must lie in (0, 1)")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.max_refinements < 1:
            raise ValueError("max_refinements must be >= 1")
        if self.q1_method not in ("closed", "cells"):
            raise ValueError("q1_method must be 'closed' or 'cells'")

    def refined(self):
        """Same settings with every node count doubled (Richardson partner)."""
        return replace(
            self,
            q1_nodes=2 * self.q1_nodes,
            u_nodes=2 * self.u_nodes,
            x3_order=2 * self.x3_order,
        )
