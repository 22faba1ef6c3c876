"""Exception types raised across the package."""


class DegenerateStateError(ValueError):
    """A state has (numerically) zero norm or zero logical trace."""


class AccuracyError(RuntimeError):
    """A quadrature estimate failed its convergence check.

    The best available estimate is kept on ``estimate`` and the
    disagreement between the two refinement levels on ``error``.
    """

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class LatticeError(ValueError):
    """A comb position does not lie on the declared lattice."""


class InvalidGainsError(ValueError):
    """An integer gain triple violates the T-gate congruence."""


class GridError(RuntimeError):
    """The position grid is too small or too coarse for the requested state."""


class EmptyResultError(ValueError):
    """A search produced no admissible candidates."""


class NonHermitianError(ValueError):
    """A density matrix is not Hermitian within tolerance."""
