"""T gates on GKP qubits: analytic fidelities, cubic-phase baselines and a grid oracle."""

__version__ = "0.1.0"

from .config import QuadratureConfig
from .cpg import GKP_GAINS, OPTIMIZED_GAINS, CpgGains, cpg_logical_fidelity, gain_search
from .gkp import ONE, PLUS, T_STATE, ZERO, GkpParams, LogicalAmplitudes, db_to_delta, delta_to_db
from .modular import LogicalDensityMatrix, logical_dm_from_pure, logical_fidelity
from .tgate import fidelity_sweep, tgate_logical_dm, tgate_logical_fidelity

__all__ = [
    "QuadratureConfig", "CpgGains", "GKP_GAINS", "OPTIMIZED_GAINS", "cpg_logical_fidelity", "gain_search",
    "ONE", "PLUS", "T_STATE", "ZERO", "GkpParams", "LogicalAmplitudes",
    "db_to_delta", "delta_to_db", "LogicalDensityMatrix", "logical_dm_from_pure",
    "logical_fidelity", "fidelity_sweep", "tgate_logical_dm", "tgate_logical_fidelity",
]
