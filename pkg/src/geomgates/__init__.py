"""Nonadiabatic geometric gate schedules, open-system simulation and
robustness verification."""

from .config import DEFAULTS, OMEGA_M
from .engine import (
    EvolutionResult,
    dynamical_phase_ledger,
    gate_fidelity,
    lindblad_evolve,
    propagate_unitary,
    state_fidelity,
    write_trajectory_csv,
)
from .linalg import matrix_exponential, su2_rotation
from .schedules import (
    ErrorModel,
    GateParams,
    PulseSegment,
    Schedule,
    apply_error,
    build_composite,
    build_dyn_corrected,
    build_single_loop,
)

__all__ = [
    "DEFAULTS",
    "OMEGA_M",
    "ErrorModel",
    "EvolutionResult",
    "GateParams",
    "PulseSegment",
    "Schedule",
    "apply_error",
    "build_composite",
    "build_dyn_corrected",
    "build_single_loop",
    "dynamical_phase_ledger",
    "gate_fidelity",
    "lindblad_evolve",
    "matrix_exponential",
    "propagate_unitary",
    "state_fidelity",
    "su2_rotation",
    "write_trajectory_csv",
]

__version__ = "0.1.0"
