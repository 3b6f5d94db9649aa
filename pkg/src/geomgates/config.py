"""Default numerical tolerances and integrator settings.

Everything here is a default, not a hard-coded constant: operations that
consume these values accept overrides through keyword arguments.
"""
from __future__ import annotations

from dataclasses import dataclass

#: Base Rabi rate; all times are in units of 1/OMEGA_M and all rates in
#: units of OMEGA_M.
OMEGA_M = 1.0


@dataclass(frozen=True)
class Defaults:
    unit_axis_tol: float = 1e-12
    hermiticity_tol: float = 1e-10
    unitarity_tol: float = 1e-10
    trace_tol: float = 1e-8
    trace_abort: float = 1e-6
    lindblad_step: float = 1e-3
    trajectory_samples: int = 200
    taylor_order: int = 16
    squaring_threshold: float = 0.5
    zero_area_tol: float = 1e-14


DEFAULTS = Defaults()
