"""Sweep and verification harness behind the command-line front end.

Builds schedules for named gates, evaluates gate fidelities over 1-D and
2-D error grids, and fits the fidelity-vs-error series for comparison
against the analytic second/third/fourth-order coefficients.

Under decoherence the gate fidelity is the square root of the
entanglement fidelity of the evolved channel; at zero rates this reduces
exactly to the trace fidelity |Tr(U_ideal^dag U)| / d of the unitary path.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import IO, List, Optional, Sequence, Tuple

import numpy as np

from . import dfs
from .config import DEFAULTS
from .engine import dagger, gate_fidelity, lindblad_rhs, propagate_unitary, segment_hamiltonian
from .schedules import (
    ErrorModel,
    GateParams,
    Schedule,
    build_composite,
    build_dyn_corrected,
    build_single_loop,
)
from .series import SeriesFit, fit_fidelity_series, fit_window

NAMED_GATES = {
    "S": GateParams(0.0, 0.0, -math.pi / 4),
    "T": GateParams(0.0, 0.0, -math.pi / 8),
    "H": GateParams(math.pi / 4, 0.0, -math.pi / 2),
}

SCHEMES = ("singleloop", "composite", "dyncorrected")

EPSILON_DEFAULT_RANGE = (-0.1, 0.1)
GAMMA_DEFAULT_RANGE = (0.0, 5e-4)


def resolve_gate(name: str) -> GateParams:
    try:
        return NAMED_GATES[name]
    except KeyError:
        raise ValueError(f"unknown gate {name!r}; known gates: {', '.join(sorted(NAMED_GATES) + ['U2'])}")


def build_schedule(scheme: str, gate: GateParams, loops: int = 2) -> Schedule:
    if scheme == "singleloop":
        return build_single_loop(gate)
    if scheme == "composite":
        return build_composite(gate, loops)
    if scheme == "dyncorrected":
        return build_dyn_corrected(gate)
    raise ValueError(f"unknown scheme {scheme!r}; choose from {', '.join(SCHEMES)}")


def unitary_gate_fidelity(
    schedule: Schedule, epsilon: float = 0.0, delta: float = 0.0, *, encoded: bool = False
) -> float:
    err = ErrorModel(epsilon=epsilon, delta=delta)
    if encoded:
        sched = schedule if schedule.encoded else Schedule(
            segments=schedule.segments, scheme=schedule.scheme, gate=schedule.gate, encoded=True
        )
        res = propagate_unitary(sched, err)
    else:
        res = propagate_unitary(schedule, err)
    return gate_fidelity(res.final_propagator, schedule.gate.target_unitary())


def two_qubit_gate_fidelity(scheme: str, epsilon: float = 0.0, gamma_t: float = math.pi / 2, loops: int = 2) -> float:
    res = dfs.run_two_logical_gate(gamma_t, ErrorModel(epsilon=epsilon), scheme=scheme, loops=loops)
    return float(abs(np.trace(dagger(dfs.ideal_two_logical(gamma_t)) @ res.logical))) / 4.0


# ---------------------------------------------------------------------------
# Batched Lindblad process fidelity (matrix-unit evolution)
# ---------------------------------------------------------------------------

def _matrix_units(dim: int) -> np.ndarray:
    units = np.zeros((dim * dim, dim, dim), dtype=complex)
    for i in range(dim):
        for j in range(dim):
            units[i * dim + j, i, j] = 1.0
    return units


def _integrate_batch(
    hams: Sequence[np.ndarray],
    durations: Sequence[float],
    rho: np.ndarray,
    rates: Sequence[Tuple[np.ndarray, np.ndarray]],
    step: float,
) -> np.ndarray:
    """RK4 over a stack of density-like matrices.

    `hams[k]` has shape (..., d, d) broadcastable against `rho` of shape
    (..., m, d, d); `rates` pairs a broadcastable rate array with a fixed
    jump operator.
    """
    for h, dur in zip(hams, durations):
        if dur <= 0.0:
            continue
        k = -1j * h
        for rate, a in rates:
            k = k - 0.5 * rate * (dagger(a) @ a)
        k = k[..., None, :, :]
        jumps = [(r[..., None, :, :] if np.ndim(r) else r, a) for r, a in rates]
        steps = max(1, int(math.ceil(dur / step)))
        dt = dur / steps
        for _ in range(steps):
            k1 = lindblad_rhs(rho, k, jumps)
            k2 = lindblad_rhs(rho + 0.5 * dt * k1, k, jumps)
            k3 = lindblad_rhs(rho + 0.5 * dt * k2, k, jumps)
            k4 = lindblad_rhs(rho + dt * k3, k, jumps)
            rho = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return rho


def lindblad_gate_fidelity_grid(
    schedule: Schedule,
    epsilons: np.ndarray,
    gammas: np.ndarray,
    *,
    delta: float = 0.0,
    step: float = DEFAULTS.lindblad_step,
) -> np.ndarray:
    """Gate fidelity sqrt(F_entanglement) on the epsilon x Gamma grid.

    All grid points share one time grid (durations do not depend on the
    error), so the whole grid integrates as a single RK4 batch.
    """
    eps = np.asarray(epsilons, dtype=float)
    gam = np.asarray(gammas, dtype=float)
    ne, ng = eps.size, gam.size
    dim = 2
    ideal = schedule.gate.target_unitary()

    hams = []
    for seg in schedule.segments:
        stack = np.empty((ne, ng, dim, dim), dtype=complex)
        for i, e in enumerate(eps):
            h = segment_hamiltonian(seg, scale=1.0 + e, delta=delta, encoded=schedule.encoded)
            stack[i, :] = h
        hams.append(stack)

    from .engine import SIGMA_DECAY, SIGMA_DEPHASE

    gam_grid = np.broadcast_to(gam[None, :, None, None], (ne, ng, 1, 1)).copy()
    rates = [(gam_grid, SIGMA_DECAY), (gam_grid, SIGMA_DEPHASE)]

    units = _matrix_units(dim)
    rho = np.broadcast_to(units, (ne, ng, dim * dim, dim, dim)).copy()
    rho = _integrate_batch(hams, [s.duration for s in schedule.segments], rho, rates, step)

    # F_e = (1/d^2) sum_ij Tr[(U E_ij U^dag)^dag E(E_ij)]
    targets = np.einsum("ab,ubc,dc->uad", ideal, units, ideal.conj())
    overlaps = np.einsum("uab,...uab->...", targets.conj(), rho)
    fe = overlaps.real / dim**2
    return np.sqrt(np.clip(fe, 0.0, 1.0))


# ---------------------------------------------------------------------------
# Sweep specification and execution
# ---------------------------------------------------------------------------

@dataclass
class Axis:
    name: str
    start: float
    stop: float
    count: int

    def __post_init__(self):
        if self.name not in ("epsilon", "delta", "Gamma"):
            raise ValueError(f"unknown axis {self.name!r}; choose epsilon, delta or Gamma")
        if self.count < 2:
            raise ValueError(f"axis {self.name!r} needs count >= 2, got {self.count}")
        if not (math.isfinite(self.start) and math.isfinite(self.stop)):
            raise ValueError(f"axis {self.name!r} has a non-finite range")

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.count)


@dataclass
class SweepSpec:
    scheme: str = "dyncorrected"
    gate: str = "S"
    loops: int = 2
    axis1: Axis = field(default_factory=lambda: Axis("epsilon", *EPSILON_DEFAULT_RANGE, 41))
    axis2: Optional[Axis] = None
    gamma1: float = 0.0
    gamma2: float = 0.0
    encoded: bool = False
    step: float = DEFAULTS.lindblad_step
    output: Optional[str] = None

    def __post_init__(self):
        if self.axis2 is not None and self.axis2.name == self.axis1.name:
            raise ValueError(f"sweep axes overlap: both are {self.axis1.name!r}")

    @classmethod
    def from_dict(cls, data: dict) -> "SweepSpec":
        kwargs = dict(data)
        for key in ("axis1", "axis2"):
            if kwargs.get(key) is not None:
                kwargs[key] = Axis(**kwargs[key])
        return cls(**kwargs)


def run_sweep(spec: SweepSpec) -> Tuple[List[str], List[List[float]]]:
    """Evaluate a 1-D or 2-D sweep; rows are in row-major axis order."""
    if spec.gate == "U2":
        return _run_sweep_u2(spec)
    gate = resolve_gate(spec.gate)
    schedule = build_schedule(spec.scheme, gate, spec.loops)

    if spec.axis2 is None:
        header = [spec.axis1.name, "fidelity"]
        rows = []
        for v in spec.axis1.values():
            params = {"epsilon": 0.0, "delta": 0.0, "Gamma": None}
            params[spec.axis1.name] = float(v)
            g1, g2 = spec.gamma1, spec.gamma2
            if params["Gamma"] is not None:
                g1 = g2 = params["Gamma"]
            if g1 == 0.0 and g2 == 0.0:
                f = unitary_gate_fidelity(
                    schedule, params["epsilon"], params["delta"], encoded=spec.encoded
                )
            else:
                f = float(
                    lindblad_gate_fidelity_grid(
                        schedule,
                        np.array([params["epsilon"]]),
                        np.array([g1]),
                        delta=params["delta"],
                        step=spec.step,
                    )[0, 0]
                )
            rows.append([float(v), f])
        return header, rows

    # 2-D grid: currently epsilon x Gamma (the robustness heatmap)
    names = {spec.axis1.name, spec.axis2.name}
    if names != {"epsilon", "Gamma"}:
        raise ValueError("2-D sweeps support the epsilon x Gamma grid only")
    ax_eps = spec.axis1 if spec.axis1.name == "epsilon" else spec.axis2
    ax_gam = spec.axis1 if spec.axis1.name == "Gamma" else spec.axis2
    fid = lindblad_gate_fidelity_grid(
        schedule, ax_eps.values(), ax_gam.values(), step=spec.step
    )
    header = [spec.axis1.name, spec.axis2.name, "fidelity"]
    rows = []
    for i, v1 in enumerate(spec.axis1.values()):
        for j, v2 in enumerate(spec.axis2.values()):
            if spec.axis1.name == "epsilon":
                f = fid[i, j]
            else:
                f = fid[j, i]
            rows.append([float(v1), float(v2), float(f)])
    return header, rows


def _run_sweep_u2(spec: SweepSpec) -> Tuple[List[str], List[List[float]]]:
    if spec.axis2 is not None:
        raise ValueError("U2 sweeps are 1-D over epsilon")
    if spec.axis1.name != "epsilon":
        raise ValueError("U2 sweeps support the epsilon axis only")
    if spec.gamma1 != 0.0 or spec.gamma2 != 0.0:
        raise ValueError("U2 sweeps run without decoherence; use the two-qubit trajectory for rates")
    header = ["epsilon", "fidelity"]
    rows = [
        [float(v), two_qubit_gate_fidelity(spec.scheme, float(v), loops=spec.loops)]
        for v in spec.axis1.values()
    ]
    return header, rows


def write_csv(header: Sequence[str], rows: Sequence[Sequence[float]], fp: IO[str]) -> None:
    writer = csv.writer(fp, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([f"{v:.12g}" for v in row])


# ---------------------------------------------------------------------------
# Fidelity-series verification
# ---------------------------------------------------------------------------

_PI2 = math.pi**2
_COMPOSITE_S_C2 = 0.25 * _PI2 * (
    -2.0 - math.sqrt(2.0) + math.sqrt(2.0 * (2.0 + math.sqrt(2.0))) + math.sqrt(2.0) * math.sin(math.pi / 8)
)

#: (coefficient, target, relative tolerance); target None means |c| bound.
SERIES_TARGETS = {
    ("S", "singleloop"): [("c2", (-2.0 + math.sqrt(2.0)) * _PI2 / 8.0, 0.01)],
    ("S", "composite"): [("c2", _COMPOSITE_S_C2, 0.01)],
    ("S", "dyncorrected"): [
        ("c2", None, 1e-6),
        ("c4", (-2.0 + math.sqrt(2.0)) * math.pi**4 / 32.0, 0.02),
    ],
    ("H", "singleloop"): [("c2", -5.0 * _PI2 / 32.0, 0.01)],
    ("H", "composite"): [("c2", (-13.0 + 8.0 * math.sqrt(2.0)) * _PI2 / 32.0, 0.01)],
    ("H", "dyncorrected"): [
        ("c2", -2.0 * _PI2 / 87.0, 0.10),
        ("c3", math.pi**3 / 41.0, 0.10),
    ],
}


@dataclass
class SeriesCheck:
    coefficient: str
    value: float
    target: Optional[float]
    tolerance: float
    passed: bool


@dataclass
class SeriesReport:
    gate: str
    scheme: str
    fit: SeriesFit
    checks: List[SeriesCheck]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def verify_series(
    gate_name: str,
    scheme: str,
    loops: int = 2,
    *,
    residual_threshold: float = 1e-8,
) -> SeriesReport:
    """Fit F(eps) at zero decoherence and check the analytic coefficients."""
    if (gate_name, scheme) not in SERIES_TARGETS:
        raise ValueError(f"no analytic targets for gate {gate_name!r} with scheme {scheme!r}")
    gate = resolve_gate(gate_name)
    schedule = build_schedule(scheme, gate, loops)
    eps = fit_window()
    fid = np.array([unitary_gate_fidelity(schedule, float(e)) for e in eps])
    fit = fit_fidelity_series(eps, fid)
    if fit.residual > residual_threshold:
        raise RuntimeError(
            f"series fit residual {fit.residual:.3e} exceeds {residual_threshold:.1e} "
            f"for {gate_name}/{scheme}; the sampled curve is not polynomial on this window"
        )
    checks = []
    for name, target, tol in SERIES_TARGETS[(gate_name, scheme)]:
        value = getattr(fit, name)
        if target is None:
            passed = abs(value) < tol
        else:
            passed = abs(value - target) <= abs(target) * tol
        checks.append(SeriesCheck(name, value, target, tol, passed))
    return SeriesReport(gate=gate_name, scheme=scheme, fit=fit, checks=checks)
