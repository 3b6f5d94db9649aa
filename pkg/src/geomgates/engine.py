"""Propagation of pulse schedules: exact unitary products, the Lindblad
master equation, the per-segment dynamical-phase ledger, and fidelity
metrics.

Unitary propagation composes closed-form propagators of the constant
per-segment Hamiltonian

    H_k = [Delta_k sigma_z + (1 + eps) Omega (cos phi_k sigma_x
           + sin phi_k sigma_y)] / 2  -  delta * |1><1|

(the last term becomes -delta * I on an encoded logical pair).  The open
system path integrates

    drho/dt = i [rho, H(t)] + (1/2) [G1 L(s1) + G2 L(s2)],
    L(A) = 2 A rho A^dag - A^dag A rho - rho A^dag A,

with s1 = |0><1|, s2 = |1><1| - |0><0|, using fixed-step RK4.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import IO, Callable, List, Optional, Sequence, Tuple

import numpy as np

from .config import DEFAULTS, OMEGA_M
from .linalg import dagger, expm2_hermitian, matrix_exponential, max_abs
from .schedules import ErrorModel, PulseSegment, Schedule

SIGMA_DECAY = np.array([[0, 1], [0, 0]], dtype=complex)  # |0><1|
SIGMA_DEPHASE = np.array([[-1, 0], [0, 1]], dtype=complex)  # |1><1| - |0><0|


@dataclass
class TrajectorySample:
    time: float
    populations: Tuple[float, ...]
    state_fidelity: float


@dataclass
class EvolutionResult:
    final_propagator: Optional[np.ndarray] = None
    final_density: Optional[np.ndarray] = None
    trajectory: List[TrajectorySample] = field(default_factory=list)
    phase_ledger: List[float] = field(default_factory=list)


def _effective_error(schedule: Schedule, error: Optional[ErrorModel]) -> Tuple[float, float, ErrorModel]:
    """Resolve (rabi scale, delta) for a run.

    An explicit error model wins; otherwise a model attached by
    apply_error supplies delta only (its epsilon is already baked into the
    segment amplitudes).
    """
    if error is not None:
        return 1.0 + error.epsilon, error.delta, error
    if schedule.error is not None:
        return 1.0, schedule.error.delta, schedule.error
    return 1.0, 0.0, ErrorModel()


def segment_hamiltonian(
    segment: PulseSegment, *, scale: float = 1.0, delta: float = 0.0, encoded: bool = False
) -> np.ndarray:
    """Constant 2x2 Hamiltonian of one segment, error terms included."""
    om = 0.5 * scale * segment.rabi
    off = om * complex(math.cos(segment.phase), -math.sin(segment.phase))
    h = np.array(
        [[0.5 * segment.detuning, off], [off.conjugate(), -0.5 * segment.detuning]],
        dtype=complex,
    )
    if delta != 0.0:
        if encoded:
            h -= delta * OMEGA_M * np.eye(2)
        else:
            h[1, 1] -= delta * OMEGA_M
    return h


def _segment_hamiltonians(
    schedule: Schedule,
    error: Optional[ErrorModel],
    hamiltonian_builder: Optional[Callable[[PulseSegment, float], np.ndarray]],
) -> Tuple[List[np.ndarray], List[float], ErrorModel]:
    scale, delta, eff = _effective_error(schedule, error)
    hams = []
    for seg in schedule.segments:
        if hamiltonian_builder is not None:
            hams.append(hamiltonian_builder(seg, scale))
        else:
            hams.append(segment_hamiltonian(seg, scale=scale, delta=delta, encoded=schedule.encoded))
    durations = [seg.duration for seg in schedule.segments]
    return hams, durations, eff


def propagate_unitary(
    schedule: Schedule,
    error: Optional[ErrorModel] = None,
    initial_state: Optional[np.ndarray] = None,
    *,
    samples: int = DEFAULTS.trajectory_samples,
    hamiltonian_builder: Optional[Callable[[PulseSegment, float], np.ndarray]] = None,
    target_state: Optional[np.ndarray] = None,
) -> EvolutionResult:
    """Compose the closed-form per-segment propagators.

    With an initial state the result also carries a sampled trajectory and
    the per-segment dynamical-phase ledger gamma_d = -<psi|H|psi> * dt.
    """
    hams, durations, eff = _segment_hamiltonians(schedule, error, hamiltonian_builder)
    if eff.gamma1 != 0.0 or eff.gamma2 != 0.0:
        raise ValueError("propagate_unitary requires zero decoherence rates; use lindblad_evolve")
    dim = hams[0].shape[0] if hams else 2
    expm = expm2_hermitian if dim == 2 else matrix_exponential

    result = EvolutionResult()
    propagator = np.eye(dim, dtype=complex)
    psi = None
    if initial_state is not None:
        psi = np.asarray(initial_state, dtype=complex).reshape(dim)
        norm = float(np.linalg.norm(psi))
        if abs(norm - 1.0) > 1e-10:
            raise ValueError(f"initial state is not normalized: |psi| = {norm!r}")
        if target_state is None and dim == 2:
            target_state = schedule.gate.target_unitary() @ psi

    total = sum(durations)
    sample_times = np.linspace(0.0, total, samples) if psi is not None and total > 0 else np.array([])
    si = 0
    t0 = 0.0
    for h, dt in zip(hams, durations):
        if psi is not None:
            result.phase_ledger.append(-float(np.vdot(psi, h @ psi).real) * dt)
            while si < len(sample_times) and sample_times[si] <= t0 + dt + 1e-12:
                ts = sample_times[si]
                psi_t = expm(h, ts - t0) @ psi
                result.trajectory.append(_state_sample(ts, psi_t, target_state))
                si += 1
        if dt > 0.0:
            u = expm(h, dt)
            propagator = u @ propagator
            if psi is not None:
                psi = u @ psi
        t0 += dt
    if psi is not None:
        while si < len(sample_times):
            result.trajectory.append(_state_sample(sample_times[si], psi, target_state))
            si += 1
    result.final_propagator = propagator
    return result


def _state_sample(t: float, psi: np.ndarray, target: Optional[np.ndarray]) -> TrajectorySample:
    pops = tuple(float(p) for p in np.abs(psi) ** 2)
    fid = float(abs(np.vdot(target, psi)) ** 2) if target is not None else float("nan")
    return TrajectorySample(time=t, populations=pops, state_fidelity=fid)


def dynamical_phase_ledger(
    schedule: Schedule, initial_state: Optional[np.ndarray] = None
) -> List[float]:
    """Per-segment dynamical phases along the ideal (error-free) evolution.

    Defaults to the cyclic state |psi+> = cos(theta/2)|0> +
    sin(theta/2) e^{i phi} |1> of the schedule's gate parameters.
    """
    if initial_state is None:
        g = schedule.gate
        initial_state = np.array(
            [math.cos(g.theta / 2), math.sin(g.theta / 2) * complex(math.cos(g.phi), math.sin(g.phi))],
            dtype=complex,
        )
    res = propagate_unitary(schedule, ErrorModel(), initial_state, samples=2)
    return res.phase_ledger


def gate_fidelity(actual: np.ndarray, ideal: np.ndarray) -> float:
    """Trace gate fidelity |Tr(ideal^dag actual)| / d (global-phase invariant)."""
    if actual.shape != ideal.shape:
        raise ValueError(f"dimension mismatch: {actual.shape} vs {ideal.shape}")
    d = actual.shape[0]
    return float(abs(np.trace(dagger(ideal) @ actual))) / d


def state_fidelity(rho: np.ndarray, psi: np.ndarray) -> float:
    """<psi|rho|psi> for a density matrix and a normalized pure state."""
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if rho.shape != (psi.size, psi.size):
        raise ValueError(f"dimension mismatch: rho {rho.shape} vs psi of length {psi.size}")
    val = complex(np.vdot(psi, rho @ psi))
    if abs(val.imag) > 1e-12:
        raise ValueError(f"state fidelity has spurious imaginary part {val.imag:.3e}")
    return float(val.real)


def default_collapse_ops(error: ErrorModel) -> List[Tuple[float, np.ndarray]]:
    return [(error.gamma1, SIGMA_DECAY), (error.gamma2, SIGMA_DEPHASE)]


def lindblad_rhs(rho: np.ndarray, k: np.ndarray, jumps: Sequence[Tuple[float, np.ndarray]]) -> np.ndarray:
    """Right-hand side via the stuffed generator K = -iH - (1/2) sum G A^dag A."""
    out = k @ rho + rho @ dagger(k)
    for rate, a in jumps:
        if np.ndim(rate) == 0 and rate == 0.0:
            continue
        out = out + rate * (a @ rho @ dagger(a))
    return out


def _rk4_step(rho, k, jumps, dt):
    k1 = lindblad_rhs(rho, k, jumps)
    k2 = lindblad_rhs(rho + 0.5 * dt * k1, k, jumps)
    k3 = lindblad_rhs(rho + 0.5 * dt * k2, k, jumps)
    k4 = lindblad_rhs(rho + dt * k3, k, jumps)
    return rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _stuffed_generator(h: np.ndarray, jumps: Sequence[Tuple[float, np.ndarray]]) -> np.ndarray:
    k = -1j * h
    for rate, a in jumps:
        if rate != 0.0:
            k = k - 0.5 * rate * (dagger(a) @ a)
    return k


def lindblad_evolve(
    schedule: Schedule,
    error: Optional[ErrorModel] = None,
    rho0: Optional[np.ndarray] = None,
    *,
    step: float = DEFAULTS.lindblad_step,
    samples: int = DEFAULTS.trajectory_samples,
    collapse_ops: Optional[Sequence[Tuple[float, np.ndarray]]] = None,
    hamiltonian_builder: Optional[Callable[[PulseSegment, float], np.ndarray]] = None,
    target_state: Optional[np.ndarray] = None,
    trace_abort: float = DEFAULTS.trace_abort,
) -> EvolutionResult:
    """Fixed-step RK4 integration of the Lindblad equation over a schedule."""
    if step <= 0.0:
        raise ValueError(f"step size must be positive, got {step!r}")
    if rho0 is None:
        raise ValueError("an initial density matrix is required")
    rho = np.asarray(rho0, dtype=complex)
    dim = rho.shape[0]
    if max_abs(rho - dagger(rho)) > 1e-10:
        raise ValueError("initial density matrix is not Hermitian")
    tr0 = float(np.trace(rho).real)
    if abs(tr0 - 1.0) > 1e-8:
        raise ValueError(f"initial density matrix has trace {tr0!r}, expected 1")

    hams, durations, eff = _segment_hamiltonians(schedule, error, hamiltonian_builder)
    if collapse_ops is None:
        if dim != 2:
            raise ValueError("collapse_ops must be given explicitly for dim != 2")
        collapse_ops = default_collapse_ops(eff)
    if target_state is None:
        if dim != 2:
            raise ValueError("target_state must be given explicitly for dim != 2")
        evals, evecs = np.linalg.eigh(rho)
        target_state = schedule.gate.target_unitary() @ evecs[:, -1]

    total = sum(durations)
    sample_times = np.linspace(0.0, total, samples)
    result = EvolutionResult()
    result.trajectory.append(_rho_sample(0.0, rho, target_state))
    si = 1
    t = 0.0
    for h, dur in zip(hams, durations):
        if dur <= 0.0:
            continue
        k = _stuffed_generator(h, collapse_ops)
        t_end = t + dur
        while t < t_end - 1e-13:
            t_next = min(t_end, t + step)
            if si < len(sample_times):
                t_next = min(t_next, float(sample_times[si]))
            rho = _rk4_step(rho, k, collapse_ops, t_next - t)
            t = t_next
            drift = abs(float(np.trace(rho).real) - tr0)
            if drift > trace_abort:
                raise RuntimeError(
                    f"trace drift {drift:.3e} exceeds {trace_abort:.1e} at t = {t:.4f} "
                    f"(step = {step!r}); reduce the step size"
                )
            if si < len(sample_times) and t >= sample_times[si] - 1e-12:
                result.trajectory.append(_rho_sample(t, rho, target_state))
                si += 1
    while si < len(sample_times):
        result.trajectory.append(_rho_sample(float(sample_times[si]), rho, target_state))
        si += 1
    result.final_density = rho
    return result


def _rho_sample(t: float, rho: np.ndarray, target: np.ndarray) -> TrajectorySample:
    pops = tuple(float(p.real) for p in np.diag(rho))
    fid = float(np.vdot(target, rho @ target).real)
    return TrajectorySample(time=t, populations=pops, state_fidelity=fid)


def write_trajectory_csv(result: EvolutionResult, fp: IO[str]) -> None:
    """CSV export: header time,pop_0,...,state_fidelity, one row per sample."""
    if not result.trajectory:
        raise ValueError("evolution result carries no trajectory samples")
    n = len(result.trajectory[0].populations)
    writer = csv.writer(fp, lineterminator="\n")
    writer.writerow(["time"] + [f"pop_{i}" for i in range(n)] + ["state_fidelity"])
    for s in result.trajectory:
        writer.writerow([f"{s.time:.10g}"] + [f"{p:.12g}" for p in s.populations] + [f"{s.state_fidelity:.12g}"])
