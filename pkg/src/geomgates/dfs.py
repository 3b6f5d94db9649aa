"""Decoherence-free-subspace encodings and the two-logical-qubit gate.

A physical qubit pair encodes one logical qubit on its single-excitation
span (|0>_L = |10>, |1>_L = |01>); the exchange Hamiltonian restricted to
that span has exactly the driven two-level layout, so every single-qubit
schedule runs unchanged on the logical pair.

Four physical qubits encode two logical qubits.  In the ordered basis
S2' = (|00>_L, |a1>_L, |01>_L, |10>_L, |11>_L, |a2>_L) with auxiliary
states |a1>_L = |1100>, |a2>_L = |0011>, the exchange coupling between
physical qubits 2 and 3 block-diagonalizes into two driven two-level
blocks on (|00>_L, |a1>_L) and (|11>_L, |a2>_L), leaving |01>_L and
|10>_L untouched.  Driving both blocks with a theta = 0 phase-gate
schedule yields the logical controlled-phase gate
diag(e^{-i g}, 1, 1, e^{-i g}).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .config import OMEGA_M
from .engine import EvolutionResult, lindblad_evolve, propagate_unitary
from .schedules import (
    ErrorModel,
    GateParams,
    PulseSegment,
    Schedule,
    build_composite,
    build_dyn_corrected,
    build_single_loop,
)

#: S2' ordering: |00>_L, |a1>_L, |01>_L, |10>_L, |11>_L, |a2>_L
S2_PRIME_LABELS = ("1010", "1100", "1001", "0110", "0101", "0011")
LOGICAL_INDICES = (0, 2, 3, 4)
AUX_INDICES = (1, 5)


@dataclass(frozen=True)
class LogicalEncoding:
    physical_dim: int
    logical_basis: Tuple[str, ...]


SINGLE_QUBIT_ENCODING = LogicalEncoding(physical_dim=4, logical_basis=("10", "01"))
TWO_QUBIT_ENCODING = LogicalEncoding(physical_dim=16, logical_basis=S2_PRIME_LABELS)


def _basis_index(label: str) -> int:
    return int(label, 2)


def build_logical_single(J: float, varphi: float, Delta: float) -> np.ndarray:
    """Logical-qubit Hamiltonian [[D, J e^{-i p}], [J e^{i p}, -D]] / 2."""
    off = 0.5 * J * complex(math.cos(varphi), -math.sin(varphi))
    return np.array([[0.5 * Delta, off], [off.conjugate(), -0.5 * Delta]], dtype=complex)


def build_two_logical_6dim(g: float, varphi_t: float, Delta_t: float) -> np.ndarray:
    """6x6 two-logical-qubit Hamiltonian in S2' order.

    Each 2x2 block reads [[-D, g e^{+i p}], [g e^{-i p}, D]] / 2 -- the
    mirror of the single-qubit layout, so the block qubit is taken in the
    order (|a1>_L, |00>_L) when reusing single-qubit schedules.
    """
    h = np.zeros((6, 6), dtype=complex)
    off = 0.5 * g * complex(math.cos(varphi_t), math.sin(varphi_t))
    for i in (0, 4):
        h[i, i] = -0.5 * Delta_t
        h[i + 1, i + 1] = 0.5 * Delta_t
        h[i, i + 1] = off
        h[i + 1, i] = off.conjugate()
    return h


def build_physical_four_qubit(g: float, varphi_t: float) -> np.ndarray:
    """16x16 exchange coupling between physical qubits 2 and 3.

    Only the resonant (zero-detuning) form is supported; its restriction
    to S2' equals build_two_logical_6dim(g, varphi_t, 0).
    """
    p0 = np.diag([1.0, 0.0]).astype(complex)
    p1 = np.diag([0.0, 1.0]).astype(complex)
    sp = np.array([[0, 0], [1, 0]], dtype=complex)  # |1><0|
    sm = sp.T.conj()

    def kron4(a, b, c, d):
        return np.kron(np.kron(a, b), np.kron(c, d))

    phase = complex(math.cos(varphi_t), -math.sin(varphi_t))
    term = phase * (kron4(p1, sp, sm, p0) + kron4(p0, sm, sp, p1))
    return 0.5 * g * (term + term.conj().T)


def restrict_to_s2prime(h16: np.ndarray) -> np.ndarray:
    idx = [_basis_index(lbl) for lbl in S2_PRIME_LABELS]
    return h16[np.ix_(idx, idx)]


def s2_projector() -> np.ndarray:
    p = np.zeros((16, 16), dtype=complex)
    for lbl in S2_PRIME_LABELS:
        i = _basis_index(lbl)
        p[i, i] = 1.0
    return p


def collective_dephasing_term(delta: float, encoding: LogicalEncoding, *, logical: bool = True) -> np.ndarray:
    """Collective-dephasing energy term -delta * sum |b><b| over the encoded basis.

    With logical=True the operator is returned in the encoded basis (where
    it is -delta * identity, hence a pure global phase); otherwise in the
    full physical basis.
    """
    n = len(encoding.logical_basis)
    if logical:
        return -delta * OMEGA_M * np.eye(n, dtype=complex)
    out = np.zeros((encoding.physical_dim, encoding.physical_dim), dtype=complex)
    for lbl in encoding.logical_basis:
        i = _basis_index(lbl)
        out[i, i] = -delta * OMEGA_M
    return out


def _phase_gate_schedule(gamma_t: float, scheme: str = "dyncorrected", loops: int = 2) -> Schedule:
    gate = GateParams(0.0, 0.0, gamma_t)
    if scheme == "dyncorrected":
        return build_dyn_corrected(gate)
    if scheme == "singleloop":
        return build_single_loop(gate)
    if scheme == "composite":
        return build_composite(gate, loops)
    raise ValueError(f"unknown scheme {scheme!r}")


def segment_hamiltonian_6dim(segment: PulseSegment, scale: float = 1.0) -> np.ndarray:
    """Map one single-qubit segment onto both two-level blocks of S2'."""
    return build_two_logical_6dim(scale * segment.rabi, segment.phase, segment.detuning)


@dataclass
class TwoQubitGateResult:
    logical: np.ndarray  # 4x4 on (|00>, |01>, |10>, |11>)_L
    leakage: float  # max norm of auxiliary-state couplings out of the logical span
    full: np.ndarray  # 6x6 propagator in S2' order


def run_two_logical_gate(
    gamma_t: float,
    error: Optional[ErrorModel] = None,
    *,
    scheme: str = "dyncorrected",
    loops: int = 2,
) -> TwoQubitGateResult:
    """Drive both blocks with a theta = 0 phase-gate schedule.

    The block geometric phase equals gamma_t, so |00>_L and |11>_L each
    acquire e^{-i gamma_t}.  Leakage to the auxiliary states is reported,
    never renormalized away.
    """
    schedule = _phase_gate_schedule(gamma_t, scheme, loops)
    res = propagate_unitary(schedule, error, hamiltonian_builder=segment_hamiltonian_6dim)
    u6 = res.final_propagator
    logical = u6[np.ix_(LOGICAL_INDICES, LOGICAL_INDICES)]
    leak = u6[np.ix_(AUX_INDICES, LOGICAL_INDICES)]
    return TwoQubitGateResult(logical=logical, leakage=float(np.linalg.norm(leak)), full=u6)


def ideal_two_logical(gamma_t: float) -> np.ndarray:
    ph = complex(math.cos(gamma_t), -math.sin(gamma_t))
    return np.diag([ph, 1.0, 1.0, ph]).astype(complex)


def two_logical_collapse_ops(gamma1: float, gamma2: float) -> List[Tuple[float, np.ndarray]]:
    """Decay and dephasing acting on each logical qubit, written in S2'.

    Each logical qubit carries the same two channels as the bare qubit:
    a lowering operator |0>_L<1|_L and a dephasing operator
    |1>_L<1|_L - |0>_L<0|_L, extended by identity on the partner qubit
    and by zero on the auxiliary states.
    """

    def unit(i: int, j: int) -> np.ndarray:
        m = np.zeros((6, 6), dtype=complex)
        m[i, j] = 1.0
        return m

    # S2' indices: 0=|00>_L, 2=|01>_L, 3=|10>_L, 4=|11>_L (1, 5 auxiliary).
    lower_a = unit(0, 3) + unit(2, 4)
    lower_b = unit(0, 2) + unit(3, 4)
    deph_a = np.diag([-1.0, 0.0, -1.0, 1.0, 1.0, 0.0]).astype(complex)
    deph_b = np.diag([-1.0, 0.0, 1.0, -1.0, 1.0, 0.0]).astype(complex)
    return [
        (gamma1, lower_a),
        (gamma1, lower_b),
        (gamma2, deph_a),
        (gamma2, deph_b),
    ]


def uniform_logical_state() -> np.ndarray:
    psi = np.zeros(6, dtype=complex)
    for i in LOGICAL_INDICES:
        psi[i] = 0.5
    return psi


def two_logical_lindblad(
    gamma_t: float,
    error: ErrorModel,
    *,
    scheme: str = "dyncorrected",
    loops: int = 2,
    psi0: Optional[np.ndarray] = None,
    step: Optional[float] = None,
    samples: Optional[int] = None,
) -> EvolutionResult:
    """Lindblad evolution of the two-logical-qubit gate in the 6-dim space."""
    schedule = _phase_gate_schedule(gamma_t, scheme, loops)
    if psi0 is None:
        psi0 = uniform_logical_state()
    psi0 = np.asarray(psi0, dtype=complex)
    rho0 = np.outer(psi0, psi0.conj())
    target = _embed_ideal(gamma_t, psi0)
    kwargs = {}
    if step is not None:
        kwargs["step"] = step
    if samples is not None:
        kwargs["samples"] = samples
    return lindblad_evolve(
        schedule,
        error,
        rho0,
        collapse_ops=two_logical_collapse_ops(error.gamma1, error.gamma2),
        hamiltonian_builder=segment_hamiltonian_6dim,
        target_state=target,
        **kwargs,
    )


def _embed_ideal(gamma_t: float, psi0: np.ndarray) -> np.ndarray:
    u = np.eye(6, dtype=complex)
    u[np.ix_(LOGICAL_INDICES, LOGICAL_INDICES)] = ideal_two_logical(gamma_t)
    return u @ psi0
