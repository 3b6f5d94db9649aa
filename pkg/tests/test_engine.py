"""Unit tests for unitary propagation, the Lindblad integrator, ledgers
and fidelity metrics."""
import io
import math

import numpy as np
import pytest

from _oracles import rk4_schrodinger_propagator
from geomgates.engine import (
    SIGMA_DECAY,
    SIGMA_DEPHASE,
    dynamical_phase_ledger,
    gate_fidelity,
    lindblad_evolve,
    propagate_unitary,
    segment_hamiltonian,
    state_fidelity,
    write_trajectory_csv,
)
from geomgates.schedules import (
    ErrorModel,
    GateParams,
    PulseSegment,
    apply_error,
    build_composite,
    build_dyn_corrected,
    build_single_loop,
)

RNG = np.random.default_rng(20240818)

PLUS = np.array([1.0, 1.0], dtype=complex) / math.sqrt(2.0)


def random_gate():
    return GateParams(
        float(RNG.uniform(0.0, math.pi)),
        float(RNG.uniform(-math.pi, math.pi)),
        float(RNG.uniform(-math.pi, math.pi)),
    )


def test_segment_hamiltonian_layout():
    seg = PulseSegment(1.0, 0.8, 0.4, detuning=0.25)
    h = segment_hamiltonian(seg)
    assert abs(h[0, 0] - 0.125) < 1e-14
    assert abs(h[0, 1] - 0.4 * np.exp(-0.4j)) < 1e-14
    assert np.allclose(h, h.conj().T)
    h_shift = segment_hamiltonian(seg, delta=0.1)
    assert abs((h_shift - h)[1, 1] + 0.1) < 1e-14
    assert (h_shift - h)[0, 0] == 0.0
    h_enc = segment_hamiltonian(seg, delta=0.1, encoded=True)
    assert np.allclose(h_enc - h, -0.1 * np.eye(2))


@pytest.mark.parametrize("builder", [build_single_loop, build_composite, build_dyn_corrected])
def test_exact_gate_reproduction_spot_checks(builder):
    for _ in range(10):
        gate = random_gate()
        sched = builder(gate)
        u = propagate_unitary(sched).final_propagator
        assert gate_fidelity(u, gate.target_unitary()) >= 1.0 - 1e-12


def test_propagate_rejects_decoherence_rates():
    sched = build_single_loop(GateParams(0.0, 0.0, -math.pi / 4))
    with pytest.raises(ValueError, match="zero decoherence"):
        propagate_unitary(sched, ErrorModel(gamma1=1e-4))


def test_propagate_trajectory_sampling():
    sched = build_single_loop(GateParams(0.3, 0.1, -0.5))
    res = propagate_unitary(sched, None, np.array([1.0, 0.0]), samples=50)
    assert len(res.trajectory) == 50
    times = [s.time for s in res.trajectory]
    assert times == sorted(times)
    assert abs(times[-1] - sched.duration) < 1e-9
    for s in res.trajectory:
        assert abs(sum(s.populations) - 1.0) < 1e-9
    assert len(res.phase_ledger) == 3


def test_propagate_rejects_unnormalized_state():
    sched = build_single_loop(GateParams(0.3, 0.1, -0.5))
    with pytest.raises(ValueError, match="normalized"):
        propagate_unitary(sched, None, np.array([1.0, 1.0]))


def test_baked_error_matches_explicit_error():
    gate = GateParams(0.7, -0.3, -1.1)
    sched = build_dyn_corrected(gate)
    err = ErrorModel(epsilon=0.08, delta=0.03)
    u_explicit = propagate_unitary(sched, err).final_propagator
    u_baked = propagate_unitary(apply_error(sched, err)).final_propagator
    assert np.max(np.abs(u_explicit - u_baked)) < 1e-12


def test_single_loop_ledger_is_zero():
    """The cyclic state stays orthogonal to the drive on every leg."""
    for _ in range(5):
        ledger = dynamical_phase_ledger(build_single_loop(random_gate()))
        assert np.max(np.abs(ledger)) < 1e-10


def test_dyn_corrected_ledger_inserted_segments():
    gate = GateParams(1.2, 0.5, -0.8)
    ledger = dynamical_phase_ledger(build_dyn_corrected(gate))
    assert len(ledger) == 9
    inserted = [ledger[1], ledger[4], ledger[7]]
    expected = [-gate.theta / 2, math.pi / 2, (gate.theta - math.pi) / 2]
    assert np.allclose(inserted, expected, atol=1e-10)
    assert abs(sum(ledger)) < 1e-10


def test_gate_fidelity_properties():
    u = GateParams(0.4, 0.2, -0.9).target_unitary()
    assert abs(gate_fidelity(u, u) - 1.0) < 1e-14
    assert abs(gate_fidelity(np.exp(0.7j) * u, u) - 1.0) < 1e-14
    with pytest.raises(ValueError, match="mismatch"):
        gate_fidelity(u, np.eye(3))


def test_state_fidelity_validation():
    rho = np.outer(PLUS, PLUS.conj())
    assert abs(state_fidelity(rho, PLUS) - 1.0) < 1e-14
    with pytest.raises(ValueError, match="mismatch"):
        state_fidelity(rho, np.array([1.0, 0.0, 0.0]))


def test_closed_form_matches_rk4_oracle():
    for _ in range(8):
        gate = random_gate()
        builder = [build_single_loop, build_composite, build_dyn_corrected][int(RNG.integers(3))]
        sched = builder(gate)
        eps = float(RNG.uniform(-0.1, 0.1))
        delta = float(RNG.uniform(-0.1, 0.1))
        u_exact = propagate_unitary(sched, ErrorModel(epsilon=eps, delta=delta)).final_propagator
        u_rk4 = rk4_schrodinger_propagator(sched, scale=1.0 + eps, delta=delta)
        assert np.max(np.abs(u_exact - u_rk4)) < 1e-7


def test_lindblad_validation():
    sched = build_single_loop(GateParams(0.0, 0.0, -math.pi / 4))
    rho = np.outer(PLUS, PLUS.conj())
    with pytest.raises(ValueError, match="step size"):
        lindblad_evolve(sched, ErrorModel(), rho, step=0.0)
    with pytest.raises(ValueError, match="initial density"):
        lindblad_evolve(sched, ErrorModel())
    with pytest.raises(ValueError, match="Hermitian"):
        lindblad_evolve(sched, ErrorModel(), np.array([[0.5, 0.5j], [0.5j, 0.5]]))
    with pytest.raises(ValueError, match="trace"):
        lindblad_evolve(sched, ErrorModel(), 2.0 * rho)


def test_lindblad_zero_rates_matches_unitary():
    gate = GateParams(0.6, 0.2, -0.9)
    sched = build_single_loop(gate)
    rho0 = np.outer(PLUS, PLUS.conj())
    res = lindblad_evolve(sched, ErrorModel(epsilon=0.05), rho0, samples=5)
    u = propagate_unitary(sched, ErrorModel(epsilon=0.05)).final_propagator
    rho_ref = u @ rho0 @ u.conj().T
    assert np.max(np.abs(res.final_density - rho_ref)) < 1e-8


def test_lindblad_preserves_trace_and_decoheres():
    gate = GateParams(0.0, 0.0, -math.pi / 4)
    sched = build_dyn_corrected(gate)
    rho0 = np.outer(PLUS, PLUS.conj())
    res = lindblad_evolve(sched, ErrorModel(gamma1=1e-3, gamma2=1e-3), rho0, samples=10)
    assert abs(np.trace(res.final_density).real - 1.0) < 1e-8
    target = gate.target_unitary() @ PLUS
    fid = state_fidelity(res.final_density, target)
    assert 0.9 < fid < 1.0  # strictly below 1: decoherence bites
    purity = float(np.trace(res.final_density @ res.final_density).real)
    assert purity < 1.0 - 1e-4


def test_lindblad_collapse_operator_constants():
    assert np.allclose(SIGMA_DECAY, [[0, 1], [0, 0]])
    assert np.allclose(SIGMA_DEPHASE, [[-1, 0], [0, 1]])


def test_write_trajectory_csv():
    sched = build_single_loop(GateParams(0.3, 0.1, -0.5))
    res = propagate_unitary(sched, None, np.array([1.0, 0.0]), samples=7)
    buf = io.StringIO()
    write_trajectory_csv(res, buf)
    lines = buf.getvalue().strip().splitlines()
    assert lines[0] == "time,pop_0,pop_1,state_fidelity"
    assert len(lines) == 8
    from geomgates.engine import EvolutionResult

    with pytest.raises(ValueError, match="no trajectory"):
        write_trajectory_csv(EvolutionResult(), io.StringIO())
