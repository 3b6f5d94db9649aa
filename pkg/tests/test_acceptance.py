"""Acceptance gate: eight go/no-go checks covering exact gate synthesis,
analytic error-series coefficients, decoherence headlines, robustness
ordering, the dynamical-phase ledger, the logical encoding, oracle
equivalence and the closed-form phase-gate fidelity law.

Each test prints a single PASS/FAIL line for its criterion.
"""
import math

import numpy as np

from _oracles import rk4_schrodinger_propagator, single_loop_phase_gate_fidelity
from geomgates import dfs
from geomgates.engine import (
    dynamical_phase_ledger,
    gate_fidelity,
    lindblad_evolve,
    propagate_unitary,
)
from geomgates.harness import (
    SERIES_TARGETS,
    build_schedule,
    resolve_gate,
    two_qubit_gate_fidelity,
    unitary_gate_fidelity,
    verify_series,
)
from geomgates.schedules import ErrorModel, GateParams

RNG = np.random.default_rng(20240820)
SCHEMES = ("singleloop", "composite", "dyncorrected")


def _report(num: int, title: str, failures):
    status = "PASS" if not failures else "FAIL"
    print(f"\n[ACCEPTANCE] criterion {num} ({title}): {status}")
    for line in failures:
        print(f"    {line}")
    assert not failures, f"criterion {num} ({title}) failed: {failures}"


def test_criterion_1_exact_gate_reproduction():
    """Every scheme reproduces exp(i gamma n.sigma) exactly at zero error."""
    thetas = np.linspace(0.0, math.pi, 20)
    phis = np.linspace(-math.pi, math.pi, 20, endpoint=False)
    gammas = np.linspace(-math.pi, math.pi, 20, endpoint=False)
    worst = 1.0
    failures = []
    for th in thetas:
        for ph in phis:
            for ga in gammas:
                gate = GateParams(float(th), float(ph), float(ga))
                ideal = gate.target_unitary()
                for scheme in SCHEMES:
                    sched = build_schedule(scheme, gate)
                    u = propagate_unitary(sched).final_propagator
                    f = gate_fidelity(u, ideal)
                    worst = min(worst, f)
                    if f < 1.0 - 1e-10:
                        failures.append(
                            f"{scheme} at (theta={th:.3f}, phi={ph:.3f}, gamma={ga:.3f}): F={f!r}"
                        )
    print(f"\n    worst-case fidelity over 20^3 x 3 grid: {worst!r}")
    _report(1, "exact gate reproduction", failures[:10])


def test_criterion_2_error_series_coefficients():
    """Fitted c2/c3/c4 match the analytic second/third/fourth-order values."""
    failures = []
    for (gate, scheme), targets in sorted(SERIES_TARGETS.items()):
        report = verify_series(gate, scheme)
        for check in report.checks:
            if check.target is None:
                detail = f"{gate}/{scheme} |{check.coefficient}| = {abs(check.value):.3e} (bound {check.tolerance:.0e})"
            else:
                rel = abs(check.value - check.target) / abs(check.target)
                detail = (
                    f"{gate}/{scheme} {check.coefficient} = {check.value:.5f} "
                    f"vs {check.target:.5f} (dev {rel:.1%}, tol {check.tolerance:.0%})"
                )
            print(f"    [{'PASS' if check.passed else 'FAIL'}] {detail}")
            if not check.passed:
                failures.append(detail)
    _report(2, "analytic error-series coefficients", failures)


def test_criterion_3_decoherence_headline_fidelities():
    """Dyn-corrected S, H and the two-logical-qubit gate under rates 1e-4."""
    rates = ErrorModel(gamma1=1e-4, gamma2=1e-4)
    failures = []

    def check(label, value, target, tol):
        line = f"{label}: {value:.5f} (target {target} +/- {tol})"
        print(f"    [{'PASS' if abs(value - target) <= tol else 'FAIL'}] {line}")
        if abs(value - target) > tol:
            failures.append(line)

    plus = np.array([1.0, 1.0], dtype=complex) / math.sqrt(2.0)
    zero = np.array([1.0, 0.0], dtype=complex)
    for label, gate_name, psi0, target, tol in [
        ("dyn-corrected S from |+>", "S", plus, 0.9986, 0.001),
        ("dyn-corrected H from |0>", "H", zero, 0.9988, 0.001),
    ]:
        sched = build_schedule("dyncorrected", resolve_gate(gate_name))
        rho0 = np.outer(psi0, psi0.conj())
        res = lindblad_evolve(sched, rates, rho0, samples=5)
        check(label, res.trajectory[-1].state_fidelity, target, tol)

    res = dfs.two_logical_lindblad(math.pi / 2, rates, samples=5)
    check("two-logical-qubit U2(pi/2)", res.trajectory[-1].state_fidelity, 0.9967, 0.002)
    _report(3, "decoherence headline fidelities", failures)


def test_criterion_4_robustness_ordering():
    """Dynamically corrected > composite > single loop at |epsilon| = 0.1."""
    failures = []
    for eps in (-0.1, 0.1):
        for name in ("S", "H"):
            fids = {
                scheme: unitary_gate_fidelity(build_schedule(scheme, resolve_gate(name)), eps)
                for scheme in SCHEMES
            }
            if not fids["dyncorrected"] > fids["composite"] > fids["singleloop"]:
                failures.append(f"{name} at eps={eps}: {fids}")
        fids = {scheme: two_qubit_gate_fidelity(scheme, eps) for scheme in SCHEMES}
        if not fids["dyncorrected"] > fids["composite"] > fids["singleloop"]:
            failures.append(f"U2 at eps={eps}: {fids}")
    _report(4, "robustness ordering", failures)


def test_criterion_5_dynamical_phase_ledger():
    """Inserted-segment phases are (-theta/2, pi/2, (theta-pi)/2), summing to 0."""
    failures = []
    for th in np.linspace(0.0, math.pi, 5):
        for ph in np.linspace(-math.pi, math.pi, 4, endpoint=False):
            for ga in np.linspace(-math.pi, math.pi, 4, endpoint=False):
                gate = GateParams(float(th), float(ph), float(ga))
                ledger = dynamical_phase_ledger(build_schedule("dyncorrected", gate))
                inserted = np.array([ledger[1], ledger[4], ledger[7]])
                expected = np.array([-th / 2, math.pi / 2, (th - math.pi) / 2])
                if np.max(np.abs(inserted - expected)) > 1e-8:
                    failures.append(f"(theta={th:.3f}, phi={ph:.3f}, gamma={ga:.3f}): {inserted}")
                if abs(sum(ledger)) > 1e-8:
                    failures.append(f"ledger sum {sum(ledger):.2e} at (theta={th:.3f})")
    _report(5, "dynamical-phase ledger", failures[:10])


def test_criterion_6_logical_encoding_properties():
    """The coupling preserves the code space and collective dephasing is inert."""
    failures = []
    h16 = dfs.build_physical_four_qubit(1.0, 0.7)
    p = dfs.s2_projector()
    off = float(np.linalg.norm((np.eye(16) - p) @ h16 @ p))
    if off >= 1e-12:
        failures.append(f"off-block norm {off:.3e}")
    mismatch = float(
        np.max(np.abs(dfs.restrict_to_s2prime(h16) - dfs.build_two_logical_6dim(1.0, 0.7, 0.0)))
    )
    if mismatch >= 1e-12:
        failures.append(f"restriction mismatch {mismatch:.3e}")

    gate = resolve_gate("H")
    sched = build_schedule("dyncorrected", gate)
    base = unitary_gate_fidelity(sched, 0.0, 0.0, encoded=True)
    for delta in (0.02, 0.1, 0.3):
        f = unitary_gate_fidelity(sched, 0.0, delta, encoded=True)
        if abs(f - base) >= 1e-12:
            failures.append(f"encoded fidelity moved by {abs(f - base):.3e} at delta={delta}")
    uncoded = unitary_gate_fidelity(sched, 0.0, 0.1)
    if uncoded > 1.0 - 1e-4:
        failures.append(f"uncoded gate barely affected at delta=0.1: F={uncoded!r}")
    _report(6, "logical-encoding properties", failures)


def test_criterion_7_oracle_equivalence():
    """Closed-form propagators match independent RK4 integration."""
    failures = []
    worst = 0.0
    for k in range(50):
        gate = GateParams(
            float(RNG.uniform(0.0, math.pi)),
            float(RNG.uniform(-math.pi, math.pi)),
            float(RNG.uniform(-math.pi, math.pi)),
        )
        scheme = SCHEMES[k % 3]
        sched = build_schedule(scheme, gate)
        eps = float(RNG.uniform(-0.1, 0.1))
        delta = float(RNG.uniform(-0.1, 0.1))
        u_exact = propagate_unitary(sched, ErrorModel(epsilon=eps, delta=delta)).final_propagator
        u_rk4 = rk4_schrodinger_propagator(sched, scale=1.0 + eps, delta=delta)
        dev = float(np.max(np.abs(u_exact - u_rk4)))
        worst = max(worst, dev)
        if dev >= 1e-7:
            failures.append(f"schedule {k} ({scheme}): deviation {dev:.3e}")
    print(f"\n    worst RK4 deviation over 50 schedules: {worst:.3e}")

    for scheme in SCHEMES:
        gate = GateParams(0.9, 0.3, -1.1)
        sched = build_schedule(scheme, gate)
        psi0 = np.array([0.6, 0.8j], dtype=complex)
        rho0 = np.outer(psi0, psi0.conj())
        res = lindblad_evolve(sched, ErrorModel(epsilon=0.03), rho0, samples=3)
        u = propagate_unitary(sched, ErrorModel(epsilon=0.03)).final_propagator
        dev = float(np.max(np.abs(res.final_density - u @ rho0 @ u.conj().T)))
        if dev >= 1e-8:
            failures.append(f"zero-rate Lindblad vs unitary conjugation ({scheme}): {dev:.3e}")
    _report(7, "oracle equivalence", failures)


def test_criterion_8_closed_form_phase_gate_fidelity():
    """Single-loop theta = 0 gates obey F = |cos^2 + sin^2 cos(gamma)| exactly."""
    failures = []
    worst = 0.0
    for ga in (-math.pi / 4, -math.pi / 8, 0.9, 2.0):
        gate = GateParams(0.0, 0.0, ga)
        sched = build_schedule("singleloop", gate)
        for eps in np.linspace(-0.1, 0.1, 41):
            measured = unitary_gate_fidelity(sched, float(eps))
            expected = single_loop_phase_gate_fidelity(float(eps), ga)
            dev = abs(measured - expected)
            worst = max(worst, dev)
            if dev >= 1e-9:
                failures.append(f"gamma={ga:.3f}, eps={eps:.3f}: dev {dev:.3e}")
    print(f"\n    worst deviation from the closed form: {worst:.3e}")
    _report(8, "closed-form phase-gate fidelity", failures[:10])
