"""Command-line front end: schedule dumps, trajectories, sweeps, heatmaps,
series verification and the two-logical-qubit experiments.

Exit codes: 0 on success, 2 on validation errors, 3 when a verification
check fails.
"""
from __future__ import annotations

import json
import math
import sys
from contextlib import contextmanager
from typing import Optional

import click
import numpy as np

from . import dfs
from .config import DEFAULTS
from .engine import lindblad_evolve, propagate_unitary, state_fidelity, write_trajectory_csv
from .harness import (
    Axis,
    EPSILON_DEFAULT_RANGE,
    GAMMA_DEFAULT_RANGE,
    SCHEMES,
    SweepSpec,
    build_schedule,
    resolve_gate,
    run_sweep,
    verify_series,
    write_csv,
)
from .schedules import ErrorModel, GateParams, apply_error

NAMED_STATES = {
    "zero": np.array([1.0, 0.0], dtype=complex),
    "one": np.array([0.0, 1.0], dtype=complex),
    "plus": np.array([1.0, 1.0], dtype=complex) / math.sqrt(2.0),
}


@contextmanager
def _validation():
    try:
        yield
    except (ValueError, RuntimeError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)


def _parse_grid(text: str, name: str = "--grid") -> Axis:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"{name} expects start:stop:count, got {text!r}")
    return Axis("epsilon", float(parts[0]), float(parts[1]), int(parts[2]))


def _gate_params(gate: Optional[str], theta, phi, gamma) -> GateParams:
    if gate is not None:
        return resolve_gate(gate)
    if theta is None or phi is None or gamma is None:
        raise ValueError("give either --gate or all of --theta/--phi/--gamma")
    return GateParams(theta, phi, gamma)


def _parse_state(text: str) -> np.ndarray:
    if text in NAMED_STATES:
        return NAMED_STATES[text].copy()
    try:
        amps = [complex(part) for part in text.split(",")]
    except ValueError:
        raise ValueError(f"cannot parse state {text!r}; use zero/one/plus or comma-separated amplitudes")
    psi = np.array(amps, dtype=complex)
    norm = float(np.linalg.norm(psi))
    if norm == 0.0:
        raise ValueError("state amplitudes are all zero")
    return psi / norm


def _open_out(out: Optional[str]):
    return open(out, "w") if out else sys.stdout


scheme_option = click.option("--scheme", type=click.Choice(SCHEMES), default="dyncorrected", show_default=True)
loops_option = click.option("--loops", type=int, default=2, show_default=True, help="Composite loop count.")
out_option = click.option("--out", type=click.Path(), default=None, help="Output file (default stdout).")


@click.group()
def main():
    """Geometric gate schedules, simulation and robustness verification."""


@main.command("schedule")
@click.option("--gate", default=None, help="Named gate: S, T or H.")
@click.option("--theta", type=float, default=None)
@click.option("--phi", type=float, default=None)
@click.option("--gamma", type=float, default=None)
@scheme_option
@loops_option
@click.option("--epsilon", type=float, default=0.0, show_default=True)
@click.option("--delta", type=float, default=0.0, show_default=True)
@out_option
def cmd_schedule(gate, theta, phi, gamma, scheme, loops, epsilon, delta, out):
    """Emit a pulse schedule as JSON."""
    with _validation():
        params = _gate_params(gate, theta, phi, gamma)
        sched = build_schedule(scheme, params, loops)
        if epsilon or delta:
            sched = apply_error(sched, ErrorModel(epsilon=epsilon, delta=delta))
        fp = _open_out(out)
        try:
            sched.to_json(fp)
        finally:
            if out:
                fp.close()


@main.command("trajectory")
@click.option("--gate", default=None)
@click.option("--theta", type=float, default=None)
@click.option("--phi", type=float, default=None)
@click.option("--gamma", type=float, default=None)
@scheme_option
@loops_option
@click.option("--state", default="plus", show_default=True, help="zero/one/plus or amplitudes a,b.")
@click.option("--epsilon", type=float, default=0.0, show_default=True)
@click.option("--delta", type=float, default=0.0, show_default=True)
@click.option("--gamma1", type=float, default=0.0, show_default=True)
@click.option("--gamma2", type=float, default=0.0, show_default=True)
@click.option("--step", type=float, default=DEFAULTS.lindblad_step, show_default=True)
@click.option("--samples", type=int, default=DEFAULTS.trajectory_samples, show_default=True)
@out_option
def cmd_trajectory(gate, theta, phi, gamma, scheme, loops, state, epsilon, delta, gamma1, gamma2, step, samples, out):
    """Evolve an initial state through a schedule and export the CSV trajectory."""
    with _validation():
        params = _gate_params(gate, theta, phi, gamma)
        sched = build_schedule(scheme, params, loops)
        psi0 = _parse_state(state)
        error = ErrorModel(epsilon=epsilon, delta=delta, gamma1=gamma1, gamma2=gamma2)
        if gamma1 == 0.0 and gamma2 == 0.0:
            result = propagate_unitary(sched, error, psi0, samples=samples)
        else:
            rho0 = np.outer(psi0, psi0.conj())
            target = params.target_unitary() @ psi0
            result = lindblad_evolve(
                sched, error, rho0, step=step, samples=samples, target_state=target
            )
        fp = _open_out(out)
        try:
            write_trajectory_csv(result, fp)
        finally:
            if out:
                fp.close()
        final = result.trajectory[-1].state_fidelity
        click.echo(f"final state fidelity: {final:.6f}", err=True)


def _spec_from_options(config, **overrides) -> SweepSpec:
    data = {}
    if config:
        with open(config) as fh:
            data = json.load(fh)
    spec = SweepSpec.from_dict(data) if data else SweepSpec()
    for key, value in overrides.items():
        if value is not None:
            setattr(spec, key, value)
    spec.__post_init__()
    return spec


@main.command("sweep")
@click.option("--gate", default=None, help="S, T, H or U2.")
@click.option("--scheme", type=click.Choice(SCHEMES), default=None)
@click.option("--loops", type=int, default=None)
@click.option("--axis", "axis_name", type=click.Choice(["epsilon", "delta", "Gamma"]), default=None)
@click.option("--grid", default=None, help="Axis range start:stop:count.")
@click.option("--gamma1", type=float, default=None)
@click.option("--gamma2", type=float, default=None)
@click.option("--encoded", is_flag=True, default=False, help="Treat the dephasing shift as acting on an encoded logical pair.")
@click.option("--config", type=click.Path(exists=True), default=None, help="JSON sweep spec; flags override.")
@click.option("--step", type=float, default=None)
@out_option
def cmd_sweep(gate, scheme, loops, axis_name, grid, gamma1, gamma2, encoded, config, step, out):
    """1-D fidelity sweep over a coherent-error or decoherence axis."""
    with _validation():
        axis = None
        if grid is not None:
            axis = _parse_grid(grid)
            axis.name = axis_name or "epsilon"
            axis.__post_init__()
        elif axis_name is not None:
            default = GAMMA_DEFAULT_RANGE if axis_name == "Gamma" else EPSILON_DEFAULT_RANGE
            axis = Axis(axis_name, *default, 41)
        spec = _spec_from_options(
            config,
            gate=gate,
            scheme=scheme,
            loops=loops,
            axis1=axis,
            gamma1=gamma1,
            gamma2=gamma2,
            encoded=encoded or None,
            step=step,
            output=out,
        )
        header, rows = run_sweep(spec)
        fp = _open_out(spec.output)
        try:
            write_csv(header, rows, fp)
        finally:
            if spec.output:
                fp.close()


@main.command("heatmap")
@click.option("--gate", default=None)
@click.option("--scheme", type=click.Choice(SCHEMES), default=None)
@click.option("--loops", type=int, default=None)
@click.option("--grid", default=None, help="Epsilon range start:stop:count.")
@click.option("--gamma-grid", default=None, help="Gamma range start:stop:count.")
@click.option("--config", type=click.Path(exists=True), default=None)
@click.option("--step", type=float, default=None)
@out_option
def cmd_heatmap(gate, scheme, loops, grid, gamma_grid, config, step, out):
    """2-D gate-fidelity grid over epsilon x Gamma (row-major CSV)."""
    with _validation():
        ax1 = _parse_grid(grid) if grid else Axis("epsilon", *EPSILON_DEFAULT_RANGE, 41)
        ax1.name = "epsilon"
        ax2 = _parse_grid(gamma_grid, "--gamma-grid") if gamma_grid else Axis("epsilon", *GAMMA_DEFAULT_RANGE, 41)
        ax2.name = "Gamma"
        ax2.__post_init__()
        spec = _spec_from_options(
            config, gate=gate, scheme=scheme, loops=loops, axis1=ax1, axis2=ax2, step=step, output=out
        )
        header, rows = run_sweep(spec)
        fp = _open_out(spec.output)
        try:
            write_csv(header, rows, fp)
        finally:
            if spec.output:
                fp.close()


@main.command("verify-appendix")
@click.option("--gate", type=click.Choice(["S", "H"]), required=True)
@scheme_option
@loops_option
@out_option
def cmd_verify_appendix(gate, scheme, loops, out):
    """Fit the fidelity series in epsilon and check the analytic coefficients."""
    with _validation():
        report = verify_series(gate, scheme, loops)
    lines = [f"series fit for {gate}/{scheme} (residual {report.fit.residual:.3e})"]
    for c in report.checks:
        status = "PASS" if c.passed else "FAIL"
        if c.target is None:
            lines.append(f"  [{status}] |{c.coefficient}| = {abs(c.value):.3e} < {c.tolerance:.1e}")
        else:
            rel = abs(c.value - c.target) / abs(c.target)
            lines.append(
                f"  [{status}] {c.coefficient} = {c.value:.6f} vs {c.target:.6f} "
                f"(rel. dev. {rel:.2%}, tol {c.tolerance:.0%})"
            )
    text = "\n".join(lines)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    click.echo(text)
    if not report.passed:
        sys.exit(3)


@main.command("two-qubit")
@click.option("--gamma-t", type=float, default=math.pi / 2, show_default=True, help="Logical controlled phase.")
@scheme_option
@loops_option
@click.option("--epsilon", type=float, default=0.0, show_default=True)
@click.option("--gamma1", type=float, default=0.0, show_default=True)
@click.option("--gamma2", type=float, default=0.0, show_default=True)
@click.option("--grid", default=None, help="Run an epsilon sweep start:stop:count instead of a trajectory.")
@click.option("--step", type=float, default=DEFAULTS.lindblad_step, show_default=True)
@click.option("--samples", type=int, default=DEFAULTS.trajectory_samples, show_default=True)
@out_option
def cmd_two_qubit(gamma_t, scheme, loops, epsilon, gamma1, gamma2, grid, step, samples, out):
    """Two-logical-qubit controlled-phase gate in the 6-dim encoded space."""
    with _validation():
        if grid is not None:
            axis = _parse_grid(grid)
            spec = SweepSpec(scheme=scheme, gate="U2", loops=loops, axis1=axis, output=out)
            header, rows = run_sweep(spec)
            fp = _open_out(out)
            try:
                write_csv(header, rows, fp)
            finally:
                if out:
                    fp.close()
            return
        error = ErrorModel(epsilon=epsilon, gamma1=gamma1, gamma2=gamma2)
        if gamma1 == 0.0 and gamma2 == 0.0:
            res = dfs.run_two_logical_gate(gamma_t, error, scheme=scheme, loops=loops)
            psi0 = dfs.uniform_logical_state()
            psi = res.full @ psi0
            target = dfs._embed_ideal(gamma_t, psi0)
            fid = float(abs(np.vdot(target, psi)) ** 2)
            click.echo(f"final state fidelity: {fid:.6f} (leakage norm {res.leakage:.3e})", err=True)
            return
        result = dfs.two_logical_lindblad(
            gamma_t, error, scheme=scheme, loops=loops, step=step, samples=samples
        )
        fp = _open_out(out)
        try:
            write_trajectory_csv(result, fp)
        finally:
            if out:
                fp.close()
        click.echo(f"final state fidelity: {result.trajectory[-1].state_fidelity:.6f}", err=True)


if __name__ == "__main__":
    main()
