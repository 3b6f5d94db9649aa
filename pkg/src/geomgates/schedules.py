"""Pulse-schedule builders for the three geometric gate schemes.

A gate is parameterized by (theta, phi, gamma) and targets the rotation
exp(i gamma n.sigma) with n = (sin theta cos phi, sin theta sin phi,
cos theta).  Three builders produce piecewise-constant square-pulse
schedules realizing that gate:

* single loop: the three-segment orange-slice path with plain pulse areas
  (theta, pi, pi - theta), all resonant;
* composite: N concatenated single loops, each carrying phase gamma / N;
* dynamically corrected: nine segments, with a correction rotation
  inserted mid-segment into each leg of the single loop.  The inserted
  first and third corrections are detuned so their rotation axes tilt out
  of the equatorial plane.

All amplitudes are in units of the base Rabi rate and durations in its
inverse; the drive amplitude is held at OMEGA_M on every segment.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import IO, Optional

import numpy as np

from .config import DEFAULTS, OMEGA_M
from .linalg import su2_rotation

SCHEME_SINGLE_LOOP = "SingleLoop"
SCHEME_DYN_CORRECTED = "DynCorrected"


def composite_tag(loops: int) -> str:
    return f"Composite({loops})"


def wrap_angle(x: float) -> float:
    """Reduce an angle to the canonical interval (-pi, pi]."""
    w = math.remainder(x, 2.0 * math.pi)
    return math.pi if w == -math.pi else w


@dataclass(frozen=True)
class GateParams:
    """Target gate exp(i gamma n.sigma); theta in [0, pi], phi/gamma wrapped."""

    theta: float
    phi: float
    gamma: float

    def __post_init__(self):
        if not 0.0 <= self.theta <= math.pi:
            raise ValueError(f"theta must lie in [0, pi], got {self.theta!r}")
        object.__setattr__(self, "phi", wrap_angle(self.phi))
        object.__setattr__(self, "gamma", wrap_angle(self.gamma))

    @property
    def axis(self) -> np.ndarray:
        st = math.sin(self.theta)
        return np.array([st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)])

    def target_unitary(self) -> np.ndarray:
        """exp(i gamma n.sigma) as a 2x2 matrix."""
        return su2_rotation(self.axis, -2.0 * self.gamma)


@dataclass(frozen=True)
class PulseSegment:
    duration: float
    rabi: float
    phase: float
    detuning: float = 0.0

    def __post_init__(self):
        if self.duration < 0.0:
            raise ValueError(f"segment duration must be >= 0, got {self.duration!r}")

    @property
    def area(self) -> float:
        """Plain pulse area: duration * rabi."""
        return self.duration * self.rabi

    @property
    def generalized_area(self) -> float:
        return self.duration * math.hypot(self.rabi, self.detuning)


@dataclass(frozen=True)
class ErrorModel:
    """Coherent error ratios plus decoherence rates (units of OMEGA_M)."""

    epsilon: float = 0.0
    delta: float = 0.0
    gamma1: float = 0.0
    gamma2: float = 0.0

    def __post_init__(self):
        if self.gamma1 < 0.0 or self.gamma2 < 0.0:
            raise ValueError("decoherence rates must be non-negative")
        if not math.isfinite(self.delta):
            raise ValueError("delta must be finite")


@dataclass(frozen=True)
class Schedule:
    segments: tuple
    scheme: str
    gate: GateParams
    error: Optional[ErrorModel] = None
    encoded: bool = field(default=False)

    @property
    def duration(self) -> float:
        return sum(s.duration for s in self.segments)

    @property
    def total_area(self) -> float:
        """Plain area sum(Omega * dt) over the whole schedule."""
        return sum(s.area for s in self.segments)

    def to_dict(self) -> dict:
        err = self.error or ErrorModel()
        return {
            "scheme": self.scheme,
            "gate": {"theta": self.gate.theta, "phi": self.gate.phi, "gamma": self.gate.gamma},
            "segments": [
                {"duration": s.duration, "rabi": s.rabi, "phase": s.phase, "detuning": s.detuning}
                for s in self.segments
            ],
            "error": {"epsilon": err.epsilon, "delta": err.delta},
        }

    def to_json(self, fp: Optional[IO[str]] = None, indent: int = 2) -> str:
        text = json.dumps(self.to_dict(), indent=indent)
        if fp is not None:
            fp.write(text + "\n")
        return text

    @classmethod
    def from_dict(cls, data: dict) -> "Schedule":
        gate = GateParams(**data["gate"])
        segments = tuple(PulseSegment(**seg) for seg in data["segments"])
        err = data.get("error")
        error = ErrorModel(**err) if err else None
        if error is not None and error.epsilon == 0.0 and error.delta == 0.0:
            error = None
        return cls(segments=segments, scheme=data["scheme"], gate=gate, error=error)

    @classmethod
    def from_json(cls, text: str) -> "Schedule":
        return cls.from_dict(json.loads(text))


def build_single_loop(gate: GateParams) -> Schedule:
    """Three resonant segments with areas (theta, pi, pi - theta).

    The drive phases (phi - pi/2, phi + gamma + pi/2, phi - pi/2) steer the
    cyclic state up the phi longitude, pole to pole along phi + gamma, and
    back down along phi; the composed propagator is exp(i gamma n.sigma).
    """
    th, ph, ga = gate.theta, gate.phi, gate.gamma
    segments = (
        PulseSegment(th / OMEGA_M, OMEGA_M, wrap_angle(ph - math.pi / 2)),
        PulseSegment(math.pi / OMEGA_M, OMEGA_M, wrap_angle(ph + ga + math.pi / 2)),
        PulseSegment((math.pi - th) / OMEGA_M, OMEGA_M, wrap_angle(ph - math.pi / 2)),
    )
    return Schedule(segments=segments, scheme=SCHEME_SINGLE_LOOP, gate=gate)


def build_composite(gate: GateParams, loops: int = 2) -> Schedule:
    """N concatenated single loops, each with geometric phase gamma / N."""
    if not isinstance(loops, int) or loops < 2:
        raise ValueError(f"composite scheme needs an integer loop count >= 2, got {loops!r}")
    unit = build_single_loop(GateParams(gate.theta, gate.phi, gate.gamma / loops))
    return Schedule(segments=unit.segments * loops, scheme=composite_tag(loops), gate=gate)


def _detuned_segment(area: float, phase: float, tan_half: float) -> PulseSegment:
    """Inserted correction segment with generalized area `area`.

    The detuning is OMEGA_M / tan_half; zero area degenerates to a
    zero-duration identity segment before the detuning is ever formed.
    """
    if area <= DEFAULTS.zero_area_tol:
        return PulseSegment(0.0, OMEGA_M, phase, 0.0)
    detuning = OMEGA_M / tan_half
    duration = area / math.hypot(OMEGA_M, detuning)
    return PulseSegment(duration, OMEGA_M, phase, detuning)


def build_dyn_corrected(gate: GateParams) -> Schedule:
    """Nine-segment dynamically corrected schedule.

    Segments 2, 5 and 8 are the inserted corrections: the middle one is a
    plain pi rotation about phase phi + gamma + pi, while the outer two are
    detuned rotations about axes tilted to polar angles theta/2 and
    (theta + pi)/2.  At theta = 0 the first three segments vanish and the
    schedule degenerates to the six-segment form.
    """
    th, ph, ga = gate.theta, gate.phi, gate.gamma
    half = math.pi / 2
    segments = (
        PulseSegment(th / 2 / OMEGA_M, OMEGA_M, wrap_angle(ph - half)),
        _detuned_segment(th, wrap_angle(ph), math.tan(th / 2)),
        PulseSegment(th / 2 / OMEGA_M, OMEGA_M, wrap_angle(ph - half)),
        PulseSegment(half / OMEGA_M, OMEGA_M, wrap_angle(ph + ga + half)),
        PulseSegment(math.pi / OMEGA_M, OMEGA_M, wrap_angle(ph + ga + math.pi)),
        PulseSegment(half / OMEGA_M, OMEGA_M, wrap_angle(ph + ga + half)),
        PulseSegment((math.pi - th) / 2 / OMEGA_M, OMEGA_M, wrap_angle(ph - half)),
        _detuned_segment(math.pi - th, wrap_angle(ph), math.tan((th + math.pi) / 2)),
        PulseSegment((math.pi - th) / 2 / OMEGA_M, OMEGA_M, wrap_angle(ph - half)),
    )
    return Schedule(segments=segments, scheme=SCHEME_DYN_CORRECTED, gate=gate)


def apply_error(schedule: Schedule, error: ErrorModel, *, encoded: bool = False) -> Schedule:
    """Bake a coherent error into a schedule.

    Every segment's Rabi amplitude is scaled by (1 + epsilon); detunings
    are untouched.  The dephasing shift delta is recorded on the schedule
    for the evolution engine, which adds the corresponding constant energy
    term (-delta * |1><1| uncoded, -delta * identity on the logical span
    when encoded).
    """
    if abs(error.epsilon) > 0.5:
        raise ValueError(f"|epsilon| must be <= 0.5, got {error.epsilon!r}")
    scale = 1.0 + error.epsilon
    segments = tuple(replace(s, rabi=s.rabi * scale) for s in schedule.segments)
    prior = schedule.error or ErrorModel()
    combined = ErrorModel(
        epsilon=(1.0 + prior.epsilon) * scale - 1.0,
        delta=error.delta,
        gamma1=error.gamma1,
        gamma2=error.gamma2,
    )
    return replace(schedule, segments=segments, error=combined, encoded=encoded or schedule.encoded)
