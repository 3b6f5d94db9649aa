"""Dense complex linear algebra for small operators (dim 2 to 16).

Two exponential routes are provided: an exact SU(2) axis-angle formula for
2x2 generators and a scaling-and-squaring truncated series for anything
larger.  Both return the propagator exp(-i H t) for Hermitian H.
"""
from __future__ import annotations

import cmath
import math

import numpy as np

from .config import DEFAULTS

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().swapaxes(-1, -2)


def max_abs(a: np.ndarray) -> float:
    return float(np.max(np.abs(a))) if a.size else 0.0


def hermiticity_defect(a: np.ndarray) -> float:
    """Largest entry of |A - A^dagger|."""
    return max_abs(a - dagger(a))


def unitarity_defect(u: np.ndarray) -> float:
    """Largest entry of |U^dagger U - I|."""
    return max_abs(dagger(u) @ u - np.eye(u.shape[0]))


def is_hermitian(a: np.ndarray, tol: float = DEFAULTS.hermiticity_tol) -> bool:
    return hermiticity_defect(a) < tol


def is_unitary(u: np.ndarray, tol: float = DEFAULTS.unitarity_tol) -> bool:
    return unitarity_defect(u) < tol


def su2_rotation(axis, angle: float, *, unit_tol: float = DEFAULTS.unit_axis_tol) -> np.ndarray:
    """exp(-i (angle/2) n.sigma) for a unit 3-vector n."""
    n = np.asarray(axis, dtype=float)
    if n.shape != (3,):
        raise ValueError(f"axis must be a 3-vector, got shape {n.shape}")
    norm = float(np.linalg.norm(n))
    if abs(norm - 1.0) > unit_tol:
        raise ValueError(f"axis must be normalized: |axis| = {norm!r} deviates by {abs(norm - 1.0):.3e}")
    half = 0.5 * angle
    c, s = math.cos(half), math.sin(half)
    nds = n[0] * PAULI_X + n[1] * PAULI_Y + n[2] * PAULI_Z
    return c * IDENTITY_2 - 1j * s * nds


def expm2_hermitian(h: np.ndarray, t: float = 1.0) -> np.ndarray:
    """Exact exp(-i h t) for any Hermitian 2x2 (trace handled as a phase)."""
    a = 0.5 * (h[0, 0].real + h[1, 1].real)
    b3 = h[0, 0].real - a
    b1 = h[0, 1].real
    b2 = -h[0, 1].imag
    b = math.sqrt(b1 * b1 + b2 * b2 + b3 * b3)
    phase = cmath.exp(-1j * a * t)
    if b == 0.0:
        return phase * IDENTITY_2
    c = math.cos(b * t)
    s = math.sin(b * t) / b
    out = np.empty((2, 2), dtype=complex)
    out[0, 0] = phase * (c - 1j * s * b3)
    out[0, 1] = phase * (-1j * s * complex(b1, -b2))
    out[1, 0] = phase * (-1j * s * complex(b1, b2))
    out[1, 1] = phase * (c + 1j * s * b3)
    return out


def matrix_exponential(
    h: np.ndarray,
    t: float = 1.0,
    *,
    herm_tol: float = DEFAULTS.hermiticity_tol,
    order: int = DEFAULTS.taylor_order,
    threshold: float = DEFAULTS.squaring_threshold,
) -> np.ndarray:
    """exp(-i h t) for Hermitian h of dimension <= 16.

    Uses scaling and squaring with a truncated Taylor series; 2x2 inputs
    take the exact axis-angle route.
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    if h.shape[0] > 16:
        raise ValueError(f"dimension {h.shape[0]} exceeds the supported maximum of 16")
    defect = hermiticity_defect(h)
    if defect >= herm_tol:
        raise ValueError(f"generator is not Hermitian: max asymmetry {defect:.3e} >= {herm_tol:.1e}")
    if h.shape[0] == 2:
        return expm2_hermitian(h, t)
    a = -1j * t * h
    norm = float(np.linalg.norm(a, np.inf))
    squarings = 0
    while norm > threshold:
        norm *= 0.5
        squarings += 1
    a /= 2.0**squarings
    result = np.eye(h.shape[0], dtype=complex)
    term = np.eye(h.shape[0], dtype=complex)
    for k in range(1, order + 1):
        term = term @ a / k
        result += term
    for _ in range(squarings):
        result = result @ result
    return result
