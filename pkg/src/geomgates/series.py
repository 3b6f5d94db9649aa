"""Polynomial fitting of fidelity-vs-error curves.

The infidelity of each scheme admits a power-series expansion in the
drive-amplitude error ratio; fitting a degree-6 polynomial over a small
window recovers the quadratic, cubic and quartic coefficients with the
higher orders absorbed by the extra terms.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np


@dataclass(frozen=True)
class SeriesFit:
    c2: float
    c3: float
    c4: float
    se2: float
    se3: float
    se4: float
    residual: float
    coefficients: tuple


def fit_window(half_width: float = 3e-2, inner: float = 1e-4, points_per_side: int = 10) -> np.ndarray:
    """Symmetric sample grid: points_per_side magnitudes per sign plus zero."""
    mags = np.linspace(inner, half_width, points_per_side)
    return np.concatenate([-mags[::-1], [0.0], mags])


def fit_fidelity_series(eps: Sequence[float], fid: Sequence[float], degree: int = 6) -> SeriesFit:
    """Least-squares polynomial fit of F(eps), scaled for conditioning."""
    x = np.asarray(eps, dtype=float)
    y = np.asarray(fid, dtype=float)
    if x.size <= degree + 1:
        raise ValueError(f"need more than {degree + 1} samples for a degree-{degree} fit")
    s = float(np.max(np.abs(x)))
    design = np.vander(x / s, degree + 1, increasing=True)
    b, rss, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    fitted = design @ b
    residual = float(np.max(np.abs(fitted - y)))
    dof = x.size - (degree + 1)
    sigma2 = float(np.sum((fitted - y) ** 2)) / dof if dof > 0 else 0.0
    cov = sigma2 * np.linalg.inv(design.T @ design)
    coef = b / s ** np.arange(degree + 1)
    se = np.sqrt(np.abs(np.diag(cov))) / s ** np.arange(degree + 1)
    return SeriesFit(
        c2=float(coef[2]),
        c3=float(coef[3]),
        c4=float(coef[4]),
        se2=float(se[2]),
        se3=float(se[3]),
        se4=float(se[4]),
        residual=residual,
        coefficients=tuple(float(c) for c in coef),
    )
