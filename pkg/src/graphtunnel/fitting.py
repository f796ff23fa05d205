"""Log-log order fits used by the sweep reports."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

EXACT_FLOOR = 1e-14


@dataclass(frozen=True)
class OrderFit:
    slope: float | None
    intercept: float | None
    rms_residual: float | None
    points_used: int
    exact: bool

    def to_dict(self) -> dict:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "rms_residual": self.rms_residual,
            "points_used": self.points_used,
            "exact": self.exact,
        }


def loglog_slope(x: Sequence[float], y: Sequence[float]) -> tuple[float, float, float]:
    """Least-squares slope, intercept and RMS residual of ``log|y|`` against ``log x``."""
    lx = np.log(np.asarray(x, dtype=float))
    ly = np.log(np.abs(np.asarray(y, dtype=float)))
    design = np.stack([lx, np.ones_like(lx)], axis=1)
    coef, *_ = np.linalg.lstsq(design, ly, rcond=None)
    fitted = design @ coef
    rms = math.sqrt(float(np.mean((ly - fitted) ** 2)))
    return float(coef[0]), float(coef[1]), rms


def fit_order(x: Sequence[float], errors: Sequence[float], floor: float = EXACT_FLOOR) -> OrderFit:
    """Fit ``|error| ~ C x^p``, ignoring points with ``|error| < floor``.

    With fewer than two points above the floor the errors are treated as
    exact agreement (``exact=True``, no slope).
    """
    pts = [(xi, abs(e)) for xi, e in zip(x, errors) if abs(e) >= floor]
    if len(pts) < 2:
        return OrderFit(None, None, None, len(pts), True)
    slope, icpt, rms = loglog_slope([p[0] for p in pts], [p[1] for p in pts])
    return OrderFit(slope, icpt, rms, len(pts), False)
