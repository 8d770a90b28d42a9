"""Deviation and energy metrics recorded along a fairing run."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, FixedPointSignal, UndefinedMetricError

# iteration-deviation denominators below this are treated as a fixed point
FIXED_POINT_DENOMINATOR = 1e-30


@dataclass(frozen=True)
class MetricsRecord:
    """Per-iteration trace row.

    ``e_iter`` is NaN at k = 0 (undefined before the first step); ``e_rel``
    is NaN when the initial energy is zero (straight lines / planes).
    """

    k: int
    e_dev: float
    e_iter: float
    e_abs: float
    e_rel: float


def _check_same_shape(*arrays: np.ndarray) -> None:
    shapes = {a.shape for a in arrays}
    if len(shapes) != 1:
        raise DimensionMismatchError(f"point sets differ in shape: {sorted(shapes)}")


def rmse_deviation(points_k: np.ndarray, points_0: np.ndarray) -> float:
    """Root mean squared control-point distance between two nets."""
    points_k = np.asarray(points_k, dtype=float)
    points_0 = np.asarray(points_0, dtype=float)
    _check_same_shape(points_k, points_0)
    sq = np.sum((points_k - points_0) ** 2, axis=-1)
    return float(np.sqrt(np.mean(sq)))


def relative_iter_deviation(points_k: np.ndarray, points_prev: np.ndarray, points_0: np.ndarray) -> float:
    """sqrt( sum ||P_k - P_{k-1}||^2 / sum ||P_k - P_0||^2 ).

    Raises:
        FixedPointSignal: when the denominator vanishes (P_k == P_0), which
            the fairing loop interprets as immediate convergence.
    """
    points_k = np.asarray(points_k, dtype=float)
    points_prev = np.asarray(points_prev, dtype=float)
    points_0 = np.asarray(points_0, dtype=float)
    _check_same_shape(points_k, points_prev, points_0)
    num = float(np.sum((points_k - points_prev) ** 2))
    den = float(np.sum((points_k - points_0) ** 2))
    if den < FIXED_POINT_DENOMINATOR:
        raise FixedPointSignal("iteration deviation denominator is zero")
    return float(np.sqrt(num / den))


def relative_energy(e_abs_k: float, e_abs_0: float) -> float:
    """Energy ratio against the initial geometry."""
    if e_abs_0 <= 0.0:
        raise UndefinedMetricError("relative energy undefined for zero initial energy")
    return float(e_abs_k) / float(e_abs_0)
