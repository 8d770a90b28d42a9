"""Global energy-minimization fairing by direct banded solve.

Minimizing (1 - w)/2 * sum ||Q_i - P_i||^2 + w/2 * E(Q) in the control
points leads to the symmetric positive definite system
B Q = (1 - w) P with B = (1 - w) I + w D.  This is exactly the fixed point
of the progressive iteration when every fairing weight equals w, which makes
the solver both the traditional baseline and the iteration's oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionMismatchError, InvalidWeightError, NumericalError
from .gram import DENSE_FALLBACK_N, FunctionalKind, GramMatrix, flat_control_points, gram_for
from .metrics import rmse_deviation


@dataclass(eq=False)
class BandedSystem:
    """B = (1 - w) I + w D in symmetric upper band storage."""

    ab: np.ndarray
    omega: float

    @property
    def n(self) -> int:
        return self.ab.shape[1]


def build_banded_system(gram: GramMatrix, omega: float) -> BandedSystem:
    if not (0.0 < omega < 1.0):
        raise InvalidWeightError(f"omega must lie strictly in (0, 1), got {omega}")
    ab = omega * gram.ab
    ab[-1] += 1.0 - omega
    return BandedSystem(ab, omega)


def solve_banded_spd(system: BandedSystem, rhs: np.ndarray) -> np.ndarray:
    """Solve B X = rhs; Cholesky on the band, dense fallback for small n."""
    try:
        if system.n < DENSE_FALLBACK_N:
            dense = _band_to_dense(system.ab)
            c, low = scipy.linalg.cho_factor(dense)
            return scipy.linalg.cho_solve((c, low), rhs)
        return scipy.linalg.solveh_banded(system.ab, rhs)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - SPD by construction
        raise NumericalError(
            f"factorization failed (n={system.n}, omega={system.omega}): {exc}"
        ) from exc


def _band_to_dense(ab: np.ndarray) -> np.ndarray:
    w1, n = ab.shape
    dense = np.zeros((n, n))
    for off in range(w1):
        row = ab[w1 - 1 - off]
        for j in range(off, n):
            dense[j - off, j] = row[j]
            dense[j, j - off] = row[j]
    return dense


def energy_fair_direct(geometry, omega: float, kind: FunctionalKind):
    """Faired geometry from the one-shot linear solve B Q = (1 - w) P."""
    gram = gram_for(geometry, kind)
    points = flat_control_points(geometry)
    system = build_banded_system(gram, omega)
    solution = solve_banded_spd(system, (1.0 - omega) * points)
    from .splines import BSplineSurface

    if isinstance(geometry, BSplineSurface):
        return geometry.with_flat_points(solution)
    return geometry.with_points(solution)


def direct_solve_residual(geometry_hat, original, omega: float, kind: FunctionalKind) -> float:
    """||B Q - (1 - w) P||_inf of a candidate solution."""
    gram = gram_for(original, kind)
    q = flat_control_points(geometry_hat)
    p = flat_control_points(original)
    bq = (1.0 - omega) * q + omega * gram.matvec(q)
    return float(np.max(np.abs(bq - (1.0 - omega) * p)))


@dataclass(frozen=True)
class ComparisonReport:
    """Side-by-side numbers for a PIA run and the direct-solve baseline."""

    rmse_pia: float
    energy_pia: float
    rmse_direct: float
    energy_direct: float
    energy_original: float
    max_point_distance: float
    bbox_diagonal: float

    def format_table(self) -> str:
        rows = [
            ("", "RMSE", "Absolute Energy"),
            ("Iterative", _fmt(self.rmse_pia), _fmt(self.energy_pia)),
            ("Direct solve", _fmt(self.rmse_direct), _fmt(self.energy_direct)),
        ]
        widths = [max(len(r[c]) for r in rows) for c in range(3)]
        lines = ["  ".join(cell.ljust(widths[c]) for c, cell in enumerate(row)).rstrip() for row in rows]
        lines.append(f"original energy     {_fmt(self.energy_original)}")
        lines.append(f"max point distance  {_fmt(self.max_point_distance)}")
        return "\n".join(lines)


def _fmt(x: float) -> str:
    return format(x, ".6g")


def compare_runs(pia_run, direct_geometry, kind: FunctionalKind) -> ComparisonReport:
    """Deviation/energy comparison between the iteration and the baseline."""
    from .gram import energy

    original = pia_run.original
    p0 = flat_control_points(original)
    p_pia = flat_control_points(pia_run.geometry)
    p_dir = flat_control_points(direct_geometry)
    if p_pia.shape != p_dir.shape or p_pia.shape != p0.shape:
        raise DimensionMismatchError("compared geometries have different control nets")
    bbox = original.bbox_diagonal()
    return ComparisonReport(
        rmse_pia=rmse_deviation(p_pia, p0),
        energy_pia=energy(pia_run.geometry, kind),
        rmse_direct=rmse_deviation(p_dir, p0),
        energy_direct=energy(direct_geometry, kind),
        energy_original=energy(original, kind),
        max_point_distance=float(np.max(np.linalg.norm(p_pia - p_dir, axis=1))),
        bbox_diagonal=bbox,
    )
