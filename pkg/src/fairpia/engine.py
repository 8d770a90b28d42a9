"""Progressive-iterative fairing loop for curves and surfaces.

Each step pulls every active control point toward its original position
(difference vector, weighted by 1 - omega_i) and down the energy gradient
(fairing vector, weighted by omega_i), scaled by the per-row normalization
mu_i = 1 / sum_j |a_ij| of the system matrix A = I - Omega + Omega D.  With
weights inside the diagonal-dominance bound the update is a contraction and
the iterates converge to the solution of A P = (I - Omega) P_original.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatchError,
    FixedPointSignal,
    InvalidWeightError,
    UndefinedMetricError,
)
from .gram import FunctionalKind, GramMatrix, flat_control_points, gram_for
from .metrics import MetricsRecord, relative_energy, relative_iter_deviation, rmse_deviation

DEFAULT_MAX_ITERATIONS = 800
DEFAULT_ITER_TOLERANCE = 1e-6

# out-of-bound weights are clamped to this fraction of the bound
CLAMP_FRACTION = 0.99


WEIGHT_POLICIES = ("clamp", "strict", "unchecked")


@dataclass
class FairingConfig:
    """Run parameters for :func:`fair`.

    ``omega`` may be a scalar (broadcast) or one weight per control point.
    ``active_set`` restricts updates to the listed flat indices; every other
    point stays bit-identical to the original.

    ``weight_policy`` governs weights above the diagonal-dominance bound:
    "clamp" (default) pulls them to 99% of the bound with a warning,
    "strict" rejects them, and "unchecked" admits any weight in (0, 1).
    Unchecked runs drop the strict-dominance certificate; with uniform
    weights the iteration still converges (the system matrix stays symmetric
    positive definite and the row normalization keeps ||Lambda A|| = 1),
    only slower, which is how heavy smoothing experiments reach the
    iteration cap.
    """

    kind: FunctionalKind
    omega: float | np.ndarray
    active_set: list[int] | None = None
    max_iterations: int = DEFAULT_MAX_ITERATIONS
    iter_tolerance: float = DEFAULT_ITER_TOLERANCE
    weight_policy: str = "clamp"


def weight_upper_bound(gram: GramMatrix, degree: int | None = None) -> np.ndarray:
    """Per-point fairing weight bound guaranteeing strict diagonal dominance.

    For curves this is min(1/2, 1 / (4 p max_j |d_ij|)); the general form
    uses the band population of the Gram matrix, with the curve case
    recovered exactly when ``degree`` is supplied.
    """
    row_max = gram.row_abs_max()
    nnz = (2 * degree + 1) if degree is not None else gram.band_count
    bounds = np.full(gram.n, 0.5)
    positive = row_max > 0.0
    bounds[positive] = np.minimum(0.5, 1.0 / (2.0 * (nnz - 1) * row_max[positive]))
    return bounds


@dataclass(eq=False)
class SystemMatrix:
    """A = I - Omega + Omega D with its normalization weights.

    ``mu[i] = 1 / sum_j |a_ij|`` and ``inf_norm_residual`` is ||I - Lambda
    A||_inf; the latter is < 1 exactly when A is strictly diagonally
    dominant, which the weight bound guarantees.
    """

    gram: GramMatrix
    omega: np.ndarray
    diag: np.ndarray = field(init=False)
    off_abs: np.ndarray = field(init=False)
    mu: np.ndarray = field(init=False)
    inf_norm_residual: float = field(init=False)

    def __post_init__(self):
        omega = np.asarray(self.omega, dtype=float)
        if omega.shape != (self.gram.n,):
            raise DimensionMismatchError(
                f"omega has shape {omega.shape}, expected ({self.gram.n},)"
            )
        if np.any(omega <= 0.0) or np.any(omega >= 1.0):
            raise InvalidWeightError("fairing weights must lie strictly in (0, 1)")
        self.omega = omega
        self.diag = (1.0 - omega) + omega * self.gram.diagonal
        self.off_abs = omega * self.gram.row_abs_offdiag()
        row_sums = np.abs(self.diag) + self.off_abs
        self.mu = 1.0 / row_sums
        self.inf_norm_residual = float(
            np.max(np.abs(1.0 - self.mu * self.diag) + self.mu * self.off_abs)
        )

    @property
    def n(self) -> int:
        return self.gram.n

    @property
    def is_strictly_diagonally_dominant(self) -> bool:
        return bool(np.all(np.abs(self.diag) > self.off_abs))

    def apply(self, points: np.ndarray) -> np.ndarray:
        """A @ points, done through the banded Gram product."""
        points = np.asarray(points, dtype=float)
        om = self.omega[:, None] if points.ndim == 2 else self.omega
        return points - om * points + om * self.gram.matvec(points)


def build_system(gram: GramMatrix, omega: np.ndarray) -> SystemMatrix:
    """Assemble A = I - Omega + Omega D and its mu weights."""
    return SystemMatrix(gram, omega)


@dataclass
class IterationState:
    """Mutable state of one fairing run (single-owner, not thread-safe)."""

    original: np.ndarray
    current: np.ndarray
    k: int = 0
    trace: list[MetricsRecord] = field(default_factory=list)


def fair_step(state: IterationState, system: SystemMatrix, active_mask: np.ndarray | None = None) -> IterationState:
    """Advance one iteration in place.

    Active points move by mu_i [(1 - omega_i) delta_i - omega_i eta_i] with
    delta_i = P_i - P_i^[k] and eta_i = sum_l d_il P_l^[k]; inactive points
    are re-pinned to the originals so they stay bit-identical.
    """
    cur = state.current
    if cur.shape[0] != system.n:
        raise DimensionMismatchError(f"state has {cur.shape[0]} points, system expects {system.n}")
    eta = system.gram.matvec(cur)
    delta = state.original - cur
    om = system.omega[:, None]
    mu = system.mu[:, None]
    new = cur + mu * ((1.0 - om) * delta - om * eta)
    if active_mask is not None:
        new[~active_mask] = state.original[~active_mask]
    state.current = new
    state.k += 1
    return state


def fixed_point_residual(points: np.ndarray, system: SystemMatrix, original: np.ndarray) -> float:
    """||A P - (I - Omega) P_original||_inf, maximized over coordinates."""
    points = np.asarray(points, dtype=float)
    original = np.asarray(original, dtype=float)
    if points.shape != original.shape:
        raise DimensionMismatchError("points and original differ in shape")
    om = system.omega[:, None] if points.ndim == 2 else system.omega
    residual = system.apply(points) - (1.0 - om) * original
    return float(np.max(np.abs(residual)))


@dataclass
class FairingRun:
    """Result of a fairing run: final geometry plus the full trace."""

    geometry: object
    original: object
    trace: list[MetricsRecord]
    stop_reason: str           # "converged" | "iteration-capped"
    iterations: int
    fixed_point: bool = False  # converged because the update vanished
    active_set: list[int] | None = None
    omega: np.ndarray | None = None
    warnings: list[str] = field(default_factory=list)
    ranking: list | None = None


def resolve_weights(
    gram: GramMatrix,
    omega: float | np.ndarray,
    active: np.ndarray | None,
    policy: str = "clamp",
) -> tuple[np.ndarray, list[str]]:
    """Broadcast, validate and (per policy) clamp fairing weights.

    Only active points are checked against the dominance bound; inactive
    entries never enter an update and are silently forced into range.
    """
    if policy not in WEIGHT_POLICIES:
        raise InvalidWeightError(f"unknown weight policy {policy!r}, expected one of {WEIGHT_POLICIES}")
    n = gram.n
    omega = np.asarray(omega, dtype=float)
    if omega.ndim == 0:
        omega = np.full(n, float(omega))
    if omega.shape != (n,):
        raise InvalidWeightError(f"expected scalar or {n} weights, got shape {omega.shape}")
    if np.any(~np.isfinite(omega)):
        raise InvalidWeightError("weights must be finite")
    bounds = weight_upper_bound(gram)
    active_mask = np.ones(n, dtype=bool) if active is None else active
    checked = omega.copy()
    notes: list[str] = []
    bad = active_mask & ((checked <= 0.0) | (checked >= 1.0))
    if np.any(bad):
        raise InvalidWeightError(
            f"weights at indices {np.nonzero(bad)[0].tolist()} outside (0, 1)"
        )
    over = active_mask & (checked >= bounds)
    if np.any(over) and policy != "unchecked":
        if policy == "strict":
            raise InvalidWeightError(
                f"weights at indices {np.nonzero(over)[0].tolist()} exceed the "
                "diagonal-dominance bound (strict mode)"
            )
        for i in np.nonzero(over)[0]:
            notes.append(
                f"weight {checked[i]:.3g} at point {i} clamped to "
                f"{CLAMP_FRACTION * bounds[i]:.3g} (bound {bounds[i]:.3g})"
            )
        checked[over] = CLAMP_FRACTION * bounds[over]
    # inactive placeholders: any in-range value works, they are never applied
    inactive = ~active_mask
    checked[inactive] = np.minimum(np.abs(checked[inactive]), 0.5 * bounds[inactive])
    checked[inactive & (checked <= 0.0)] = 0.5 * bounds[inactive & (checked <= 0.0)]
    return checked, notes


class FairingIteration:
    """Stateful driver: owns the Gram matrix, the system and the trace.

    Supports stepping, running to a stop condition, and swapping weights
    between iterations (the system matrix is rebuilt lazily on the next
    step).  ``start_points``/``start_k`` let a session resume a run that a
    previous driver instance advanced.
    """

    def __init__(
        self,
        geometry,
        kind: FunctionalKind,
        omega: float | np.ndarray,
        active_set: list[int] | None = None,
        weight_policy: str = "clamp",
        start_points: np.ndarray | None = None,
        start_k: int = 0,
    ):
        self.geometry_template = geometry
        self.kind = kind
        self.gram = gram_for(geometry, kind)
        original = flat_control_points(geometry).copy()
        n = original.shape[0]
        if active_set is not None:
            idx = np.asarray(sorted(set(int(i) for i in active_set)), dtype=int)
            if idx.size == 0 or idx.min() < 0 or idx.max() >= n:
                raise DimensionMismatchError(f"active set indices must lie in [0, {n})")
            self.active_mask = np.zeros(n, dtype=bool)
            self.active_mask[idx] = True
            self.active_set = idx.tolist()
        else:
            self.active_mask = None
            self.active_set = None
        self.weight_policy = weight_policy
        self.warnings: list[str] = []
        self._set_omega(omega)
        self.system: SystemMatrix | None = None
        start = original if start_points is None else np.asarray(start_points, dtype=float)
        if start.shape != original.shape:
            raise DimensionMismatchError("start points do not match the geometry")
        self.state = IterationState(original=original, current=start.copy(), k=start_k)
        self._prev_points = self.state.current.copy()
        self._prev_e_iter: float | None = None
        self._last_prev_e_iter: float | None = None
        self._e_abs0 = self._energy(original)
        if start_k == 0:
            self.state.trace.append(self._record(0, math.nan))

    # -- weights ---------------------------------------------------------

    def _set_omega(self, omega) -> None:
        mask = self.active_mask
        self.omega, notes = resolve_weights(self.gram, omega, mask, self.weight_policy)
        self.warnings.extend(notes)
        for note in notes:
            warnings.warn(note, stacklevel=3)

    def set_weights(self, omega: float | np.ndarray) -> None:
        """Swap fairing weights mid-run; the system is rebuilt lazily."""
        self._set_omega(omega)
        self.system = None

    def weight_bounds(self) -> np.ndarray:
        return weight_upper_bound(self.gram)

    # -- metrics ---------------------------------------------------------

    def _energy(self, points: np.ndarray) -> float:
        return max(float(np.sum(points * self.gram.matvec(points))), 0.0)

    def _metric_points(self, points: np.ndarray) -> np.ndarray:
        if self.active_mask is None:
            return points
        return points[self.active_mask]

    def _record(self, k: int, e_iter: float) -> MetricsRecord:
        e_abs = self._energy(self.state.current)
        try:
            e_rel = relative_energy(e_abs, self._e_abs0) if k > 0 else (
                1.0 if self._e_abs0 > 0 else math.nan
            )
        except UndefinedMetricError:
            e_rel = math.nan
        return MetricsRecord(
            k=k,
            e_dev=rmse_deviation(self.state.current, self.state.original),
            e_iter=e_iter,
            e_abs=e_abs,
            e_rel=e_rel,
        )

    # -- stepping --------------------------------------------------------

    def _ensure_system(self) -> SystemMatrix:
        if self.system is None:
            self.system = build_system(self.gram, self.omega)
        return self.system

    def step(self) -> tuple[MetricsRecord, bool]:
        """One iteration; returns (trace row, fixed_point_detected).

        When the iterate lands back on the original net (zero E_iter
        denominator) the vanishing step is reverted, so a run that starts at
        a fixed point returns its input bit-identical.
        """
        system = self._ensure_system()
        self._prev_points = self.state.current
        fair_step(self.state, system, self.active_mask)
        fixed_point = False
        try:
            e_iter = relative_iter_deviation(
                self._metric_points(self.state.current),
                self._metric_points(self._prev_points),
                self._metric_points(self.state.original),
            )
        except FixedPointSignal:
            e_iter = math.nan
            fixed_point = True
            self.state.current = self._prev_points
        self._last_prev_e_iter = self._prev_e_iter
        self._prev_e_iter = None if fixed_point else e_iter
        rec = self._record(self.state.k, e_iter)
        self.state.trace.append(rec)
        return rec, fixed_point

    def run(
        self,
        max_iterations: int = DEFAULT_MAX_ITERATIONS,
        iter_tolerance: float = DEFAULT_ITER_TOLERANCE,
        cancel_check=None,
    ) -> FairingRun:
        """Iterate until |E_iter^[k+1] - E_iter^[k]| < tol or the cap hits.

        ``cancel_check`` is polled between iterations; a True return aborts
        the loop with stop reason "cancelled" (used by the session service).
        """
        stop_reason = "iteration-capped"
        fixed_point = False
        steps = 0
        while steps < max_iterations:
            if cancel_check is not None and cancel_check():
                stop_reason = "cancelled"
                break
            rec, at_fixed_point = self.step()
            steps += 1
            if at_fixed_point:
                stop_reason = "converged"
                fixed_point = True
                break
            prev = self._last_prev_e_iter
            if prev is not None and abs(rec.e_iter - prev) < iter_tolerance:
                stop_reason = "converged"
                break
        return FairingRun(
            geometry=self.current_geometry(),
            original=self.geometry_template,
            trace=list(self.state.trace),
            stop_reason=stop_reason,
            iterations=self.state.k,
            fixed_point=fixed_point,
            active_set=self.active_set,
            omega=self.omega.copy(),
            warnings=list(self.warnings),
        )

    def current_geometry(self):
        from .splines import BSplineSurface

        if isinstance(self.geometry_template, BSplineSurface):
            return self.geometry_template.with_flat_points(self.state.current)
        return self.geometry_template.with_points(self.state.current)


def fair(geometry, config: FairingConfig) -> FairingRun:
    """Run the progressive-iterative fairing loop to its stop condition."""
    driver = FairingIteration(
        geometry,
        config.kind,
        config.omega,
        active_set=config.active_set,
        weight_policy=config.weight_policy,
    )
    return driver.run(config.max_iterations, config.iter_tolerance)
