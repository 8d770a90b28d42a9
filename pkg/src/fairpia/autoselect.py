"""Energy-impact ranking of control points and automatic local fairing.

Relocating a single control point P_j to the unconstrained energy minimum
drops the fairing energy by exactly Z_j = ||eta_j||^2 / d_jj, where eta_j is
the j-th fairing vector and d_jj the Gram diagonal.  Ranking points by Z_j
picks the ones whose adjustment pays off most; the top m become the active
set of a standard fairing run.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .engine import DEFAULT_ITER_TOLERANCE, DEFAULT_MAX_ITERATIONS, FairingIteration, FairingRun
from .errors import ExcludedPointError, InvalidWeightError
from .gram import FunctionalKind, GramMatrix, fairing_vectors, flat_control_points, gram_for

# diagonal entries at or below this fraction of the largest are excluded
EXCLUDED_DIAG_REL = 1e-12

# fairing-vector components below this multiple of the roundoff scale
# |D| |P| are treated as exact zeros, so zero-energy inputs rank cleanly
ETA_NOISE_REL = 1e-13


@dataclass(frozen=True)
class RankedPoint:
    index: int
    impact: float
    rank: int                # 1 = largest impact
    excluded: bool = False   # zero functional diagonal, placed last


def _diag_floor(gram: GramMatrix) -> float:
    top = float(np.max(gram.diagonal)) if gram.n else 0.0
    return EXCLUDED_DIAG_REL * top


def _denoised_eta(gram: GramMatrix, points: np.ndarray) -> np.ndarray:
    eta = fairing_vectors(gram, points)
    scale = gram.abs_matvec(np.abs(points))
    eta[np.abs(eta) <= ETA_NOISE_REL * scale] = 0.0
    return eta


def optimal_single_point(geometry, j: int, kind: FunctionalKind) -> np.ndarray:
    """Placement of P_j minimizing the energy with all other points fixed."""
    gram = gram_for(geometry, kind)
    points = flat_control_points(geometry)
    if not (0 <= j < gram.n):
        raise IndexError(f"control point index {j} out of range")
    d_jj = gram.diagonal[j]
    if d_jj <= _diag_floor(gram):
        raise ExcludedPointError(f"control point {j} has (near-)zero functional diagonal")
    eta_j = _denoised_eta(gram, points)[j]
    return points[j] - eta_j / d_jj


def energy_impact(geometry, j: int, kind: FunctionalKind) -> float:
    """Z_j: the energy drop from optimally relocating point j alone."""
    gram = gram_for(geometry, kind)
    points = flat_control_points(geometry)
    if not (0 <= j < gram.n):
        raise IndexError(f"control point index {j} out of range")
    d_jj = gram.diagonal[j]
    if d_jj <= _diag_floor(gram):
        raise ExcludedPointError(f"control point {j} has (near-)zero functional diagonal")
    eta_j = _denoised_eta(gram, points)[j]
    return float(eta_j @ eta_j / d_jj)


def rank_control_points(geometry, kind: FunctionalKind) -> list[RankedPoint]:
    """All control points ranked by descending Z_j, ties broken by index.

    Points with a (near-)zero Gram diagonal cannot be relocated by the
    closed form; they are flagged, given Z = 0 and placed last.
    """
    gram = gram_for(geometry, kind)
    points = flat_control_points(geometry)
    eta = _denoised_eta(gram, points)
    diag = gram.diagonal
    floor = _diag_floor(gram)
    excluded = diag <= floor
    z = np.zeros(gram.n)
    ok = ~excluded
    z[ok] = np.sum(eta[ok] ** 2, axis=1) / diag[ok]
    # descending Z, ascending index on ties, excluded points after everything
    order = sorted(range(gram.n), key=lambda i: (bool(excluded[i]), -z[i], i))
    return [
        RankedPoint(index=i, impact=float(z[i]), rank=pos + 1, excluded=bool(excluded[i]))
        for pos, i in enumerate(order)
    ]


def _weights_for_selection(n: int, selected: list[int], omega) -> np.ndarray:
    omega_arr = np.asarray(omega, dtype=float)
    full = np.zeros(n)
    if omega_arr.ndim == 0:
        full[selected] = float(omega_arr)
    elif omega_arr.shape == (len(selected),):
        full[selected] = omega_arr  # i-th supplied weight -> i-th ranked point
    else:
        raise InvalidWeightError(
            f"expected a scalar or {len(selected)} weights, got shape {omega_arr.shape}"
        )
    return full


def auto_fair(
    geometry,
    m: int,
    omega: float | np.ndarray,
    kind: FunctionalKind,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
    iter_tolerance: float = DEFAULT_ITER_TOLERANCE,
    weight_policy: str = "clamp",
    rerank_every: int = 0,
) -> FairingRun:
    """Fair only the m highest-impact control points.

    ``omega`` is a scalar broadcast to all selected points, or m values
    assigned in rank order (first weight to the highest-impact point).
    The ranking is computed once before the iteration begins;
    ``rerank_every=k`` (off by default) re-ranks on the current geometry
    every k iterations and re-selects the active set.
    """
    ranking = rank_control_points(geometry, kind)
    n = len(ranking)
    if not (1 <= m <= n):
        raise ValueError(f"selection count m={m} must lie in [1, {n}]")
    selected = [rp.index for rp in ranking[:m]]

    driver = FairingIteration(
        geometry, kind, _weights_for_selection(n, selected, omega),
        active_set=selected, weight_policy=weight_policy,
    )
    if rerank_every <= 0:
        run = driver.run(max_iterations, iter_tolerance)
        run.ranking = ranking
        return run

    run = None
    while True:
        chunk = min(rerank_every, max_iterations - driver.state.k)
        run = driver.run(chunk, iter_tolerance)
        if run.stop_reason == "converged" or driver.state.k >= max_iterations:
            break
        # re-rank on the current geometry; the deviation anchor stays the
        # true original, so points leaving the active set snap back to it
        # (the inactive-pinning invariant re-asserts for the new selection)
        ranking = rank_control_points(driver.current_geometry(), kind)
        selected = [rp.index for rp in ranking[:m]]
        driver = FairingIteration(
            geometry, kind, _weights_for_selection(n, selected, omega),
            active_set=selected, weight_policy=weight_policy,
            start_points=driver.state.current, start_k=driver.state.k,
        )
    if run.stop_reason != "converged" and driver.state.k >= max_iterations:
        run.stop_reason = "iteration-capped"
    run.ranking = ranking
    return run
