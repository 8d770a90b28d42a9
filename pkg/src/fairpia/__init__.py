"""Weighted progressive-iterative fairing of B-spline curves and surfaces."""

from .autoselect import RankedPoint, auto_fair, energy_impact, optimal_single_point, rank_control_points
from .baseline import ComparisonReport, compare_runs, direct_solve_residual, energy_fair_direct
from .engine import (
    FairingConfig,
    FairingIteration,
    FairingRun,
    IterationState,
    SystemMatrix,
    build_system,
    fair,
    fair_step,
    fixed_point_residual,
    weight_upper_bound,
)
from .errors import (
    DimensionMismatchError,
    DomainError,
    ExcludedPointError,
    FairPiaError,
    FixedPointSignal,
    InvalidWeightError,
    ModelFormatError,
    NumericalError,
    UndefinedMetricError,
    UnsupportedOrderError,
)
from .gram import FunctionalKind, GramMatrix, curve_gram, energy, fairing_vectors, surface_gram
from .metrics import MetricsRecord, relative_energy, relative_iter_deviation, rmse_deviation
from .models import (
    NoiseSpec,
    add_noise,
    gaussian_samples,
    make_random_curve,
    make_random_surface,
    make_spiral_model,
    make_wavy_surface,
)
from .splines import (
    BSplineCurve,
    BSplineSurface,
    CurvatureComb,
    CurvatureGrid,
    KnotVector,
    basis_derivatives,
    curvature_comb,
    evaluate_curve,
    evaluate_surface,
    surface_curvature_grid,
    uniform_clamped_knots,
)

__version__ = "0.1.0"

__all__ = [
    "BSplineCurve",
    "BSplineSurface",
    "ComparisonReport",
    "CurvatureComb",
    "CurvatureGrid",
    "DimensionMismatchError",
    "DomainError",
    "ExcludedPointError",
    "FairPiaError",
    "FairingConfig",
    "FairingIteration",
    "FairingRun",
    "FixedPointSignal",
    "FunctionalKind",
    "GramMatrix",
    "InvalidWeightError",
    "IterationState",
    "KnotVector",
    "MetricsRecord",
    "ModelFormatError",
    "NoiseSpec",
    "NumericalError",
    "RankedPoint",
    "SystemMatrix",
    "UndefinedMetricError",
    "UnsupportedOrderError",
    "add_noise",
    "auto_fair",
    "basis_derivatives",
    "build_system",
    "compare_runs",
    "curvature_comb",
    "curve_gram",
    "direct_solve_residual",
    "energy",
    "energy_fair_direct",
    "energy_impact",
    "evaluate_curve",
    "evaluate_surface",
    "fair",
    "fair_step",
    "fairing_vectors",
    "fixed_point_residual",
    "gaussian_samples",
    "make_random_curve",
    "make_random_surface",
    "make_spiral_model",
    "make_wavy_surface",
    "optimal_single_point",
    "rank_control_points",
    "relative_energy",
    "relative_iter_deviation",
    "rmse_deviation",
    "surface_curvature_grid",
    "surface_gram",
    "uniform_clamped_knots",
    "weight_upper_bound",
]
