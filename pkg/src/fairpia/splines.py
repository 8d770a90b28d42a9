"""Clamped B-spline curves and surfaces.

Basis evaluation uses the knot-difference recurrences (Cox-de Boor for
values, the standard derivative table for higher orders), so no numerical
differentiation appears anywhere in production paths.  Curves live in 2D or
3D; surfaces are tensor products with a lexicographic flattening of the
control net: flat index = i * n2 + j with i running along u.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, UnsupportedOrderError

# |C'(t)| below this fraction of the bounding-box diagonal counts as a cusp.
CUSP_REL_TOL = 1e-12

# |S_u x S_v| below this fraction of the bounding-box diagonal squared marks
# an undefined surface normal.
DEGENERATE_NORMAL_REL_TOL = 1e-12


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class KnotVector:
    """Non-decreasing knot sequence with a fixed degree.

    Only clamped (open) knot vectors are accepted: the first and last
    ``degree + 1`` knots must repeat exactly.
    """

    knots: np.ndarray
    degree: int

    def __post_init__(self):
        object.__setattr__(self, "knots", _readonly(np.asarray(self.knots, dtype=float)))
        p = self.degree
        k = self.knots
        if p < 1:
            raise ValueError("degree must be a positive integer")
        if k.ndim != 1 or k.size < 2 * (p + 1):
            raise ValueError("knot vector must be 1D with at least 2*(degree+1) entries")
        if np.any(~np.isfinite(k)):
            raise ValueError("knot vector must be finite")
        if np.any(np.diff(k) < 0):
            raise ValueError("knot vector must be non-decreasing")
        if not (np.all(k[: p + 1] == k[0]) and np.all(k[-(p + 1):] == k[-1])):
            raise ValueError("knot vector must be clamped (first/last degree+1 knots equal)")
        if k[p] >= k[self.n_basis]:
            raise ValueError("degenerate parametric domain")

    @property
    def n_basis(self) -> int:
        """Number of basis functions / control points."""
        return self.knots.size - self.degree - 1

    @property
    def domain(self) -> tuple[float, float]:
        return float(self.knots[self.degree]), float(self.knots[self.n_basis])

    def find_span(self, t: float) -> int:
        """Index s with knots[s] <= t < knots[s+1] (right-closed at the end)."""
        a, b = self.domain
        if not (a <= t <= b):
            raise DomainError(f"parameter {t} outside domain [{a}, {b}]")
        p, n = self.degree, self.n_basis
        if t >= self.knots[n]:
            # collapse the right endpoint into the last non-empty span
            s = n - 1
            while self.knots[s] == self.knots[s + 1]:
                s -= 1
            return s
        return int(np.searchsorted(self.knots, t, side="right")) - 1


def uniform_clamped_knots(n_control: int, degree: int, a: float = 0.0, b: float = 1.0) -> KnotVector:
    """Clamped knot vector with uniformly spaced interior knots on [a, b]."""
    if n_control < degree + 1:
        raise ValueError("need at least degree+1 control points")
    interior = np.linspace(a, b, n_control - degree + 1)[1:-1]
    knots = np.concatenate([np.full(degree + 1, a), interior, np.full(degree + 1, b)])
    return KnotVector(knots, degree)


def greville_abscissae(kv: KnotVector) -> np.ndarray:
    """Knot averages xi_i = mean(knots[i+1 .. i+p]); the spline with control
    coefficients xi_i reproduces the identity, so placing control points at
    these abscissae yields curves affine in the parameter."""
    p = kv.degree
    return np.array([kv.knots[i + 1 : i + p + 1].mean() for i in range(kv.n_basis)])


def basis_derivatives(kv: KnotVector, t: float, r: int) -> tuple[np.ndarray, np.ndarray]:
    """Values of the r-th derivatives of the active basis functions at t.

    Returns ``(values, indices)`` where ``values[j]`` is N_{indices[j]}^{(r)}(t)
    for the ``degree + 1`` basis functions whose support contains t.  All
    other basis functions vanish identically there (local support).

    Raises:
        UnsupportedOrderError: if r > degree.
        DomainError: if t lies outside the parametric domain.
    """
    p = kv.degree
    if r < 0 or r > p:
        raise UnsupportedOrderError(f"derivative order {r} not supported for degree {p}")
    span = kv.find_span(float(t))
    ders = _ders_basis_funs(span, float(t), p, r, kv.knots)
    indices = np.arange(span - p, span + 1)
    return ders[r], indices


def all_basis_derivatives(kv: KnotVector, t: float, r: int) -> tuple[np.ndarray, np.ndarray]:
    """Like :func:`basis_derivatives` but returns orders 0..r at once (rows)."""
    p = kv.degree
    if r < 0 or r > p:
        raise UnsupportedOrderError(f"derivative order {r} not supported for degree {p}")
    span = kv.find_span(float(t))
    ders = _ders_basis_funs(span, float(t), p, r, kv.knots)
    return ders, np.arange(span - p, span + 1)


def basis_values_full(kv: KnotVector, t: float, r: int = 0) -> np.ndarray:
    """Dense length-n vector of N_i^{(r)}(t); zero outside the active window."""
    vals, idx = basis_derivatives(kv, t, r)
    out = np.zeros(kv.n_basis)
    out[idx] = vals
    return out


def _ders_basis_funs(span: int, t: float, p: int, r: int, knots: np.ndarray) -> np.ndarray:
    """Derivative table for the p+1 basis functions active on the given span.

    Standard triangular-table algorithm: build the inverted triangle of knot
    differences alongside the basis values, then combine columns with the
    a-coefficient recursion.  Returns an array of shape (r+1, p+1); row k
    holds the k-th derivatives.
    """
    ndu = np.empty((p + 1, p + 1))
    ndu[0, 0] = 1.0
    left = np.empty(p + 1)
    right = np.empty(p + 1)
    for j in range(1, p + 1):
        left[j] = t - knots[span + 1 - j]
        right[j] = knots[span + j] - t
        saved = 0.0
        for k in range(j):
            ndu[j, k] = right[k + 1] + left[j - k]
            temp = ndu[k, j - 1] / ndu[j, k]
            ndu[k, j] = saved + right[k + 1] * temp
            saved = left[j - k] * temp
        ndu[j, j] = saved

    ders = np.zeros((r + 1, p + 1))
    ders[0, :] = ndu[:, p]

    a = np.empty((2, p + 1))
    for i in range(p + 1):
        s1, s2 = 0, 1
        a[0, 0] = 1.0
        for k in range(1, r + 1):
            d = 0.0
            rk, pk = i - k, p - k
            if i >= k:
                a[s2, 0] = a[s1, 0] / ndu[pk + 1, rk]
                d = a[s2, 0] * ndu[rk, pk]
            j1 = 1 if rk >= -1 else -rk
            j2 = k - 1 if i - 1 <= pk else p - i
            for j in range(j1, j2 + 1):
                a[s2, j] = (a[s1, j] - a[s1, j - 1]) / ndu[pk + 1, rk + j]
                d += a[s2, j] * ndu[rk + j, pk]
            if i <= pk:
                a[s2, k] = -a[s1, k - 1] / ndu[pk + 1, i]
                d += a[s2, k] * ndu[i, pk]
            ders[k, i] = d
            s1, s2 = s2, s1

    fac = float(p)
    for k in range(1, r + 1):
        ders[k, :] *= fac
        fac *= p - k
    return ders


@dataclass(frozen=True)
class BSplineCurve:
    """Clamped B-spline curve with 2D or 3D control points."""

    knots: KnotVector
    control_points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.control_points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] not in (2, 3):
            raise ValueError("control points must be an (n, 2) or (n, 3) array")
        if np.any(~np.isfinite(pts)):
            raise ValueError("control points must be finite")
        if pts.shape[0] != self.knots.n_basis:
            raise ValueError(
                f"{pts.shape[0]} control points incompatible with knot vector "
                f"(expected {self.knots.n_basis})"
            )
        object.__setattr__(self, "control_points", _readonly(pts))

    @property
    def n(self) -> int:
        return self.control_points.shape[0]

    @property
    def dim(self) -> int:
        return self.control_points.shape[1]

    @property
    def degree(self) -> int:
        return self.knots.degree

    @property
    def domain(self) -> tuple[float, float]:
        return self.knots.domain

    def bbox_diagonal(self) -> float:
        span = self.control_points.max(axis=0) - self.control_points.min(axis=0)
        return float(np.linalg.norm(span))

    def with_points(self, pts: np.ndarray) -> "BSplineCurve":
        return BSplineCurve(self.knots, pts)


@dataclass(frozen=True)
class BSplineSurface:
    """Clamped tensor-product B-spline surface with an n1 x n2 control net."""

    knots_u: KnotVector
    knots_v: KnotVector
    control_net: np.ndarray

    def __post_init__(self):
        net = np.asarray(self.control_net, dtype=float)
        if net.ndim != 3 or net.shape[2] != 3:
            raise ValueError("control net must be an (n1, n2, 3) array")
        if np.any(~np.isfinite(net)):
            raise ValueError("control net must be finite")
        if net.shape[0] != self.knots_u.n_basis or net.shape[1] != self.knots_v.n_basis:
            raise ValueError("control net dimensions do not match knot vectors")
        object.__setattr__(self, "control_net", _readonly(net))

    @property
    def shape(self) -> tuple[int, int]:
        return self.control_net.shape[0], self.control_net.shape[1]

    @property
    def degrees(self) -> tuple[int, int]:
        return self.knots_u.degree, self.knots_v.degree

    @property
    def domain(self) -> tuple[tuple[float, float], tuple[float, float]]:
        return self.knots_u.domain, self.knots_v.domain

    def flat_points(self) -> np.ndarray:
        """Control net flattened lexicographically: row (i * n2 + j) = P_ij."""
        n1, n2 = self.shape
        return self.control_net.reshape(n1 * n2, 3)

    def bbox_diagonal(self) -> float:
        flat = self.flat_points()
        return float(np.linalg.norm(flat.max(axis=0) - flat.min(axis=0)))

    def with_flat_points(self, flat: np.ndarray) -> "BSplineSurface":
        n1, n2 = self.shape
        return BSplineSurface(self.knots_u, self.knots_v, np.asarray(flat).reshape(n1, n2, 3))


def evaluate_curve(curve: BSplineCurve, t: float, r: int = 0) -> np.ndarray:
    """Point on the curve (r = 0) or its r-th derivative vector at t."""
    vals, idx = basis_derivatives(curve.knots, t, r)
    return vals @ curve.control_points[idx]


def evaluate_curve_many(curve: BSplineCurve, ts: Sequence[float], r: int = 0) -> np.ndarray:
    return np.array([evaluate_curve(curve, t, r) for t in np.asarray(ts, dtype=float)])


def evaluate_surface(surface: BSplineSurface, u: float, v: float, ru: int = 0, rv: int = 0) -> np.ndarray:
    """Surface point or mixed partial derivative S^(ru,rv)(u, v)."""
    bu, iu = basis_derivatives(surface.knots_u, u, ru)
    bv, iv = basis_derivatives(surface.knots_v, v, rv)
    block = surface.control_net[np.ix_(iu, iv)]
    return np.einsum("i,j,ijk->k", bu, bv, block)


@dataclass(frozen=True)
class CurvatureComb:
    """Curvature quills sampled along a curve.

    ``tips[i] = points[i] + scale * kappa_i * normal_i``; ``degenerate[i]``
    is True where the first derivative vanished (cusp) and the quill was
    zeroed.  ``kappa`` is signed for planar curves, |kappa| in 3D.
    """

    parameters: np.ndarray
    points: np.ndarray
    tips: np.ndarray
    kappa: np.ndarray
    degenerate: np.ndarray
    scale: float


def curve_curvature(curve: BSplineCurve, t: float) -> tuple[float, np.ndarray, bool]:
    """(kappa, unit normal, degenerate flag) at parameter t.

    Planar curves report signed curvature with the normal fixed to the
    left-hand rotation of the unit tangent; 3D curves report |kappa| with the
    principal normal.
    """
    d1 = evaluate_curve(curve, t, 1)
    d2 = evaluate_curve(curve, t, 2)
    speed = float(np.linalg.norm(d1))
    tol = CUSP_REL_TOL * max(curve.bbox_diagonal(), 1e-300)
    if speed < tol:
        return 0.0, np.zeros(curve.dim), True
    if curve.dim == 2:
        cross = d1[0] * d2[1] - d1[1] * d2[0]
        kappa = cross / speed**3
        tangent = d1 / speed
        normal = np.array([-tangent[1], tangent[0]])
        return float(kappa), normal, False
    cross = np.cross(d1, d2)
    cross_norm = float(np.linalg.norm(cross))
    kappa = cross_norm / speed**3
    if cross_norm < tol * speed**2:
        # straight segment: curvature ~ 0, principal normal undefined
        return float(kappa), np.zeros(3), False
    normal = np.cross(cross, d1)
    normal /= np.linalg.norm(normal)
    return float(kappa), normal, False


def curvature_comb(curve: BSplineCurve, sample_count: int = 256, scale: float | None = None) -> CurvatureComb:
    """Sample the curvature comb at uniformly spaced parameters.

    ``scale=None`` auto-fits the longest quill to 10% of the bounding-box
    diagonal.  ``sample_count=2`` samples exactly the two domain endpoints.
    """
    if sample_count < 2:
        raise ValueError("sample_count must be at least 2")
    a, b = curve.domain
    ts = np.linspace(a, b, sample_count)
    points = np.empty((sample_count, curve.dim))
    normals = np.empty((sample_count, curve.dim))
    kappa = np.empty(sample_count)
    degenerate = np.zeros(sample_count, dtype=bool)
    for i, t in enumerate(ts):
        points[i] = evaluate_curve(curve, t, 0)
        kappa[i], normals[i], degenerate[i] = curve_curvature(curve, t)
    if scale is None:
        kmax = float(np.max(np.abs(kappa))) if kappa.size else 0.0
        scale = 0.1 * curve.bbox_diagonal() / kmax if kmax > 0 else 1.0
    tips = points + scale * kappa[:, None] * normals
    tips[degenerate] = points[degenerate]
    return CurvatureComb(ts, points, tips, kappa, degenerate, float(scale))


@dataclass(frozen=True)
class CurvatureGrid:
    """Absolute mean curvature |H| on a parameter lattice.

    ``undefined`` marks samples whose normal was degenerate; their ``values``
    entry is NaN.  ``positions`` and ``normals`` are the sampled surface
    points and unit normals (normals are zero where undefined).
    """

    us: np.ndarray
    vs: np.ndarray
    values: np.ndarray
    undefined: np.ndarray
    positions: np.ndarray
    normals: np.ndarray


def surface_curvature_grid(surface: BSplineSurface, nu: int = 32, nv: int = 32) -> CurvatureGrid:
    """|H| from the first/second fundamental forms at an nu x nv lattice."""
    p, q = surface.degrees
    if p < 2 or q < 2:
        raise UnsupportedOrderError("mean curvature needs degree >= 2 in both directions")
    if nu < 2 or nv < 2:
        raise ValueError("nu and nv must be at least 2")
    (ua, ub), (va, vb) = surface.domain
    us = np.linspace(ua, ub, nu)
    vs = np.linspace(va, vb, nv)
    values = np.empty((nu, nv))
    undefined = np.zeros((nu, nv), dtype=bool)
    positions = np.empty((nu, nv, 3))
    normals = np.zeros((nu, nv, 3))
    diag = max(surface.bbox_diagonal(), 1e-300)
    for i, u in enumerate(us):
        for j, v in enumerate(vs):
            positions[i, j] = evaluate_surface(surface, u, v)
            su = evaluate_surface(surface, u, v, 1, 0)
            sv = evaluate_surface(surface, u, v, 0, 1)
            cross = np.cross(su, sv)
            area = float(np.linalg.norm(cross))
            if area < DEGENERATE_NORMAL_REL_TOL * diag * diag:
                values[i, j] = np.nan
                undefined[i, j] = True
                continue
            n = cross / area
            suu = evaluate_surface(surface, u, v, 2, 0)
            suv = evaluate_surface(surface, u, v, 1, 1)
            svv = evaluate_surface(surface, u, v, 0, 2)
            E, F, G = float(su @ su), float(su @ sv), float(sv @ sv)
            L, M, N = float(suu @ n), float(suv @ n), float(svv @ n)
            denom = 2.0 * (E * G - F * F)
            if abs(denom) < 1e-300:
                values[i, j] = np.nan
                undefined[i, j] = True
                continue
            values[i, j] = abs((E * N - 2.0 * F * M + G * L) / denom)
            normals[i, j] = n
    return CurvatureGrid(us, vs, values, undefined, positions, normals)
