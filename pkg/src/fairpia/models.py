"""Test-model generators and seeded noise injection.

The noise stream must be reproducible bit-for-bit across implementations,
so it avoids platform RNGs entirely: sample j comes from a counter-based
splitmix64 keyed by the seed, turned Gaussian with the Box-Muller transform.
The first samples of reference seeds are frozen in ``data/noise_vectors.json``
and pinned by the test suite.

Stream definition (all arithmetic mod 2^64):
    state(k) = seed + (k + 1) * 0x9E3779B97F4A7C15
    mix(z):  z ^= z >> 30; z *= 0xBF58476D1CE4E5B9
             z ^= z >> 27; z *= 0x94D049BB133111EB
             z ^= z >> 31
    out(k)   = mix(state(k))
    pair m:  u1 = ((out(2m) >> 11) + 1) * 2^-53   in (0, 1]
             u2 = (out(2m + 1) >> 11) * 2^-53     in [0, 1)
             g(2m)     = sqrt(-2 ln u1) * cos(2 pi u2)
             g(2m + 1) = sqrt(-2 ln u1) * sin(2 pi u2)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .splines import (
    BSplineCurve,
    BSplineSurface,
    KnotVector,
    basis_values_full,
    greville_abscissae,
    uniform_clamped_knots,
)

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_U53 = 2.0 ** -53


def splitmix64(seed: int, count: int, offset: int = 0) -> np.ndarray:
    """Counter-based splitmix64 outputs out(offset) .. out(offset+count-1)."""
    k = np.arange(offset, offset + count, dtype=np.uint64)
    z = (np.uint64(seed & 0xFFFFFFFFFFFFFFFF) + (k + np.uint64(1)) * _GOLDEN)
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def gaussian_samples(seed: int, count: int) -> np.ndarray:
    """First ``count`` standard-normal samples of the seeded stream."""
    pairs = (count + 1) // 2
    raw = splitmix64(seed, 2 * pairs)
    u1 = ((raw[0::2] >> np.uint64(11)).astype(np.float64) + 1.0) * _U53
    u2 = (raw[1::2] >> np.uint64(11)).astype(np.float64) * _U53
    radius = np.sqrt(-2.0 * np.log(u1))
    angle = 2.0 * math.pi * u2
    out = np.empty(2 * pairs)
    out[0::2] = radius * np.cos(angle)
    out[1::2] = radius * np.sin(angle)
    return out[:count]


@dataclass(frozen=True)
class NoiseSpec:
    """Seeded Gaussian perturbation of a geometry's control points."""

    variance: float
    seed: int
    target: str = "control-points"

    def __post_init__(self):
        if self.variance < 0.0:
            raise ValueError("variance must be non-negative")
        if self.target != "control-points":
            raise ValueError(f"unsupported noise target {self.target!r}")


def add_noise(geometry, spec: NoiseSpec):
    """Perturb every control-point coordinate independently.

    Sample j of the stream perturbs flat coordinate j (C order over points,
    then coordinates), scaled by sqrt(variance).  Identical (geometry, spec)
    pairs produce bit-identical outputs.
    """
    if spec.variance == 0.0:
        return geometry
    sigma = math.sqrt(spec.variance)
    if isinstance(geometry, BSplineSurface):
        flat = geometry.flat_points().copy()
        noise = gaussian_samples(spec.seed, flat.size).reshape(flat.shape)
        return geometry.with_flat_points(flat + sigma * noise)
    pts = geometry.control_points.copy()
    noise = gaussian_samples(spec.seed, pts.size).reshape(pts.shape)
    return geometry.with_points(pts + sigma * noise)


def spiral_point(theta: float, a: float = 2.0, b: float = 1.5) -> np.ndarray:
    """Point on the Archimedean spiral with radius a + b * theta."""
    r = a + b * theta
    return np.array([r * math.cos(theta), r * math.sin(theta)])


def chord_length_parameters(points: np.ndarray) -> np.ndarray:
    """Chord-length parameterization normalized to [0, 1]."""
    seg = np.linalg.norm(np.diff(points, axis=0), axis=1)
    u = np.concatenate([[0.0], np.cumsum(seg)])
    total = u[-1]
    if total <= 0.0:
        raise ValueError("coincident sample points: zero total chord length")
    return u / total


def averaged_fit_knots(params: np.ndarray, n_control: int, degree: int) -> KnotVector:
    """Interior knots from parameter averages, as used for spline fitting.

    Guarantees every knot span contains at least one parameter, which keeps
    the least-squares collocation matrix full rank.
    """
    m = params.size
    p = degree
    if n_control < p + 1:
        raise ValueError("need at least degree+1 control points")
    if m < n_control:
        raise ValueError("underdetermined fit: fewer samples than control points")
    knots = np.empty(n_control + p + 1)
    knots[: p + 1] = params[0]
    knots[-(p + 1):] = params[-1]
    d = m / (n_control - p)
    for j in range(1, n_control - p):
        i = int(j * d)
        alpha = j * d - i
        knots[p + j] = (1.0 - alpha) * params[i - 1] + alpha * params[i]
    return KnotVector(knots, p)


def least_squares_fit(
    samples: np.ndarray, params: np.ndarray, kv: KnotVector
) -> tuple[BSplineCurve, float]:
    """Least-squares B-spline fit of parameterized samples.

    Returns the fitted curve and the maximum pointwise residual.
    """
    n = kv.n_basis
    m = samples.shape[0]
    if m < n:
        raise ValueError("underdetermined fit: fewer samples than control points")
    collocation = np.array([basis_values_full(kv, u) for u in params])
    coef, _, rank, _ = np.linalg.lstsq(collocation, samples, rcond=None)
    if rank < n:
        raise ValueError(f"underdetermined fit: collocation rank {rank} < {n}")
    curve = BSplineCurve(kv, coef)
    residual = float(np.max(np.linalg.norm(collocation @ coef - samples, axis=1)))
    return curve, residual


def make_spiral_model(
    theta_max: float = 5.0,
    a: float = 2.0,
    b: float = 1.5,
    n_control: int = 30,
    degree: int = 3,
    n_samples: int = 500,
    sample_noise: NoiseSpec | None = None,
) -> BSplineCurve:
    """Clamped cubic fit of the Archimedean spiral (the curve test model).

    ``sample_noise`` optionally perturbs the sampled data points before the
    fit (instead of the usual control-point noise applied afterwards).
    """
    thetas = np.linspace(0.0, theta_max, n_samples)
    samples = np.array([spiral_point(t, a, b) for t in thetas])
    if sample_noise is not None and sample_noise.variance > 0.0:
        sigma = math.sqrt(sample_noise.variance)
        noise = gaussian_samples(sample_noise.seed, samples.size).reshape(samples.shape)
        samples = samples + sigma * noise
    params = chord_length_parameters(samples)
    kv = averaged_fit_knots(params, n_control, degree)
    curve, _ = least_squares_fit(samples, params, kv)
    return curve


def make_wavy_surface(
    n1: int = 10,
    n2: int = 12,
    degree_u: int = 3,
    degree_v: int = 3,
    amplitude: float = 0.6,
    extent: float = 10.0,
) -> BSplineSurface:
    """Smooth bicubic test surface: a gentle double wave over a flat sheet."""
    kv_u = uniform_clamped_knots(n1, degree_u)
    kv_v = uniform_clamped_knots(n2, degree_v)
    xs = np.linspace(0.0, extent, n1)
    ys = np.linspace(0.0, extent, n2)
    net = np.empty((n1, n2, 3))
    for i, x in enumerate(xs):
        for j, y in enumerate(ys):
            z = amplitude * (math.sin(2.0 * math.pi * x / extent) + math.cos(2.0 * math.pi * y / extent))
            net[i, j] = (x, y, z)
    return BSplineSurface(kv_u, kv_v, net)


def make_line_curve(
    n_control: int,
    degree: int = 3,
    start=(0.0, 0.0),
    end=(1.0, 0.0),
) -> BSplineCurve:
    """Straight segment represented exactly: control points sit at the
    Greville abscissae, so the curve is affine in the parameter and has
    identically zero strain and jerk energy."""
    kv = uniform_clamped_knots(n_control, degree)
    xi = greville_abscissae(kv)
    a, b = kv.domain
    frac = (xi - a) / (b - a)
    start = np.asarray(start, dtype=float)
    end = np.asarray(end, dtype=float)
    pts = start[None, :] + frac[:, None] * (end - start)[None, :]
    return BSplineCurve(kv, pts)


def make_plane_surface(
    n1: int = 8,
    n2: int = 8,
    degree_u: int = 3,
    degree_v: int = 3,
    extent: float = 10.0,
) -> BSplineSurface:
    """Flat z = 0 sheet with Greville-spaced control points (zero energy)."""
    kv_u = uniform_clamped_knots(n1, degree_u)
    kv_v = uniform_clamped_knots(n2, degree_v)
    xs = greville_abscissae(kv_u) * extent
    ys = greville_abscissae(kv_v) * extent
    net = np.zeros((n1, n2, 3))
    net[:, :, 0] = xs[:, None]
    net[:, :, 1] = ys[None, :]
    return BSplineSurface(kv_u, kv_v, net)


def make_random_curve(
    seed: int,
    n_control: int,
    degree: int = 3,
    dim: int = 2,
    spread: float = 1.0,
) -> BSplineCurve:
    """Random clamped curve on uniform knots (test/demo helper)."""
    kv = uniform_clamped_knots(n_control, degree)
    base = np.linspace(0.0, float(n_control - 1), n_control)
    pts = np.zeros((n_control, dim))
    pts[:, 0] = base
    noise = gaussian_samples(seed, n_control * dim).reshape(n_control, dim)
    return BSplineCurve(kv, pts + spread * noise)


def make_random_surface(
    seed: int,
    n1: int,
    n2: int,
    degree_u: int = 3,
    degree_v: int = 3,
    spread: float = 0.5,
) -> BSplineSurface:
    """Random perturbation of the wavy sheet (test/demo helper)."""
    base = make_wavy_surface(n1, n2, degree_u, degree_v)
    return add_noise(base, NoiseSpec(variance=spread * spread, seed=seed))
