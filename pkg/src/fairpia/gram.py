"""Fairing-functional Gram matrices and energies.

``curve_gram`` integrates products of r-th basis derivatives span by span
with Gauss-Legendre quadrature; the integrand is a polynomial of degree
<= 2(p - r) per span, so ``degree + 1`` nodes are already exact and the
matrices carry no quadrature error beyond roundoff.  Surface functionals are
Kronecker combinations of curve Gram matrices, consistent with the
lexicographic flattening of the control net (u-index major).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import DimensionMismatchError, UnsupportedOrderError
from .splines import BSplineCurve, BSplineSurface, KnotVector, all_basis_derivatives

# below this size the dense representation is used for products
DENSE_FALLBACK_N = 16


class FunctionalKind(enum.Enum):
    """Which fairing functional drives the energy / Gram matrix."""

    CURVE_R1 = "curve-1"
    CURVE_R2 = "curve-2"
    CURVE_R3 = "curve-3"
    SURFACE_FIRST = "surface-first"
    SURFACE_SECOND = "surface-second"

    @classmethod
    def for_curve(cls, r: int) -> "FunctionalKind":
        try:
            return {1: cls.CURVE_R1, 2: cls.CURVE_R2, 3: cls.CURVE_R3}[r]
        except KeyError:
            raise UnsupportedOrderError(f"curve functional order must be 1, 2 or 3, got {r}") from None

    @classmethod
    def parse(cls, text: str) -> "FunctionalKind":
        aliases = {
            "r1": cls.CURVE_R1, "r2": cls.CURVE_R2, "r3": cls.CURVE_R3,
            "1": cls.CURVE_R1, "2": cls.CURVE_R2, "3": cls.CURVE_R3,
            "first": cls.SURFACE_FIRST, "second": cls.SURFACE_SECOND,
        }
        key = text.strip().lower()
        if key in aliases:
            return aliases[key]
        for kind in cls:
            if kind.value == key:
                return kind
        raise ValueError(f"unknown functional kind {text!r}")

    @property
    def is_surface(self) -> bool:
        return self in (FunctionalKind.SURFACE_FIRST, FunctionalKind.SURFACE_SECOND)

    @property
    def curve_order(self) -> int:
        if self.is_surface:
            raise ValueError(f"{self} has no single derivative order")
        return {FunctionalKind.CURVE_R1: 1, FunctionalKind.CURVE_R2: 2, FunctionalKind.CURVE_R3: 3}[self]


@dataclass(eq=False)
class GramMatrix:
    """Symmetric banded matrix in LAPACK upper band storage.

    ``ab[halfband - (j - i), j]`` holds d_ij for ``max(0, j - halfband) <= i
    <= j``; entries with |i - j| > halfband are structurally zero.
    ``band_count`` is the maximum number of structurally nonzero entries per
    row (2p+1 for curves, (2p+1)(2q+1) for surfaces); it feeds the fairing
    weight bound.
    """

    ab: np.ndarray
    band_count: int

    def __post_init__(self):
        self.ab = np.asarray(self.ab, dtype=float)
        if self.ab.ndim != 2:
            raise ValueError("band storage must be 2D")
        self._op = None

    @property
    def n(self) -> int:
        return self.ab.shape[1]

    @property
    def halfband(self) -> int:
        return self.ab.shape[0] - 1

    @property
    def diagonal(self) -> np.ndarray:
        return self.ab[-1]

    def entry(self, i: int, j: int) -> float:
        if i > j:
            i, j = j, i
        if j - i > self.halfband:
            return 0.0
        return float(self.ab[self.halfband - (j - i), j])

    def toarray(self) -> np.ndarray:
        w, n = self.halfband, self.n
        dense = np.zeros((n, n))
        for off in range(w + 1):
            row = self.ab[w - off]
            for j in range(off, n):
                dense[j - off, j] = row[j]
                dense[j, j - off] = row[j]
        return dense

    def tosparse(self) -> sp.csr_matrix:
        w, n = self.halfband, self.n
        diags, offsets = [], []
        for off in range(-w, w + 1):
            offsets.append(off)
            if off >= 0:
                diags.append(self.ab[w - off])
            else:
                # symmetric: lower diagonal mirrors the upper one; dia format
                # reads data[k, j] for column j, so shift accordingly
                diags.append(np.roll(self.ab[w + off], off))
        return sp.dia_matrix((np.vstack(diags), offsets), shape=(n, n)).tocsr()

    def _operator(self):
        if self._op is None:
            self._op = self.toarray() if self.n < DENSE_FALLBACK_N else self.tosparse()
        return self._op

    def matvec(self, x: np.ndarray) -> np.ndarray:
        """Product D @ x for a vector or an (n, dim) stack of coordinates."""
        x = np.asarray(x, dtype=float)
        if x.shape[0] != self.n:
            raise DimensionMismatchError(f"operand has {x.shape[0]} rows, matrix is {self.n}")
        return self._operator() @ x

    def abs_matvec(self, x: np.ndarray) -> np.ndarray:
        """|D| @ x; the natural roundoff scale of matvec results."""
        x = np.asarray(x, dtype=float)
        if x.shape[0] != self.n:
            raise DimensionMismatchError(f"operand has {x.shape[0]} rows, matrix is {self.n}")
        op = self._operator()
        if isinstance(op, np.ndarray):
            return np.abs(op) @ x
        return abs(op) @ x

    def row_abs_offdiag(self) -> np.ndarray:
        """sum_{j != i} |d_ij| per row."""
        dense_abs_rowsum = np.zeros(self.n)
        w = self.halfband
        for off in range(1, w + 1):
            seg = np.abs(self.ab[w - off, off:])
            dense_abs_rowsum[off:] += seg   # lower part of row j
            dense_abs_rowsum[:-off] += seg  # upper part of row i
        return dense_abs_rowsum

    def row_abs_max(self) -> np.ndarray:
        """max_j |d_ij| per row, diagonal included."""
        out = np.abs(self.diagonal).copy()
        w = self.halfband
        for off in range(1, w + 1):
            seg = np.abs(self.ab[w - off, off:])
            np.maximum(out[off:], seg, out=out[off:])
            np.maximum(out[:-off], seg, out=out[:-off])
        return out


def _gauss_nodes(count: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(count)


def curve_gram(kv: KnotVector, r: int, nodes_per_span: int | None = None) -> GramMatrix:
    """Gram matrix d_ij = integral of N_i^{(r)} N_j^{(r)} over the domain.

    ``nodes_per_span`` defaults to ``degree + 1`` (exact); larger counts are
    only useful as a reference quadrature in tests.
    """
    p, n = kv.degree, kv.n_basis
    if r < 0 or r > p:
        raise UnsupportedOrderError(f"functional order {r} exceeds degree {p}")
    w = p
    ab = np.zeros((w + 1, n))
    nodes, weights = _gauss_nodes(nodes_per_span or (p + 1))
    knots = kv.knots
    for span in range(p, n):
        a, b = knots[span], knots[span + 1]
        if b <= a:
            continue
        mid, rad = 0.5 * (a + b), 0.5 * (b - a)
        first = span - p
        for x, wq in zip(nodes, weights):
            ders, _ = all_basis_derivatives(kv, mid + rad * x, r)
            vals = ders[r]
            scale = wq * rad
            for ii in range(p + 1):
                gi = first + ii
                ab[w - np.arange(0, p + 1 - ii), gi + np.arange(0, p + 1 - ii)] += (
                    scale * vals[ii] * vals[ii:]
                )
    return GramMatrix(ab, band_count=2 * p + 1)


def _kron_banded(a: GramMatrix, b: GramMatrix) -> sp.csr_matrix:
    return sp.kron(a.tosparse(), b.tosparse(), format="csr")


def _sparse_to_gram(s: sp.csr_matrix, halfband: int, band_count: int) -> GramMatrix:
    n = s.shape[0]
    ab = np.zeros((halfband + 1, n))
    coo = s.tocoo()
    for i, j, v in zip(coo.row, coo.col, coo.data):
        if i <= j:
            ab[halfband - (j - i), j] = v
    return GramMatrix(ab, band_count=band_count)


def surface_gram(kv_u: KnotVector, kv_v: KnotVector, kind: FunctionalKind) -> GramMatrix:
    """Surface fairing Gram matrix on the flattened control net.

    First order:  D = D1_u (x) G0_v + G0_u (x) D1_v.
    Second order: D = D2_u (x) G0_v + 2 D1_u (x) D1_v + G0_u (x) D2_v
    (the thin-plate form with the mixed term weighted by 2).
    """
    p, q = kv_u.degree, kv_v.degree
    n2 = kv_v.n_basis
    if kind == FunctionalKind.SURFACE_FIRST:
        g0u, d1u = curve_gram(kv_u, 0), curve_gram(kv_u, 1)
        g0v, d1v = curve_gram(kv_v, 0), curve_gram(kv_v, 1)
        combined = _kron_banded(d1u, g0v) + _kron_banded(g0u, d1v)
    elif kind == FunctionalKind.SURFACE_SECOND:
        if p < 2 or q < 2:
            raise UnsupportedOrderError("second-order surface functional needs degrees >= 2")
        g0u, d1u, d2u = (curve_gram(kv_u, k) for k in (0, 1, 2))
        g0v, d1v, d2v = (curve_gram(kv_v, k) for k in (0, 1, 2))
        combined = (
            _kron_banded(d2u, g0v)
            + 2.0 * _kron_banded(d1u, d1v)
            + _kron_banded(g0u, d2v)
        )
    else:
        raise UnsupportedOrderError(f"{kind} is not a surface functional")
    halfband = p * n2 + q
    return _sparse_to_gram(combined, halfband, (2 * p + 1) * (2 * q + 1))


def gram_for(geometry, kind: FunctionalKind) -> GramMatrix:
    """Gram matrix matching a geometry/functional pair."""
    if kind.is_surface:
        if not isinstance(geometry, BSplineSurface):
            raise UnsupportedOrderError(f"{kind} requires a surface")
        return surface_gram(geometry.knots_u, geometry.knots_v, kind)
    if not isinstance(geometry, BSplineCurve):
        raise UnsupportedOrderError(f"{kind} requires a curve")
    return curve_gram(geometry.knots, kind.curve_order)


def flat_control_points(geometry) -> np.ndarray:
    if isinstance(geometry, BSplineSurface):
        return geometry.flat_points()
    return geometry.control_points


def fairing_vectors(gram: GramMatrix, points: np.ndarray) -> np.ndarray:
    """eta_i = sum_l d_il P_l, computed per coordinate via the band."""
    points = np.asarray(points, dtype=float)
    if points.ndim != 2:
        raise DimensionMismatchError("points must be an (n, dim) array")
    return gram.matvec(points)


def quadratic_energy(gram: GramMatrix, points: np.ndarray) -> float:
    """P^T D P summed over coordinates; clipped at zero against roundoff."""
    eta = fairing_vectors(gram, points)
    return max(float(np.sum(points * eta)), 0.0)


def energy(geometry, kind: FunctionalKind) -> float:
    """Fairing energy of a curve or surface under the given functional."""
    return quadratic_energy(gram_for(geometry, kind), flat_control_points(geometry))
