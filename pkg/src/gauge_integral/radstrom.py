"""Sampled support-function embedding of convex bodies.

A body ``C`` is mapped to the vector ``(h_C(u_1), ..., h_C(u_m))`` of its
support values on a fixed, antipodally symmetric direction grid.  The image
lives in R^m with the sup norm and componentwise order, an M-space: Minkowski
sums become vector sums, hull-unions become componentwise maxima, and the
sup distance of two images is a lower bound for the Hausdorff distance of the
bodies (exact in one dimension).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import HalfspaceIntersection, QhullError

from .convex import ConvexBody, box, spiral_points
from .lattice import DimensionError

DEFAULT_GRID_SIZE = {1: 2, 2: 64, 3: 242}


class GridMismatchError(ValueError):
    pass


class InconsistentSupportError(ValueError):
    """Support values whose half-space intersection is empty."""


@dataclass(frozen=True, eq=False)
class DirectionGrid:
    """Ordered list of unit directions; row ``j`` of `directions` is ``u_j``."""

    directions: np.ndarray
    antipode: np.ndarray = field(repr=False)

    @property
    def d(self) -> int:
        return self.directions.shape[1]

    @property
    def m(self) -> int:
        return self.directions.shape[0]

    def __len__(self) -> int:
        return self.m

    def same_as(self, other: "DirectionGrid") -> bool:
        return self is other or (
            self.directions.shape == other.directions.shape
            and np.array_equal(self.directions, other.directions))

    def labels(self) -> list[str]:
        return ["u_" + "_".join(f"{c:.6f}" for c in u) for u in self.directions]

    def spacing_bound(self) -> float:
        """Largest angle between a unit vector and its nearest grid direction."""
        if self.d == 1:
            return 0.0
        if self.d == 2:
            return math.pi / self.m
        probe = spiral_points(4000)
        return float(np.max(np.arccos(np.clip(np.max(probe @ self.directions.T, axis=1), -1, 1))))

    def reconstruction_bound(self, diam: float) -> float:
        """Hausdorff error bound of :func:`reconstruct` for a body of diameter `diam`.

        Two support lines whose normals differ by at most ``2α`` meet at a
        point no farther than ``(diam / 2) tan α`` from the body.
        """
        return 0.5 * diam * math.tan(self.spacing_bound())


def _finish(directions: np.ndarray) -> DirectionGrid:
    directions = np.asarray(directions, dtype=float)
    directions.setflags(write=False)
    # antipode[j] = index of -u_j
    sim = directions @ directions.T
    antipode = np.argmin(sim, axis=1)
    if not np.allclose(directions[antipode], -directions, atol=1e-12):
        raise ValueError("direction grid must be antipodally symmetric")
    antipode.setflags(write=False)
    return DirectionGrid(directions, antipode)


def make_grid(d: int, m: int | None = None) -> DirectionGrid:
    """Deterministic direction grid for R^d.

    d=1: ``{+1, -1}``.  d=2: ``m`` equally spaced angles, ``m ≡ 0 (mod 4)``.
    d=3: the coordinate axes plus a Fibonacci spiral on the open upper
    hemisphere, closed under negation (``m`` even, ``m ≥ 6``).
    """
    if m is None:
        m = DEFAULT_GRID_SIZE.get(d)
    if d == 1:
        if m != 2:
            raise ValueError("the one-dimensional grid is exactly {+1, -1}")
        return _finish(np.array([[1.0], [-1.0]]))
    if d == 2:
        if m is None or m < 4 or m % 4:
            raise ValueError("planar grid size must be a positive multiple of 4")
        theta = 2.0 * math.pi * np.arange(m) / m
        U = np.column_stack([np.cos(theta), np.sin(theta)])
        # exact axis directions
        q = m // 4
        U[0], U[q], U[2 * q], U[3 * q] = (1, 0), (0, 1), (-1, 0), (0, -1)
        return _finish(U)
    if d == 3:
        if m is None or m < 6 or m % 2:
            raise ValueError("spatial grid size must be even and at least 6")
        half = m // 2
        k = half - 3
        # spiral restricted to z in (0, 1): never the pole, never the equator
        i = np.arange(k) + 0.5
        z = 1.0 - i / max(k, 1)
        r = np.sqrt(1.0 - z * z)
        phi = math.pi * (3.0 - math.sqrt(5.0)) * i
        cap = np.column_stack([r * np.cos(phi), r * np.sin(phi), z]) if k else np.empty((0, 3))
        upper = np.vstack([np.eye(3), cap])
        return _finish(np.vstack([upper, -upper]))
    raise DimensionError("direction grids are provided for d = 1, 2, 3")


@dataclass(frozen=True, eq=False)
class SupportVector:
    values: np.ndarray
    grid: DirectionGrid

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.m,):
            raise GridMismatchError(f"expected {self.grid.m} support values, got {v.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def _other(self, other: "SupportVector") -> np.ndarray:
        if not self.grid.same_as(other.grid):
            raise GridMismatchError("support vectors live on different grids")
        return other.values

    def __add__(self, other: "SupportVector") -> "SupportVector":
        return SupportVector(self.values + self._other(other), self.grid)

    def __rmul__(self, lam: float) -> "SupportVector":
        return SupportVector(float(lam) * self.values, self.grid)

    def max(self, other: "SupportVector") -> "SupportVector":
        return SupportVector(np.maximum(self.values, self._other(other)), self.grid)

    def min(self, other: "SupportVector") -> "SupportVector":
        return SupportVector(np.minimum(self.values, self._other(other)), self.grid)

    def is_consistent(self, tol: float = 0.0) -> bool:
        """Antipodal check ``h(u) + h(-u) ≥ 0`` for every grid direction."""
        return bool(np.all(self.values + self.values[self.grid.antipode] >= -tol))

    def body(self) -> ConvexBody:
        return reconstruct(self)


def embed(C: ConvexBody, grid: DirectionGrid) -> SupportVector:
    if C.dim != grid.d:
        raise DimensionError(f"body dimension {C.dim} differs from grid dimension {grid.d}")
    return SupportVector(C.supports(grid.directions), grid)


def sup_distance(s1: SupportVector, s2: SupportVector) -> float:
    return float(np.max(np.abs(s1.values - s1._other(s2))))


def _clip_polygon(poly: np.ndarray, u: np.ndarray, c: float, tol: float) -> np.ndarray:
    """Intersect a convex polygon (ccw vertex list) with ``{x : <u, x> ≤ c}``."""
    vals = poly @ u - c
    inside = vals <= tol
    if np.all(inside):
        return poly
    if not np.any(inside):
        return poly[:0]
    out = []
    n = len(poly)
    for i in range(n):
        p, q = poly[i], poly[(i + 1) % n]
        fp, fq = vals[i], vals[(i + 1) % n]
        if fp <= tol:
            out.append(p)
        if (fp <= tol) != (fq <= tol) and fp != fq:
            s = fp / (fp - fq)
            out.append(p + s * (q - p))
    return np.array(out)


def reconstruct(s: SupportVector, tol: float = 1e-12) -> ConvexBody:
    """Circumscribed polytope ``∩_j {x : <u_j, x> ≤ s_j}`` in vertex form.

    Exact in one dimension.  Every body whose embedding is dominated by `s`
    lies inside the result.
    """
    g = s.grid
    vals = s.values
    scale_ = max(1.0, float(np.max(np.abs(vals))))
    if not s.is_consistent(tol * scale_):
        raise InconsistentSupportError("support values violate h(u) + h(-u) >= 0")
    if g.d == 1:
        lo, hi = -vals[1], vals[0]
        if lo > hi:
            lo = hi = 0.5 * (lo + hi)
        return ConvexBody([[lo], [hi]])
    if g.d == 2:
        q = g.m // 4
        lo = np.array([-vals[2 * q], -vals[3 * q]])
        hi = np.array([vals[0], vals[q]])
        hi = np.maximum(hi, lo)
        poly = box(lo, hi).vertices
        for u, c in zip(g.directions, vals):
            poly = _clip_polygon(poly, u, c, tol * scale_)
            if len(poly) == 0:
                raise InconsistentSupportError("empty half-plane intersection")
        return ConvexBody(poly, eps=tol * scale_ ** 2)
    return _reconstruct_3d(g.directions, vals, tol * scale_)


def _reconstruct_3d(U: np.ndarray, vals: np.ndarray, tol: float) -> ConvexBody:
    # Chebyshev centre: maximize r with <u_j, x> + r <= s_j
    A = np.column_stack([U, np.ones(len(U))])
    res = linprog(c=[0, 0, 0, -1], A_ub=A, b_ub=vals, bounds=[(None, None)] * 3 + [(None, 1e6)],
                  method="highs")
    if res.status != 0 or res.x[3] < -tol:
        raise InconsistentSupportError("empty half-space intersection")
    slack = 0.0
    if res.x[3] < 1e-9:
        # flat body: reconstruct a slightly thickened copy
        slack = 1e-9
        res = linprog(c=[0, 0, 0, -1], A_ub=A, b_ub=vals + slack,
                      bounds=[(None, None)] * 3 + [(None, 1e6)], method="highs")
    center = res.x[:3]
    halfspaces = np.column_stack([U, -(vals + slack)])
    try:
        hs = HalfspaceIntersection(halfspaces, center)
    except QhullError as exc:
        raise InconsistentSupportError(f"half-space intersection failed: {exc}") from exc
    return ConvexBody(hs.intersections)


def to_csv(vectors: list[SupportVector], grid: DirectionGrid) -> str:
    """One row per body; the header lists the grid directions."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(grid.labels())
    for s in vectors:
        if not s.grid.same_as(grid):
            raise GridMismatchError("support vector does not belong to the output grid")
        w.writerow([repr(float(v)) for v in s.values])
    return buf.getvalue()
