"""Compact convex bodies in R^d stored as irredundant vertex clouds.

Bodies are immutable.  Normalization is exact in one and two dimensions
(interval endpoints, monotone-chain hull) and uses qhull in three, with an
affine-subspace fallback so that flat bodies (points, segments, polygons
embedded in space) remain first-class citizens.

Point-to-body distances use Wolfe's nearest-point algorithm, an active-set
refinement of the Frank-Wolfe/Gilbert iteration that terminates finitely
on polytopes.  The duality gap of the current iterate certifies accuracy.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Iterable, Sequence

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .lattice import DimensionError, NormKind, as_vector

PROJECTION_TOL = 1e-10
PROJECTION_MAX_ITER = 10_000
VERTEX_CAP = 100_000


class ProjectionError(RuntimeError):
    """Nearest-point iteration did not reach the requested accuracy."""


class VertexOverflowError(RuntimeError):
    """A vertex-representation computation exceeded the vertex cap."""


# ---------------------------------------------------------------------------
# hull normalization


def _chain(points: np.ndarray, eps: float = 0.0) -> np.ndarray:
    """Andrew's monotone chain; returns counter-clockwise hull vertices.

    Collinear and duplicate points are dropped, so the output is
    irredundant.  Degenerate inputs yield one or two vertices.  A positive
    `eps` also drops turns whose cross product is at most `eps`.
    """
    pts = np.unique(points, axis=0)
    if len(pts) <= 2:
        return pts
    P = [tuple(p) for p in pts]

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list = []
    for p in P:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= eps:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(P):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= eps:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    return np.array(hull, dtype=float)


def _hull_nd(points: np.ndarray) -> np.ndarray:
    pts = np.unique(points, axis=0)
    if len(pts) == 1:
        return pts
    center = pts.mean(axis=0)
    centered = pts - center
    _, sing, vt = np.linalg.svd(centered, full_matrices=False)
    scale = max(sing[0], 1.0)
    rank = int(np.sum(sing > 1e-12 * scale))
    if rank == pts.shape[1]:
        try:
            return pts[ConvexHull(pts).vertices]
        except QhullError:
            rank -= 1
    # flat body: hull in the affine span, then keep the original points
    coords = centered @ vt[:rank].T
    if rank == 0:
        return pts[:1]
    if rank == 1:
        return pts[[int(np.argmin(coords[:, 0])), int(np.argmax(coords[:, 0]))]]
    keep = _chain_indices(coords)
    return pts[keep]


def _chain_indices(coords: np.ndarray) -> list[int]:
    hull = _chain(coords)
    index = {tuple(c): i for i, c in enumerate(coords)}
    return [index[tuple(h)] for h in hull]


def normalize_vertices(points, eps: float = 0.0) -> np.ndarray:
    """Irredundant vertex array of the convex hull of `points`."""
    pts = np.asarray(points, dtype=float) + 0.0  # no negative zeros
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2 or len(pts) == 0:
        raise ValueError("a convex body needs at least one vertex")
    if not np.all(np.isfinite(pts)):
        raise ValueError("vertices must be finite")
    d = pts.shape[1]
    if d == 1:
        lo, hi = pts[:, 0].min(), pts[:, 0].max()
        return np.array([[lo]]) if lo == hi else np.array([[lo], [hi]])
    if d == 2:
        hull = _chain(pts, eps)
        if eps > 0 and len(hull) == 2 and np.sum((hull[1] - hull[0]) ** 2) <= eps * eps:
            hull = hull[:1]
        return hull
    return _hull_nd(pts)


# ---------------------------------------------------------------------------
# the body type


class ConvexBody:
    """Nonempty compact convex subset of R^d, given by its vertices."""

    __slots__ = ("_vertices",)

    def __init__(self, vertices, *, normalized: bool = False, eps: float = 0.0):
        v = np.asarray(vertices, dtype=float)
        if v.ndim == 1:
            v = v[:, None]
        v = v + 0.0 if normalized else normalize_vertices(v, eps)
        v.setflags(write=False)
        self._vertices = v

    @property
    def vertices(self) -> np.ndarray:
        return self._vertices

    @property
    def dim(self) -> int:
        return self._vertices.shape[1]

    def __len__(self) -> int:
        return len(self._vertices)

    def __repr__(self) -> str:
        if self.dim == 1:
            return f"ConvexBody[{self._vertices[0, 0]:g}, {self._vertices[-1, 0]:g}]"
        return f"ConvexBody(dim={self.dim}, nvert={len(self)})"

    def __add__(self, other: "ConvexBody") -> "ConvexBody":
        return minkowski_sum(self, other)

    def __rmul__(self, lam: float) -> "ConvexBody":
        return scale(lam, self)

    def support(self, u) -> float:
        return float(np.max(self._vertices @ np.asarray(u, dtype=float)))

    def supports(self, U: np.ndarray) -> np.ndarray:
        """Support values for each row of the direction matrix `U`."""
        return np.max(self._vertices @ np.asarray(U, dtype=float).T, axis=0)

    def translate(self, v) -> "ConvexBody":
        return ConvexBody(self._vertices + as_vector(v, self.dim), normalized=True)

    def diameter(self) -> float:
        v = self._vertices
        if len(v) == 1:
            return 0.0
        diff = v[:, None, :] - v[None, :, :]
        return float(np.sqrt(np.max(np.einsum("ijk,ijk->ij", diff, diff))))

    def canonical_key(self) -> tuple:
        return tuple(np.round(self._vertices, 15).ravel().tolist())

    def to_json(self) -> dict:
        return {"vertices": self._vertices.tolist()}


# ---------------------------------------------------------------------------
# constructors


def point(p) -> ConvexBody:
    return ConvexBody(np.atleast_2d(as_vector(p)), normalized=True)


def interval(lo: float, hi: float) -> ConvexBody:
    if lo > hi:
        raise ValueError(f"empty interval [{lo}, {hi}]")
    return ConvexBody([[lo], [hi]])


def box(lo, hi) -> ConvexBody:
    lo = as_vector(lo)
    hi = as_vector(hi, lo.size)
    if np.any(lo > hi):
        raise ValueError("box lower corner exceeds upper corner")
    corners = np.array(list(itertools.product(*zip(lo, hi))), dtype=float)
    return ConvexBody(corners)


def spiral_points(n: int) -> np.ndarray:
    """`n` deterministic, roughly uniform unit vectors of R^3 (Fibonacci spiral)."""
    i = np.arange(n) + 0.5
    z = 1.0 - 2.0 * i / n
    r = np.sqrt(1.0 - z * z)
    phi = math.pi * (3.0 - math.sqrt(5.0)) * i
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def ball_poly(n: int = 32, dim: int = 2, radius: float = 1.0) -> ConvexBody:
    """Polytope inscribed in the Euclidean ball of the given radius."""
    if dim == 1:
        return interval(-radius, radius)
    if dim == 2:
        if n < 3:
            raise ValueError("ball_poly needs n >= 3 in the plane")
        theta = 2.0 * math.pi * np.arange(n) / n
        return ConvexBody(radius * np.column_stack([np.cos(theta), np.sin(theta)]))
    if dim == 3:
        return ConvexBody(radius * np.vstack([spiral_points(n), np.eye(3), -np.eye(3)]))
    raise DimensionError("ball_poly supports dim 1, 2 or 3")


def unit_ball(kind: NormKind | str, dim: int, n: int = 64) -> ConvexBody:
    """Polytopal unit ball of a lattice norm; L2 is approximated from inside."""
    kind = NormKind.parse(kind)
    if kind is NormKind.SUP:
        return box(-np.ones(dim), np.ones(dim))
    if kind is NormKind.L1:
        return ConvexBody(np.vstack([np.eye(dim), -np.eye(dim)]))
    return ball_poly(n, dim)


def body_from_json(spec, dim: int | None = None) -> ConvexBody:
    """Build a body from a JSON literal.

    Accepted forms: ``{"vertices": [[...], ...]}``, ``{"kind": "interval",
    "lo": a, "hi": b}``, ``{"kind": "box", "lo": [...], "hi": [...]}`` and
    ``{"kind": "ball_poly", "n": 16, "radius": 1.0}``.
    """
    if not isinstance(spec, dict):
        raise ValueError(f"body literal must be an object, got {type(spec).__name__}")
    if "vertices" in spec:
        verts = np.asarray(spec["vertices"], dtype=float)
        if verts.ndim == 1:
            verts = verts[:, None]
        if verts.ndim != 2 or len(verts) == 0:
            raise ValueError("'vertices' must be a nonempty list of coordinate lists")
        body = ConvexBody(verts)
    else:
        kind = spec.get("kind")
        if kind == "interval":
            body = interval(float(spec["lo"]), float(spec["hi"]))
        elif kind == "box":
            body = box(spec["lo"], spec["hi"])
        elif kind == "ball_poly":
            body = ball_poly(int(spec.get("n", 32)), int(spec.get("dim", dim or 2)),
                             float(spec.get("radius", 1.0)))
        elif kind == "point":
            body = point(spec["at"])
        else:
            raise ValueError(f"unknown body kind {kind!r}")
    if dim is not None and body.dim != dim:
        raise DimensionError(f"body has dimension {body.dim}, expected {dim}")
    return body


# ---------------------------------------------------------------------------
# nearest points


def min_norm_point(P: np.ndarray, tol: float = PROJECTION_TOL,
                   max_iter: int = PROJECTION_MAX_ITER,
                   threshold: float | None = None) -> tuple[np.ndarray, float]:
    """Point of ``conv(P)`` closest to the origin (Wolfe's algorithm).

    Returns ``(x, lower)`` where ``x`` is the final iterate and ``lower`` a
    certified lower bound on the true distance, ``‖x‖ - lower ≤ tol`` on
    normal exit.  With `threshold` set, iteration stops as soon as the
    comparison ``distance ≤ threshold`` is decided.
    """
    P = np.asarray(P, dtype=float)
    if len(P) == 1:
        return P[0].copy(), float(np.linalg.norm(P[0]))
    sq = np.einsum("ij,ij->i", P, P)
    S = [int(np.argmin(sq))]
    w = np.array([1.0])
    x = P[S[0]].copy()
    for _ in range(max_iter):
        xx = float(x @ x)
        if xx == 0.0:
            return x, 0.0
        nx = math.sqrt(xx)
        dots = P @ x
        j = int(np.argmin(dots))
        lower = max(float(dots[j]), 0.0) / nx
        if nx - lower <= tol:
            return x, lower
        if threshold is not None and (nx <= threshold or lower > threshold):
            return x, lower
        if j in S or xx - dots[j] <= 1e-15 * max(xx, float(np.max(sq))):
            # no further descent representable in floating point
            return x, lower
        S.append(j)
        w = np.append(w, 0.0)
        while True:
            Q = P[S]
            s = len(S)
            M = np.ones((s + 1, s + 1))
            M[:s, :s] = Q @ Q.T
            M[s, s] = 0.0
            rhs = np.zeros(s + 1)
            rhs[s] = 1.0
            v = np.linalg.lstsq(M, rhs, rcond=None)[0][:s]
            if np.all(v > 1e-14):
                w = v / v.sum()
                break
            mask = v <= 1e-14
            denom = w[mask] - v[mask]
            with np.errstate(divide="ignore", invalid="ignore"):
                ratios = np.where(denom > 0, w[mask] / denom, 0.0)
            theta = float(np.clip(np.min(ratios), 0.0, 1.0))
            w = theta * v + (1.0 - theta) * w
            keep = w > 1e-14
            if not np.any(keep):
                keep[int(np.argmax(w))] = True
            S = [S[i] for i in range(s) if keep[i]]
            w = w[keep]
            w = w / w.sum()
            if len(S) == 1:
                break
        x = w @ P[S]
    raise ProjectionError(f"nearest-point iteration did not converge in {max_iter} steps")


def point_distance(C: ConvexBody, x, tol: float = PROJECTION_TOL,
                   max_iter: int = PROJECTION_MAX_ITER) -> float:
    """Euclidean distance from `x` to `C`, accurate to `tol`."""
    x = as_vector(x, C.dim)
    if C.dim == 1:
        lo, hi = C.vertices[0, 0], C.vertices[-1, 0]
        return float(max(lo - x[0], x[0] - hi, 0.0))
    y, _ = min_norm_point(C.vertices - x, tol, max_iter)
    return float(np.linalg.norm(y))


def project(C: ConvexBody, x, tol: float = PROJECTION_TOL) -> np.ndarray:
    """Nearest point of `C` to `x`."""
    x = as_vector(x, C.dim)
    if C.dim == 1:
        return np.clip(x, C.vertices[0], C.vertices[-1])
    y, _ = min_norm_point(C.vertices - x, tol)
    return y + x


# ---------------------------------------------------------------------------
# operations


def _check_dims(A: ConvexBody, B: ConvexBody) -> None:
    if A.dim != B.dim:
        raise DimensionError(f"dimension mismatch: {A.dim} vs {B.dim}")


def support(C: ConvexBody, u) -> float:
    u = as_vector(u, C.dim)
    return C.support(u)


def _ccw_sum_2d(weights: np.ndarray, polys: np.ndarray) -> np.ndarray:
    """Minkowski sum ``Σ w_i P_i`` of counter-clockwise polygons by edge merging.

    `polys` has shape (n, k, 2); each polygon lists its vertices
    counter-clockwise (repeated vertices allowed, collinear ones harmless).
    The boundary of the sum is the angle-sorted union of all edges; where
    the cyclic order is cut does not matter.  The closed path is anchored by
    matching the support values in the +x and +y directions.
    """
    P = weights[:, None, None] * polys
    top = weights @ polys.max(axis=1)
    edges = (np.roll(P, -1, axis=1) - P).reshape(-1, 2)
    edges = edges[np.any(edges != 0.0, axis=1)]
    if len(edges) == 0:
        return top[None, :]
    angle = np.arctan2(edges[:, 1], edges[:, 0])
    angle = np.where(angle < 0.0, angle + 2.0 * math.pi, angle)
    order = np.argsort(angle, kind="stable")
    angle = angle[order]
    edges = edges[order]
    breaks = np.flatnonzero(np.diff(angle) > 1e-12) + 1
    heads = np.concatenate([[0], breaks])
    merged = np.add.reduceat(edges, heads, axis=0)
    path = np.vstack([np.zeros(2), np.cumsum(merged[:-1], axis=0)])
    return path + (top - path.max(axis=0))


def _same_fan_sum(weights: np.ndarray, polys: np.ndarray, rtol: float = 1e-12) -> np.ndarray | None:
    """Slotwise sum ``Σ w_i V_i`` when all polygons share one normal fan.

    Polygons whose ``j``-th edges are all zero or positively parallel to a
    common direction (distinct across ``j``) have the Minkowski sum whose
    ``j``-th vertex is the weighted sum of the ``j``-th vertices.  Returns
    None when the stack is not of that form.
    """
    E = np.roll(polys, -1, axis=1) - polys
    lengths = np.sqrt(np.einsum("nkd,nkd->nk", E, E))
    ref_row = int(np.argmax(np.sum(lengths > 0, axis=1)))
    ref = E[ref_row]
    ref_len = lengths[ref_row]
    live = ref_len > 0
    if np.any(lengths[:, ~live] > 0):
        return None
    if live.sum() >= 2:
        r = ref[live]
        turn = r[:, 0] * np.roll(r[:, 1], -1) - r[:, 1] * np.roll(r[:, 0], -1)
        if np.any(turn <= 0):
            return None
    cross = E[:, :, 0] * ref[None, :, 1] - E[:, :, 1] * ref[None, :, 0]
    dot = np.einsum("nkd,kd->nk", E, ref)
    tol = rtol * lengths * ref_len[None, :]
    if np.any(np.abs(cross) > tol) or np.any(dot < -tol):
        return None
    return np.einsum("n,nkd->kd", weights, polys)


def minkowski_combination(weights: Sequence[float], bodies: Sequence[ConvexBody],
                          canonical: bool = False,
                          cap: int = VERTEX_CAP) -> ConvexBody:
    """``Σ w_i C_i`` for nonnegative weights (a Riemann-Minkowski sum).

    With `canonical` the summands are first re-sorted by a canonical key, so
    that the floating-point result does not depend on the input order.
    """
    weights = np.asarray(weights, dtype=float)
    if len(bodies) == 0:
        raise ValueError("empty Minkowski combination; dimension unknown")
    if np.any(weights < 0):
        raise ValueError("Minkowski combination weights must be nonnegative")
    d = bodies[0].dim
    for C in bodies:
        if C.dim != d:
            raise DimensionError("mixed dimensions in Minkowski combination")
    if canonical:
        order = sorted(range(len(bodies)), key=lambda i: (bodies[i].canonical_key(), weights[i]))
        weights = weights[order]
        bodies = [bodies[i] for i in order]
    if d == 1:
        lo = np.array([C.vertices[0, 0] for C in bodies])
        hi = np.array([C.vertices[-1, 0] for C in bodies])
        return interval(float(weights @ lo), float(weights @ hi))
    if d == 2:
        k = max(len(C) for C in bodies)
        polys = np.empty((len(bodies), k, 2))
        for i, C in enumerate(bodies):
            v = C.vertices
            polys[i, : len(v)] = v
            polys[i, len(v):] = v[-1]
        return ConvexBody(_ccw_sum_2d(weights, polys))
    return _pairwise_sum(weights, [C.vertices for C in bodies], cap)


def _pairwise_sum(weights: np.ndarray, vertex_sets: Iterable[np.ndarray], cap: int) -> ConvexBody:
    acc = None
    for w, V in zip(weights, vertex_sets):
        term = w * V
        if acc is None:
            acc = normalize_vertices(term)
            continue
        if len(acc) * len(term) > cap:
            raise VertexOverflowError(
                f"pairwise vertex sums would exceed the cap of {cap}; use the embedded path")
        acc = normalize_vertices((acc[:, None, :] + term[None, :, :]).reshape(-1, acc.shape[1]))
    return ConvexBody(acc, normalized=True)


def minkowski_sum(A: ConvexBody, B: ConvexBody) -> ConvexBody:
    _check_dims(A, B)
    return minkowski_combination([1.0, 1.0], [A, B])


def scale(lam: float, A: ConvexBody) -> ConvexBody:
    lam = float(lam)
    if lam == 0.0:
        return point(np.zeros(A.dim))
    return ConvexBody(lam * A.vertices, normalized=lam > 0)


def hull_union(A: ConvexBody, B: ConvexBody) -> ConvexBody:
    _check_dims(A, B)
    return ConvexBody(np.vstack([A.vertices, B.vertices]))


def order_sup(C: ConvexBody) -> np.ndarray:
    """Componentwise supremum of the body (attained at vertices)."""
    return C.vertices.max(axis=0)


def order_inf(C: ConvexBody) -> np.ndarray:
    return C.vertices.min(axis=0)


def modulus_sup(C: ConvexBody) -> np.ndarray:
    """``sup{|x| : x ∈ C}`` computed componentwise; |x| is convex so vertices suffice."""
    return np.abs(C.vertices).max(axis=0)


def order_neighborhood(C: ConvexBody, b) -> ConvexBody:
    """``U(C, b) = C + [-b, b]``."""
    b = as_vector(b, C.dim)
    if np.any(b < 0):
        raise ValueError("order neighborhood radius must be componentwise nonnegative")
    if not np.any(b):
        return C
    return minkowski_sum(C, box(-b, b))


def hausdorff(A: ConvexBody, B: ConvexBody, tol: float = PROJECTION_TOL) -> float:
    """Hausdorff distance, accurate to `tol`.

    Both directed distances are attained at vertices because the distance
    to a convex set is a convex function.
    """
    _check_dims(A, B)
    if tol <= 0:
        raise ValueError("hausdorff tolerance must be positive")
    if A.dim == 1:
        a0, a1 = A.vertices[0, 0], A.vertices[-1, 0]
        b0, b1 = B.vertices[0, 0], B.vertices[-1, 0]
        return float(max(abs(a0 - b0), abs(a1 - b1)))
    best = 0.0
    for X, Y in ((A, B), (B, A)):
        for v in X.vertices:
            y, _ = min_norm_point(Y.vertices - v, tol / 2)
            best = max(best, float(np.linalg.norm(y)))
    return best


def contains(A: ConvexBody, B: ConvexBody, tol: float = 0.0) -> bool:
    """True iff every vertex of `B` lies within distance `tol` of `A`."""
    _check_dims(A, B)
    if tol < 0:
        raise ValueError("containment tolerance must be nonnegative")
    if A.dim == 1:
        lo, hi = A.vertices[0, 0], A.vertices[-1, 0]
        return bool(B.vertices[0, 0] >= lo - tol and B.vertices[-1, 0] <= hi + tol)
    # cheap rejection: support functions must be ordered on the coordinate axes
    E = np.vstack([np.eye(A.dim), -np.eye(A.dim)])
    if np.any(B.supports(E) > A.supports(E) + tol):
        return False
    proj_tol = max(min(tol, PROJECTION_TOL) / 2, 1e-15)
    for v in B.vertices:
        rel = A.vertices - v
        # Wolfe iterates stall at rounding level for interior points
        slack = proj_tol + 1e-13 * max(1.0, float(np.max(np.abs(rel))))
        y, lower = min_norm_point(rel, proj_tol, threshold=tol)
        if lower > tol:
            return False
        if float(np.linalg.norm(y)) > tol + slack:
            return False
    return True


def member(C: ConvexBody, x, tol: float = 1e-10) -> bool:
    return point_distance(C, x, min(PROJECTION_TOL, tol / 2)) <= tol
