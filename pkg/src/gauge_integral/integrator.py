"""Gauge integration of single-valued and set-valued integrands on [0, 1].

The engine cannot quantify over every gauge-fine partition.  Instead it walks
a generated family: uniform dyadic refinements of the domain, each compared
with its predecessor and with tag-perturbed copies of itself.  A report
certifies the resulting Cauchy gap, nothing more.

Set-valued sums are computed along two independent routes:

* GEOMETRIC: Minkowski combination of vertex bodies (interval arithmetic in
  one dimension, edge merging in the plane, pairwise hulls in space);
* EMBEDDED: weighted sums of support vectors on a direction grid.
"""

from __future__ import annotations

import enum
import json
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field
from typing import NamedTuple, Union

import numpy as np

from . import convex
from .convex import ConvexBody, VertexOverflowError, hausdorff, minkowski_combination
from .integrands import CHUNK, Integrand, Kind, combine_partials
from .lattice import DimensionError, NormKind, OSequence, norm
from .partition import (Gauge, MeasurableSet, TaggedPartition, TagMode, constant_gauge,
                        cousin_partition, refine, restrict, uniform_partition)
from .radstrom import DirectionGrid, SupportVector, embed, make_grid, reconstruct, sup_distance

MAX_DOUBLINGS = 24
ORDER_CONTAINS_TOL = 1e-12

Value = Union[ConvexBody, SupportVector, np.ndarray]


class Path(str, enum.Enum):
    GEOMETRIC = "GEOMETRIC"
    EMBEDDED = "EMBEDDED"

    @classmethod
    def parse(cls, value: "Path | str | None", dim: int) -> "Path":
        if value is None:
            return default_path(dim)
        if isinstance(value, Path):
            return value
        try:
            return cls(str(value).upper())
        except ValueError:
            raise ValueError(f"unknown integration path {value!r}") from None


class Status(str, enum.Enum):
    CONVERGED = "CONVERGED"
    NOT_INTEGRABLE_AT_TOLERANCE = "NOT-INTEGRABLE-AT-TOLERANCE"
    NOT_INTEGRABLE_AT_ORDER_INDEX = "NOT-INTEGRABLE-AT-ORDER-INDEX"


class OverlapError(ValueError):
    """Steps of a simple multifunction overlap on a set of positive measure."""


class MonotonicityError(ValueError):
    pass


def default_path(dim: int) -> Path:
    return Path.GEOMETRIC if dim <= 2 else Path.EMBEDDED


# ---------------------------------------------------------------------------
# Riemann-Minkowski sums


def _weighted_points(weights: np.ndarray, X_of: callable, ts: np.ndarray, width: int) -> np.ndarray:
    partials = [weights[i:i + CHUNK] @ X_of(ts[i:i + CHUNK]) for i in range(0, len(ts), CHUNK)]
    return combine_partials(partials, width)


def _geometric_sum(F: Integrand, weights: np.ndarray, ts: np.ndarray) -> ConvexBody:
    d = F.dim
    if len(ts) == 0:
        return convex.point(np.zeros(d))
    if d == 1:
        lo = _weighted_points(weights, lambda t: F.vertices_at(t).min(axis=1), ts, 1)
        hi = _weighted_points(weights, lambda t: F.vertices_at(t).max(axis=1), ts, 1)
        return convex.interval(float(lo[0]), float(hi[0]))
    if F.common_fan:
        return ConvexBody(F.weighted_vertices(weights, ts))
    if d == 2:
        chunk_polys = []
        for i in range(0, len(ts), CHUNK):
            V = F.vertices_at(ts[i:i + CHUNK])
            w = weights[i:i + CHUNK]
            poly = convex._same_fan_sum(w, V)
            chunk_polys.append(convex._ccw_sum_2d(w, V) if poly is None else poly)
        if len(chunk_polys) == 1:
            return ConvexBody(chunk_polys[0])
        stack = np.zeros((len(chunk_polys), max(len(p) for p in chunk_polys), 2))
        for i, p in enumerate(chunk_polys):
            p = ConvexBody(p).vertices  # re-normalized, ccw
            stack[i, : len(p)] = p
            stack[i, len(p):] = p[-1]
        return ConvexBody(convex._ccw_sum_2d(np.ones(len(chunk_polys)), stack))
    V = F.vertices_at(ts)
    return convex._pairwise_sum(weights, list(V), convex.VERTEX_CAP)


def riemann_sum(F: Integrand, P: TaggedPartition, path: Path | str | None = None,
                grid: DirectionGrid | None = None) -> Value:
    """``Σ μ(E_i) F(t_i)`` over the cells of `P`.

    Single-valued integrands give a vector.  Set-valued ones give a
    ConvexBody on the geometric path and a SupportVector on the embedded
    path.
    """
    weights = P.lengths
    ts = P.tags
    if F.kind is Kind.SINGLE:
        return _weighted_points(weights, F.values_at, ts, F.dim)
    path = Path.parse(path, F.dim)
    if path is Path.GEOMETRIC:
        return _geometric_sum(F, weights, ts)
    grid = grid or make_grid(F.dim)
    if grid.d != F.dim:
        raise DimensionError("grid dimension differs from integrand dimension")
    return SupportVector(F.weighted_supports(weights, ts, grid.directions), grid)


# ---------------------------------------------------------------------------
# the refinement loop


def perturbed_tags(P: TaggedPartition) -> tuple[np.ndarray, np.ndarray]:
    """Tag arrays of the two comparison partitions.

    PERRON: left and right endpoints.  FREE: one cell width left and right
    of the midpoint, i.e. outside the cell, clipped to [0, 1].  Using both
    sides guarantees that a cell straddling a jump is seen.
    """
    if P.mode is TagMode.PERRON:
        return P.left.copy(), P.right.copy()
    half = 0.5 * P.lengths
    return np.clip(P.left - half, 0.0, 1.0), np.clip(P.right + half, 0.0, 1.0)


class Level(NamedTuple):
    level: int
    partition: TaggedPartition
    current: Value
    perturbed: tuple[Value, ...]


def level_sums(F: Integrand, domain: MeasurableSet | None = None,
               mode: TagMode | str = TagMode.PERRON, path: Path | str | None = None,
               grid: DirectionGrid | None = None,
               max_doublings: int = MAX_DOUBLINGS) -> Iterator[Level]:
    """Riemann sums on the generated partition family, level by level."""
    mode = TagMode.parse(mode)
    path = Path.parse(path, F.dim)
    if path is Path.EMBEDDED and F.kind is Kind.MULTI:
        grid = grid or make_grid(F.dim)
    P = uniform_partition(1, domain, mode)
    for k in range(max_doublings + 1):
        current = riemann_sum(F, P, path, grid)
        others = tuple(riemann_sum(F, P.with_tags(t), path, grid) for t in perturbed_tags(P))
        yield Level(k, P, current, others)
        if k < max_doublings:
            P = refine(P)


def distance(S: Value, T: Value, kind: NormKind | str = NormKind.SUP) -> float:
    """Gap between two sums of the same route (Hausdorff, sup or vector norm)."""
    if isinstance(S, ConvexBody):
        return hausdorff(S, T)
    if isinstance(S, SupportVector):
        return sup_distance(S, T)
    return norm(np.asarray(S) - np.asarray(T), kind)


def norm_accepts(S: Value, T: Value, eps: float, kind: NormKind | str = NormKind.SUP) -> bool:
    return distance(S, T, kind) <= eps


def order_accepts(S: Value, T: Value, b: np.ndarray) -> bool:
    """Mutual inclusion ``S ⊂ U(T, b)`` and ``T ⊂ U(S, b)``.

    For support vectors the order neighbourhood is taken in the M-space of
    the embedding itself, so `b` has one coordinate per grid direction.
    """
    b = np.asarray(b, dtype=float)
    if isinstance(S, ConvexBody):
        return (convex.contains(convex.order_neighborhood(T, b), S, ORDER_CONTAINS_TOL)
                and convex.contains(convex.order_neighborhood(S, b), T, ORDER_CONTAINS_TOL))
    if isinstance(S, SupportVector):
        return bool(np.all(np.abs(S.values - T.values) <= b))
    return bool(np.all(np.abs(np.asarray(S) - np.asarray(T)) <= b))


@dataclass(frozen=True, eq=False)
class IntegrationReport:
    result: Value
    path: Path | None
    refinements: int
    final_gap: float
    stop_rule: str
    threshold: float
    partition_mode: TagMode
    status: Status
    cells: int
    gap_history: tuple[float, ...] = ()
    accepted: tuple = field(default=(), repr=False)

    @property
    def converged(self) -> bool:
        return self.status is Status.CONVERGED

    @property
    def body(self) -> ConvexBody:
        if isinstance(self.result, ConvexBody):
            return self.result
        if isinstance(self.result, SupportVector):
            return reconstruct(self.result)
        return convex.point(self.result)

    def to_json(self) -> dict:
        r = self.result
        if isinstance(r, ConvexBody):
            result = {"type": "body", **r.to_json()}
        elif isinstance(r, SupportVector):
            result = {"type": "support_vector", "grid_size": r.grid.m,
                      "values": r.values.tolist(),
                      "reconstructed": reconstruct(r).to_json()}
        else:
            result = {"type": "vector", "value": np.asarray(r).tolist()}
        return {
            "status": self.status.value,
            "result": result,
            "path": self.path.value if self.path else "SINGLE",
            "refinements": self.refinements,
            "cells": self.cells,
            "final_gap": self.final_gap,
            "threshold": self.threshold,
            "stop_rule": self.stop_rule,
            "partition_mode": self.partition_mode.value,
            "gap_history": list(self.gap_history),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)


def _level_gap(lv: Level, prev: Value | None, kind) -> float:
    gap = max(distance(lv.current, T, kind) for T in lv.perturbed)
    if prev is not None:
        gap = max(gap, distance(lv.current, prev, kind))
    return gap


def integrate_norm(F: Integrand, eps: float, mode: TagMode | str = TagMode.PERRON,
                   path: Path | str | None = None, *, domain: MeasurableSet | None = None,
                   grid: DirectionGrid | None = None, norm_kind: NormKind | str = NormKind.SUP,
                   max_doublings: int = MAX_DOUBLINGS) -> IntegrationReport:
    """Refine until the Cauchy gap of the generated family is at most `eps`.

    Running out of doublings yields a NOT-INTEGRABLE-AT-TOLERANCE report whose
    result is the last sum computed; it is not an exception.
    """
    if not eps > 0:
        raise ValueError("tolerance must be positive")
    mode = TagMode.parse(mode)
    p = Path.parse(path, F.dim) if F.kind is Kind.MULTI else None
    prev = None
    history = []
    for lv in level_sums(F, domain, mode, p, grid, max_doublings):
        gap = _level_gap(lv, prev, norm_kind)
        history.append(gap)
        if gap <= eps:
            return IntegrationReport(lv.current, p, lv.level, gap, f"NORM({eps!r})", eps, mode,
                                     Status.CONVERGED, len(lv.partition), tuple(history),
                                     (lv.current, *lv.perturbed) + ((prev,) if prev is not None else ()))
        prev = lv.current
    return IntegrationReport(lv.current, p, lv.level, gap, f"NORM({eps!r})", eps, mode,
                             Status.NOT_INTEGRABLE_AT_TOLERANCE, len(lv.partition), tuple(history))


def order_radius(s: OSequence, n: int, F: Integrand, path: Path | None,
                 grid: DirectionGrid | None = None) -> np.ndarray:
    """``b_n`` in the space where the stop test lives (R^d, or R^m when embedded)."""
    if F.kind is Kind.MULTI and path is Path.EMBEDDED:
        width = (grid or make_grid(F.dim)).m
    else:
        width = F.dim
    return s.broadcast(width).at(n)


def integrate_order(F: Integrand, s: OSequence, n_target: int,
                    mode: TagMode | str = TagMode.PERRON, path: Path | str | None = None, *,
                    domain: MeasurableSet | None = None, grid: DirectionGrid | None = None,
                    max_doublings: int = MAX_DOUBLINGS) -> IntegrationReport:
    """Refine until consecutive and tag-perturbed sums trap each other in ``U(·, b_n)``."""
    if n_target < 0:
        raise ValueError("order index must be nonnegative")
    mode = TagMode.parse(mode)
    p = Path.parse(path, F.dim) if F.kind is Kind.MULTI else None
    if p is Path.EMBEDDED:
        grid = grid or make_grid(F.dim)
    b = order_radius(s, n_target, F, p, grid)
    prev = None
    history = []
    rule = f"ORDER(n={n_target})"
    for lv in level_sums(F, domain, mode, p, grid, max_doublings):
        gap = _level_gap(lv, prev, NormKind.SUP)
        history.append(gap)
        ok = all(order_accepts(lv.current, T, b) for T in lv.perturbed)
        if ok and prev is not None:
            ok = order_accepts(lv.current, prev, b)
        if ok:
            return IntegrationReport(lv.current, p, lv.level, gap, rule, float(np.min(b)), mode,
                                     Status.CONVERGED, len(lv.partition), tuple(history),
                                     (lv.current, *lv.perturbed) + ((prev,) if prev is not None else ()))
        prev = lv.current
    return IntegrationReport(lv.current, p, lv.level, gap, rule, float(np.min(b)), mode,
                             Status.NOT_INTEGRABLE_AT_ORDER_INDEX, len(lv.partition), tuple(history))


# ---------------------------------------------------------------------------
# exact and bracketing integrals


def integrate_simple(steps: Sequence[tuple[MeasurableSet, ConvexBody]]) -> ConvexBody:
    """Exact integral ``Σ μ(E_i) C_i`` of a simple multifunction."""
    if not steps:
        raise ValueError("no steps given")
    for i in range(len(steps)):
        for j in range(i + 1, len(steps)):
            if steps[i][0].overlap_measure(steps[j][0]) > 0:
                raise OverlapError(f"steps {i} and {j} overlap on a set of positive measure")
    weights = [E.measure for E, _ in steps]
    return minkowski_combination(weights, [C for _, C in steps])


class Bracket(NamedTuple):
    lower: ConvexBody
    upper: ConvexBody
    bound: float
    K: float
    holds: bool


def integrate_monotone_bracket(F: Integrand, n: int, tol: float = 1e-10) -> Bracket:
    """Step brackets of an inclusion-increasing multifunction on ``t_i = i/n``.

    ``lower`` integrates ``F(t_i)`` on ``[t_i, t_{i+1})``, ``upper`` integrates
    ``F(t_{i+1})`` on ``(t_i, t_{i+1}]``.  The bound is ``2K/n`` with ``K`` the
    sup norm of the componentwise ``sup |x|`` over ``F(1)``.
    """
    if n < 1:
        raise ValueError("need at least one cell")
    ts = np.arange(n + 1) / n
    bodies = [ConvexBody(V) for V in F.vertices_at(ts)]
    for i in range(n):
        if not convex.contains(bodies[i + 1], bodies[i], tol):
            raise MonotonicityError(f"F({ts[i]!r}) is not contained in F({ts[i + 1]!r})")
    w = np.full(n, 1.0 / n)
    lower = minkowski_combination(w, bodies[:-1])
    upper = minkowski_combination(w, bodies[1:])
    K = float(np.max(convex.modulus_sup(bodies[-1])))
    bound = 2.0 * K / n
    holds = convex.contains(convex.order_neighborhood(lower, np.full(F.dim, bound)), upper,
                            ORDER_CONTAINS_TOL)
    return Bracket(lower, upper, bound, K, holds)


def phi_outer(F: Integrand, E: MeasurableSet, n: int, trials: int = 4,
              grid: DirectionGrid | None = None,
              ball: NormKind | str = NormKind.SUP) -> ConvexBody:
    """Outer approximation of ``∩ (Σ_Π F + B/n)`` over `trials` fine partitions.

    Trial ``k`` uses the Cousin partition of `E` for the constant gauge
    ``2^-k / n``.  The intersection is formed on support vectors
    (componentwise minimum) and returned as the circumscribed polytope.
    """
    if n < 1 or trials < 1:
        raise ValueError("n and trials must be at least 1")
    grid = grid or make_grid(F.dim)
    ball_sv = (1.0 / n) * embed(convex.unit_ball(ball, F.dim), grid)
    values = None
    for k in range(trials):
        P = cousin_partition(constant_gauge(2.0 ** -k / n), E)
        sv = riemann_sum(F, P, Path.EMBEDDED, grid) + ball_sv
        values = sv if values is None else values.min(sv)
    return reconstruct(values)


def gauge_riemann_sum(F: Integrand, g: Gauge, domain: MeasurableSet | None = None,
                      path: Path | str | None = None, grid: DirectionGrid | None = None) -> Value:
    """Riemann sum over the Cousin partition of a gauge."""
    return riemann_sum(F, cousin_partition(g, domain), path, grid)


def restricted_sum(F: Integrand, P: TaggedPartition, E: MeasurableSet,
                   path: Path | str | None = None, grid: DirectionGrid | None = None) -> Value:
    return riemann_sum(F, restrict(P, E), path, grid)


__all__ = [
    "Bracket", "IntegrationReport", "Level", "MonotonicityError", "OverlapError", "Path",
    "Status", "VertexOverflowError", "default_path", "distance", "gauge_riemann_sum",
    "integrate_monotone_bracket", "integrate_norm", "integrate_order", "integrate_simple",
    "level_sums", "norm_accepts", "order_accepts", "order_radius", "perturbed_tags",
    "phi_outer", "restricted_sum", "riemann_sum",
]
