"""Integrands: single-valued maps ``t -> R^d`` and multifunctions ``t -> ConvexBody``.

Every integrand evaluates on whole arrays of tags at once.  Multifunctions
return vertex stacks of shape ``(n, k, d)``; in the plane the ``k`` vertices
of each slice are listed counter-clockwise (repeats allowed), which is what
the edge-merging Minkowski summation needs.
"""

from __future__ import annotations

import enum
from collections.abc import Callable, Sequence

import numpy as np

from .convex import ConvexBody, body_from_json, box
from .lattice import as_vector
from .partition import MeasurableSet

CHUNK = 1 << 18


class Kind(str, enum.Enum):
    SINGLE = "SINGLE"
    MULTI = "MULTI"


class Integrand:
    kind: Kind
    dim: int
    # True when every value shares one normal fan and vertex slots line up
    common_fan: bool = False

    def __init__(self, kind: Kind, dim: int, descriptor: dict | None = None):
        self.kind = kind
        self.dim = int(dim)
        self.descriptor = descriptor or {"name": type(self).__name__}

    def __repr__(self) -> str:
        return f"<{self.kind.value} integrand {self.descriptor.get('name')} dim={self.dim}>"

    # single-valued interface
    def values_at(self, ts: np.ndarray) -> np.ndarray:
        raise TypeError(f"{self!r} is not single-valued")

    # multivalued interface
    def vertices_at(self, ts: np.ndarray) -> np.ndarray:
        raise TypeError(f"{self!r} is not set-valued")

    def supports_at(self, ts: np.ndarray, U: np.ndarray) -> np.ndarray:
        """Support values ``h(F(t_i), u_j)`` as an ``(n, m)`` array."""
        V = self.vertices_at(ts)
        return np.max(np.einsum("nkd,md->nkm", V, U), axis=1)

    def support_points_at(self, ts: np.ndarray, U: np.ndarray) -> np.ndarray:
        """Support-point selections for the rows of `U` as an ``(n, m, d)`` array."""
        V = self.vertices_at(ts)
        rows = np.arange(len(V))
        return np.stack([V[rows, support_point_indices(V, u)] for u in U], axis=1)

    def weighted_vertices(self, weights: np.ndarray, ts: np.ndarray) -> np.ndarray:
        """Slotwise ``Σ_i w_i V(t_i)``; the Minkowski sum only when `common_fan` holds."""
        partials = [np.einsum("n,nkd->kd", weights[i:i + CHUNK], self.vertices_at(ts[i:i + CHUNK]))
                    for i in range(0, len(ts), CHUNK)]
        k = partials[0].shape[0] if partials else 1
        return combine_partials([p.ravel() for p in partials], k * self.dim).reshape(k, self.dim)

    def weighted_supports(self, weights: np.ndarray, ts: np.ndarray, U: np.ndarray) -> np.ndarray:
        """``Σ_i w_i h(F(t_i), ·)`` on the rows of `U`, accumulated chunk by chunk."""
        partials = [weights[i:i + CHUNK] @ self.supports_at(ts[i:i + CHUNK], U)
                    for i in range(0, len(ts), CHUNK)]
        return combine_partials(partials, U.shape[0])

    def __call__(self, t: float):
        ts = np.array([float(t)])
        if self.kind is Kind.SINGLE:
            return self.values_at(ts)[0]
        return ConvexBody(self.vertices_at(ts)[0])


def combine_partials(partials: Sequence[np.ndarray], width: int) -> np.ndarray:
    """Sum per-chunk partial sums in a fixed order."""
    if not partials:
        return np.zeros(width)
    return np.ones(len(partials)) @ np.vstack(partials)


# ---------------------------------------------------------------------------
# single-valued


class VectorIntegrand(Integrand):
    """Single-valued integrand from a vectorized map ``ts -> (n, d)``."""

    def __init__(self, fn: Callable[[np.ndarray], np.ndarray], dim: int, descriptor: dict | None = None):
        super().__init__(Kind.SINGLE, dim, descriptor)
        self._fn = fn

    def values_at(self, ts):
        out = np.asarray(self._fn(np.asarray(ts, dtype=float)), dtype=float)
        return out.reshape(len(ts), self.dim)


def single_poly(powers: Sequence[float]) -> VectorIntegrand:
    """``t -> (t**p_1, ..., t**p_d)``."""
    p = np.asarray(powers, dtype=float)
    return VectorIntegrand(lambda ts: ts[:, None] ** p[None, :], len(p),
                           {"name": "single_poly", "powers": p.tolist()})


# ---------------------------------------------------------------------------
# set-valued


class AffineMulti(Integrand):
    """``F(t) = a(t) C + b(t)`` with a scalar ``a(t) ≥ 0`` and a shift ``b(t)``.

    Positive linearity of support functions gives the weighted support sum
    in closed form: ``(Σ w a) h_C + <Σ w b, ·>``.
    """

    common_fan = True

    def __init__(self, body: ConvexBody, scale_fn: Callable | None = None,
                 shift_fn: Callable | None = None, descriptor: dict | None = None):
        super().__init__(Kind.MULTI, body.dim, descriptor)
        self.body = body
        self._scale = scale_fn
        self._shift = shift_fn

    def scales(self, ts):
        if self._scale is None:
            return np.ones(len(ts))
        a = np.asarray(self._scale(ts), dtype=float).reshape(len(ts))
        if np.any(a < 0):
            raise ValueError("affine multifunction scale must be nonnegative")
        return a

    def shifts(self, ts):
        if self._shift is None:
            return np.zeros((len(ts), self.dim))
        return np.asarray(self._shift(ts), dtype=float).reshape(len(ts), self.dim)

    def vertices_at(self, ts):
        ts = np.asarray(ts, dtype=float)
        V = self.body.vertices
        out = self.scales(ts)[:, None, None] * V[None]
        if self._shift is not None:
            out += self.shifts(ts)[:, None, :]
        return out

    def supports_at(self, ts, U):
        ts = np.asarray(ts, dtype=float)
        return np.outer(self.scales(ts), self.body.supports(U)) + self.shifts(ts) @ U.T

    def support_points_at(self, ts, U):
        # the maximizing vertex of a C + b does not depend on a > 0 or b
        V = self.body.vertices
        P = np.stack([V[support_point_indices(V[None], u)[0]] for u in np.atleast_2d(U)])
        out = self.scales(np.asarray(ts, dtype=float))[:, None, None] * P[None]
        if self._shift is not None:
            out += self.shifts(ts)[:, None, :]
        return out

    def weighted_vertices(self, weights, ts):
        ts = np.asarray(ts, dtype=float)
        out = float(weights @ self.scales(ts)) * self.body.vertices
        if self._shift is not None:
            out = out + weights @ self.shifts(ts)
        return out

    def weighted_supports(self, weights, ts, U):
        ts = np.asarray(ts, dtype=float)
        wa = float(weights @ self.scales(ts))
        wb = weights @ self.shifts(ts)
        return wa * self.body.supports(U) + U @ wb


class VertexMulti(Integrand):
    """Multifunction from a vectorized vertex map ``ts -> (n, k, d)``.

    The map must honour the counter-clockwise convention in the plane.
    """

    def __init__(self, fn: Callable[[np.ndarray], np.ndarray], dim: int, descriptor: dict | None = None):
        super().__init__(Kind.MULTI, dim, descriptor)
        self._fn = fn

    def vertices_at(self, ts):
        return np.asarray(self._fn(np.asarray(ts, dtype=float)), dtype=float)


class CallableMulti(Integrand):
    """Multifunction from a scalar map ``t -> ConvexBody`` (slow, general)."""

    def __init__(self, fn: Callable[[float], ConvexBody], dim: int, descriptor: dict | None = None):
        super().__init__(Kind.MULTI, dim, descriptor)
        self._fn = fn

    def vertices_at(self, ts):
        bodies = [self._fn(float(t)) for t in np.asarray(ts, dtype=float)]
        return pad_vertices([C.vertices for C in bodies], self.dim)

    def __call__(self, t):
        return self._fn(float(t))


def pad_vertices(vertex_sets: Sequence[np.ndarray], dim: int) -> np.ndarray:
    k = max((len(v) for v in vertex_sets), default=1)
    out = np.zeros((len(vertex_sets), k, dim))
    for i, v in enumerate(vertex_sets):
        out[i, : len(v)] = v
        out[i, len(v):] = v[-1]
    return out


class StepMulti(Integrand):
    """Simple multifunction: ``C_i`` on ``E_i``, ``{0}`` off the union.

    The first step whose set contains ``t`` wins at shared endpoints.
    """

    def __init__(self, steps: Sequence[tuple[MeasurableSet, ConvexBody]], descriptor: dict | None = None):
        if not steps:
            raise ValueError("a simple multifunction needs at least one step")
        dim = steps[0][1].dim
        super().__init__(Kind.MULTI, dim, descriptor or {"name": "simple"})
        self.steps = list(steps)
        zero = np.zeros((1, dim))
        self._stack = pad_vertices([C.vertices for _, C in steps] + [zero], dim)

    def step_index(self, ts):
        idx = np.full(len(ts), len(self.steps))
        for i in reversed(range(len(self.steps))):
            E = self.steps[i][0]
            hit = np.zeros(len(ts), dtype=bool)
            for a, b in E.intervals:
                hit |= (ts >= a) & (ts <= b)
            idx[hit] = i
        return idx

    def vertices_at(self, ts):
        ts = np.asarray(ts, dtype=float)
        return self._stack[self.step_index(ts)]

    def supports_at(self, ts, U):
        table = np.max(np.einsum("skd,md->skm", self._stack, U), axis=1)
        return table[self.step_index(np.asarray(ts, dtype=float))]

    def weighted_supports(self, weights, ts, U):
        # total weight per step, then one product with the per-step support table
        idx = self.step_index(np.asarray(ts, dtype=float))
        w = np.array([weights[idx == s].sum() for s in range(len(self._stack))])
        return w @ np.max(np.einsum("skd,md->skm", self._stack, U), axis=1)

    def support_points_at(self, ts, U):
        S, rows = self._stack, np.arange(len(self._stack))
        table = np.stack([S[rows, support_point_indices(S, u)] for u in np.atleast_2d(U)], axis=1)
        return table[self.step_index(np.asarray(ts, dtype=float))]


# ---------------------------------------------------------------------------
# derived integrands


def singleton_of(f: Integrand) -> VertexMulti:
    """The multifunction ``t -> {f(t)}``."""
    return VertexMulti(lambda ts: f.values_at(ts)[:, None, :], f.dim,
                       {"name": "singleton", "of": f.descriptor})


class _Translated(Integrand):
    def __init__(self, F: Integrand, f: Integrand, descriptor: dict):
        super().__init__(Kind.MULTI, F.dim, descriptor)
        self.F, self.f = F, f

    def vertices_at(self, ts):
        return self.F.vertices_at(ts) - self.f.values_at(ts)[:, None, :]

    def supports_at(self, ts, U):
        return self.F.supports_at(ts, U) - self.f.values_at(ts) @ U.T


def translated(F: Integrand, f: Integrand) -> Integrand:
    """``G(t) = F(t) - f(t)``."""
    if F.dim != f.dim:
        raise ValueError("dimension mismatch between multifunction and shift")
    return _Translated(F, f, {"name": "translated", "of": F.descriptor, "by": f.descriptor})


def order_sup_selection(F: Integrand) -> VectorIntegrand:
    """``g(t) = sup F(t)`` (componentwise maximum over the vertices)."""
    return VectorIntegrand(lambda ts: F.vertices_at(ts).max(axis=1), F.dim,
                           {"name": "order_sup", "of": F.descriptor})


def support_magnitudes(F: Integrand, U: np.ndarray) -> VectorIntegrand:
    """``t -> (|h(F(t), u_j)|)_j``, one coordinate per direction."""
    U = np.asarray(U, dtype=float)
    return VectorIntegrand(lambda ts: np.abs(F.supports_at(ts, U)), U.shape[0],
                           {"name": "support_magnitudes", "of": F.descriptor, "m": U.shape[0]})


def support_point_indices(V: np.ndarray, u: np.ndarray, rtol: float = 1e-12) -> np.ndarray:
    """Per slice of `V`, index of the maximizer of ``<u, ·>``; ties go to the lexicographically largest vertex."""
    scores = V @ u
    best = scores.max(axis=1, keepdims=True)
    scale_ = np.maximum(1.0, np.abs(best))
    cand = scores >= best - rtol * scale_
    n, k, d = V.shape
    for j in range(d):
        coord = np.where(cand, V[:, :, j], -np.inf)
        top = coord.max(axis=1, keepdims=True)
        cand &= coord == top
    return np.argmax(cand, axis=1)


def support_point_selection(F: Integrand, u) -> VectorIntegrand:
    """Selection ``t -> argmax_{x ∈ F(t)} <u, x>`` with lexicographic tie-break."""
    u = as_vector(u, F.dim)

    def fn(ts):
        return F.support_points_at(ts, u[None])[:, 0]

    return VectorIntegrand(fn, F.dim, {"name": "support_point", "of": F.descriptor,
                                       "direction": u.tolist()})


# ---------------------------------------------------------------------------
# builtin registry


def _t(ts):
    return ts


def linear_body(body: ConvexBody) -> AffineMulti:
    """``F(t) = t C``."""
    return AffineMulti(body, _t, None, {"name": "linear_body", "body": body.to_json()})


def interval_0t(dim: int = 1) -> AffineMulti:
    """``F(t) = [0, t]^d``."""
    return AffineMulti(box(np.zeros(dim), np.ones(dim)), _t, None,
                       {"name": "interval_0t", "dim": dim})


def sym_interval(dim: int = 1) -> AffineMulti:
    """``F(t) = [-t, t]^d``."""
    return AffineMulti(box(-np.ones(dim), np.ones(dim)), _t, None,
                       {"name": "sym_interval", "dim": dim})


def translate_box(dim: int = 1) -> AffineMulti:
    """``F(t) = [t, t + 1]^d``."""
    return AffineMulti(box(np.zeros(dim), np.ones(dim)), None,
                       lambda ts: np.repeat(ts[:, None], dim, axis=1),
                       {"name": "translate_box", "dim": dim})


def constant(body: ConvexBody) -> AffineMulti:
    return AffineMulti(body, None, None, {"name": "constant", "body": body.to_json()})


def simple(steps: Sequence[tuple[MeasurableSet, ConvexBody]]) -> StepMulti:
    desc = {"name": "simple",
            "steps": [{"set": E.to_json(), "body": C.to_json()} for E, C in steps]}
    return StepMulti(steps, desc)


BUILTINS = ("linear_body", "interval_0t", "sym_interval", "translate_box", "constant",
            "simple", "single_poly")


def integrand_from_config(spec: dict, dim: int | None = None) -> Integrand:
    """Build a builtin integrand from its JSON descriptor."""
    if not isinstance(spec, dict) or "name" not in spec:
        raise ValueError("integrand descriptor must be an object with a 'name'")
    name = spec["name"]
    d = int(spec.get("dim", dim or 1))
    if name == "linear_body":
        return linear_body(body_from_json(spec["body"], dim))
    if name == "interval_0t":
        return interval_0t(d)
    if name == "sym_interval":
        return sym_interval(d)
    if name == "translate_box":
        return translate_box(d)
    if name == "constant":
        return constant(body_from_json(spec["body"], dim))
    if name == "simple":
        steps = [(MeasurableSet(s["set"]), body_from_json(s["body"], dim)) for s in spec["steps"]]
        return simple(steps)
    if name == "single_poly":
        powers = spec.get("powers", [1.0] * d)
        f = single_poly(powers)
        if dim is not None and f.dim != dim:
            raise ValueError(f"single_poly has {f.dim} powers, expected dimension {dim}")
        return f
    raise ValueError(f"unknown integrand {name!r}; builtins are {', '.join(BUILTINS)}")

