"""Executable checks of the structural results about set-valued gauge integrals.

Each check integrates one or more derived integrands, measures residuals and
returns a :class:`TheoremReport`.  A check PASSes iff every residual is at
most its tolerance; it is SKIPPED when an integration does not certify its
Cauchy gap or when a hypothesis fails on the fixture.  Tolerances follow
triangle-inequality bookkeeping: ``3ε`` when two integrals are added and
compared with a third, ``2 b_n`` for order comparisons.
"""

from __future__ import annotations

import csv
import io
import json
import math
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from . import convex
from .convex import ConvexBody, box, hausdorff, minkowski_combination, point_distance
from .integrands import (Integrand, Kind, VectorIntegrand, constant, integrand_from_config,
                         interval_0t, linear_body, order_sup_selection, simple, support_magnitudes,
                         support_point_selection, sym_interval,
                         translate_box, translated)
from .integrator import (IntegrationReport, Path, default_path, integrate_monotone_bracket,
                         integrate_norm, integrate_order, level_sums, norm_accepts, order_accepts,
                         order_radius, phi_outer)
from .lattice import OSequence
from .partition import MeasurableSet, TagMode
from .radstrom import embed, make_grid, reconstruct, sup_distance

PASS, FAIL, SKIPPED = "PASS", "FAIL", "SKIPPED"
SAMPLES = 33


@dataclass
class TheoremReport:
    theorem_id: str
    fixture: dict
    residuals: dict[str, float] = field(default_factory=dict)
    tolerances: dict[str, float] = field(default_factory=dict)
    verdict: str = PASS
    reason: str = ""
    info: dict = field(default_factory=dict)

    def finish(self) -> "TheoremReport":
        if self.verdict != SKIPPED:
            ok = all(self.residuals[k] <= self.tolerances[k] for k in self.residuals)
            self.verdict = PASS if ok else FAIL
        return self

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values(), default=0.0)

    def to_json(self) -> dict:
        return {"theorem_id": self.theorem_id, "fixture": self.fixture,
                "verdict": self.verdict, "reason": self.reason,
                "residuals": self.residuals, "tolerances": self.tolerances, "info": self.info}


def _skip(report: TheoremReport, reason: str) -> TheoremReport:
    report.verdict = SKIPPED
    report.reason = reason
    return report


def _not_certified(*reports: IntegrationReport) -> str | None:
    for r in reports:
        if not r.converged:
            return f"integration stopped with {r.status.value} after {r.refinements} doublings"
    return None


# ---------------------------------------------------------------------------
# selections


@dataclass(frozen=True)
class SelectionFunction:
    """Support-point selection of a multifunction in a fixed direction."""

    F: Integrand
    direction: np.ndarray

    def __call__(self, t: float) -> np.ndarray:
        return self.as_integrand().values_at(np.array([float(t)]))[0]

    def as_integrand(self) -> VectorIntegrand:
        return support_point_selection(self.F, self.direction)


def support_point_selection_fn(F: Integrand, u) -> SelectionFunction:
    return SelectionFunction(F, np.asarray(u, dtype=float))


def stacked_selections(F: Integrand, U: np.ndarray) -> VectorIntegrand:
    """All support-point selections for the rows of `U`, concatenated."""
    U = np.asarray(U, dtype=float)

    def fn(ts):
        return F.support_points_at(ts, U).reshape(len(ts), -1)

    return VectorIntegrand(fn, F.dim * len(U), {"name": "stacked_selections", "of": F.descriptor})


def _body(r: IntegrationReport) -> ConvexBody:
    return r.body


# ---------------------------------------------------------------------------
# checks


def check_aumann_inclusion(F: Integrand, directions=None, eps: float = 1e-5,
                           path: Path | str | None = None) -> TheoremReport:
    """Integrals of support-point selections lie in ``U(J, 3ε)``.

    Also reports how far the hull of the selection integrals is from ``J``;
    with the full direction grid that gap is bounded by the grid error.
    """
    rep = TheoremReport("thm_aumann_inclusion", F.descriptor)
    grid = make_grid(F.dim)
    U = grid.directions if directions is None else np.atleast_2d(np.asarray(directions, float))
    J = integrate_norm(F, eps, path=path)
    sel = integrate_norm(stacked_selections(F, U), eps)
    why = _not_certified(J, sel)
    if why:
        return _skip(rep, why)
    JB = _body(J)
    pts = np.asarray(sel.result).reshape(len(U), F.dim)
    rep.residuals["selection_distance"] = max(point_distance(JB, p) for p in pts)
    rep.tolerances["selection_distance"] = 3 * eps
    rep.info["rule"] = "||J_f - J||: each selection integral within 3*eps of J (Euclidean, hence in U(J, 3*eps))"
    if directions is None:
        hull = ConvexBody(pts)
        rep.residuals["hull_gap"] = hausdorff(hull, JB)
        rep.tolerances["hull_gap"] = 3 * eps + grid.reconstruction_bound(JB.diameter())
    return rep.finish()


def check_decomposition_nonneg(F: Integrand, eps: float = 1e-5, u0=None,
                               path: Path | str | None = None) -> TheoremReport:
    """``F = f + G`` with ``f`` a selection and ``G`` a non-negative multifunction containing 0."""
    rep = TheoremReport("thm_decomposition_nonneg", F.descriptor)
    grid = make_grid(F.dim)
    u0 = grid.directions[0] if u0 is None else np.asarray(u0, dtype=float)
    f = support_point_selection(F, u0)
    G = translated(F, f)
    ts = np.linspace(0.0, 1.0, SAMPLES)
    S = G.supports_at(ts, grid.directions)
    rep.residuals["nonneg_violation"] = float(max(0.0, -S.min()))
    rep.tolerances["nonneg_violation"] = 1e-10
    zero = np.zeros(F.dim)
    rep.residuals["zero_membership"] = max(point_distance(ConvexBody(V), zero)
                                           for V in G.vertices_at(ts))
    rep.tolerances["zero_membership"] = 1e-10
    JF = integrate_norm(F, eps, path=path)
    Jf = integrate_norm(f, eps)
    JG = integrate_norm(G, eps, path=path)
    why = _not_certified(JF, Jf, JG)
    if why:
        return _skip(rep, why)
    rep.residuals["sum_gap"] = hausdorff(_body(JF), _body(JG).translate(Jf.result))
    rep.tolerances["sum_gap"] = 3 * eps
    rep.info["u0"] = np.asarray(u0).tolist()
    rep.info["rule"] = "d_H(J_F, J_f + J_G) <= 3*eps"
    return rep.finish()


def check_deco2(F: Integrand, s: OSequence, n: int, path: Path | str | None = None) -> TheoremReport:
    """``G = F - sup F`` has support ``≥ 0`` everywhere and ``≤ 0`` on positive directions.

    Requires ``sup F(t) ∈ F(t)``; fixtures violating it are SKIPPED.
    """
    rep = TheoremReport("thm_deco2", F.descriptor)
    g = order_sup_selection(F)
    ts = np.linspace(0.0, 1.0, SAMPLES)
    gv = g.values_at(ts)
    gap = max(point_distance(ConvexBody(V), x) for V, x in zip(F.vertices_at(ts), gv))
    rep.info["sup_membership_gap"] = gap
    if gap > 1e-10:
        return _skip(rep, f"hypothesis sup F(t) in F(t) fails (distance {gap:.3g})")
    G = translated(F, g)
    grid = make_grid(F.dim)
    U = grid.directions
    S = G.supports_at(ts, U)
    positive = np.all(U >= -1e-15, axis=1)
    rep.residuals["support_negativity"] = float(max(0.0, -S.min()))
    rep.tolerances["support_negativity"] = 1e-10
    rep.residuals["positive_support"] = float(max(0.0, S[:, positive].max()))
    rep.tolerances["positive_support"] = 1e-10
    JF = integrate_order(F, s, n, path=path)
    Jg = integrate_order(g, s, n)
    JG = integrate_order(G, s, n, path=path)
    why = _not_certified(JF, Jg, JG)
    if why:
        return _skip(rep, why)
    b = s.broadcast(F.dim).at(n)
    target = _body(JF).translate(-np.asarray(Jg.result))
    rep.residuals["order_gap"] = hausdorff(_body(JG), target)
    rep.tolerances["order_gap"] = 2 * float(np.min(b))
    rep.info["rule"] = "J_G within U(J_F - J_g, 2 b_n); Euclidean d_H <= 2 min(b_n) implies it"
    return rep.finish()


def check_quasiselezione(F: Integrand, s: OSequence, n: int,
                         path: Path | str | None = None) -> TheoremReport:
    """The componentwise supremum selection integrates to the supremum of the integral."""
    rep = TheoremReport("thm_quasiselezione", F.descriptor)
    g = order_sup_selection(F)
    JF = integrate_order(F, s, n, path=path)
    Jg = integrate_order(g, s, n)
    why = _not_certified(JF, Jg)
    if why:
        return _skip(rep, why)
    diff = np.abs(np.asarray(Jg.result) - convex.order_sup(_body(JF)))
    b = s.broadcast(F.dim).at(n)
    rep.residuals["sup_gap"] = float(diff.max())
    rep.tolerances["sup_gap"] = 2 * float(np.min(b))
    rep.info["componentwise_ok"] = bool(np.all(diff <= 2 * b))
    rep.info["rule"] = "|J_g - sup J_F| <= 2 b_n componentwise"
    return rep.finish()


def check_sigma_additivity(F: Integrand, eps: float = 1e-5, N: int = 10,
                           path: Path | str | None = None) -> TheoremReport:
    """Dyadic pieces ``[2^-(n+1), 2^-n]`` add up to the integral over ``[2^-N, 1]``."""
    rep = TheoremReport("thm_sigma_additivity", F.descriptor)
    pieces = []
    for k in range(N):
        r = integrate_norm(F, eps, path=path, domain=MeasurableSet([(2.0 ** -(k + 1), 2.0 ** -k)]))
        if not r.converged:
            return _skip(rep, _not_certified(r))
        pieces.append(_body(r))
    whole = integrate_norm(F, eps, path=path, domain=MeasurableSet([(2.0 ** -N, 1.0)]))
    if not whole.converged:
        return _skip(rep, _not_certified(whole))
    ones = np.ones(N)
    partial = minkowski_combination(ones, pieces, canonical=True)
    rep.residuals["partial_sum_gap"] = hausdorff(partial, _body(whole))
    rep.tolerances["partial_sum_gap"] = (N + 2) * eps
    m = min(6, N)
    perm = list(range(m))[::-1] + list(range(m, N))
    shuffled = minkowski_combination(ones, [pieces[i] for i in perm], canonical=True)
    same_shape = shuffled.vertices.shape == partial.vertices.shape
    rep.residuals["permutation_gap"] = (
        float(np.max(np.abs(shuffled.vertices - partial.vertices))) if same_shape else math.inf)
    rep.tolerances["permutation_gap"] = 0.0
    ts = np.linspace(0.0, 2.0 ** -N, SAMPLES)
    radius = float(np.max(np.abs(_vertices(F, ts))))
    rep.info["tail_bound"] = 2.0 ** -N * radius * math.sqrt(F.dim)
    rep.info["rule"] = "d_H(sum of N pieces, J_[2^-N,1]) <= (N+2)*eps; tail J_[0,2^-N] reported separately"
    return rep.finish()


def _vertices(F: Integrand, ts: np.ndarray) -> np.ndarray:
    if F.kind is Kind.SINGLE:
        return F.values_at(ts)
    return F.vertices_at(ts)


def uniform_integrability_probe(F: Integrand, directions=None, levels: int = 10,
                                eps: float = 1e-6) -> TheoremReport:
    """``max_u ∫_{[0, 2^-k]} |h(F(t), u)| dt`` decreases to zero."""
    rep = TheoremReport("thm_uniform_integrability", F.descriptor)
    U = make_grid(F.dim).directions if directions is None else np.atleast_2d(directions)
    mags = support_magnitudes(F, U)
    values = []
    for k in range(levels + 1):
        r = integrate_norm(mags, eps, domain=MeasurableSet([(0.0, 2.0 ** -k)]))
        if not r.converged:
            return _skip(rep, _not_certified(r))
        values.append(float(np.max(r.result)))
    sup_mag = float(np.max(mags.values_at(np.linspace(0.0, 1.0, 257))))
    increases = [values[k + 1] - values[k] for k in range(levels)]
    rep.residuals["monotonicity_violation"] = max(0.0, max(increases, default=0.0))
    rep.tolerances["monotonicity_violation"] = 2 * eps
    rep.residuals["deepest_value"] = values[-1]
    rep.tolerances["deepest_value"] = 2.0 ** -levels * sup_mag + eps
    rep.info["values"] = values
    return rep.finish()


def check_path_equivalence(F: Integrand, eps: float = 1e-5,
                           mode: TagMode | str = TagMode.PERRON) -> TheoremReport:
    """Geometric and embedded integrals agree up to the grid error."""
    rep = TheoremReport("thm_path_equivalence", F.descriptor)
    grid = make_grid(F.dim)
    geo = integrate_norm(F, eps, mode, Path.GEOMETRIC)
    emb = integrate_norm(F, eps, mode, Path.EMBEDDED, grid=grid)
    why = _not_certified(geo, emb)
    if why:
        return _skip(rep, why)
    body = reconstruct(emb.result)
    diam = geo.result.diameter()
    rep.residuals["path_gap"] = hausdorff(geo.result, body)
    rep.tolerances["path_gap"] = eps + min(1e-2 * diam, grid.reconstruction_bound(diam)) + 1e-12
    rep.residuals["embedded_gap"] = sup_distance(embed(geo.result, grid), emb.result)
    rep.tolerances["embedded_gap"] = 2 * eps
    return rep.finish()


def check_additivity(F: Integrand, eps: float = 1e-5, A=((0.0, 0.3),), B=((0.55, 1.0),),
                     path: Path | str | None = None) -> TheoremReport:
    """``J_{A∪B} = J_A + J_B`` for disjoint interval unions."""
    rep = TheoremReport("thm_additivity", F.descriptor)
    EA, EB = MeasurableSet(A), MeasurableSet(B)
    if EA.overlap_measure(EB) > 0:
        raise ValueError("additivity check needs disjoint sets")
    EU = MeasurableSet(list(EA.intervals) + list(EB.intervals))
    rA = integrate_norm(F, eps, path=path, domain=EA)
    rB = integrate_norm(F, eps, path=path, domain=EB)
    rU = integrate_norm(F, eps, path=path, domain=EU)
    why = _not_certified(rA, rB, rU)
    if why:
        return _skip(rep, why)
    rep.residuals["additivity_gap"] = hausdorff(_body(rU), _body(rA) + _body(rB))
    rep.tolerances["additivity_gap"] = 3 * eps
    return rep.finish()


def check_monotone_bracket(F: Integrand, n: int = 100) -> TheoremReport:
    """Step brackets of an increasing multifunction are ``2K/n`` apart in order."""
    rep = TheoremReport("thm_monotone_bracket", F.descriptor)
    br = integrate_monotone_bracket(F, n)
    rep.residuals["bracket_violation"] = 0.0 if br.holds else 1.0
    rep.tolerances["bracket_violation"] = 0.0
    truth = integrate_norm(F, min(1e-6, br.bound / 100), path=Path.EMBEDDED)
    if truth.converged:
        rep.residuals["lower_gap"] = hausdorff(br.lower, truth.body)
        rep.tolerances["lower_gap"] = br.bound
    rep.info.update({"n": n, "K": br.K, "bound": br.bound, "bound_formula": "2*K/n"})
    return rep.finish()


def check_uniqueness(F: Integrand, eps: float = 1e-5, path: Path | str | None = None) -> TheoremReport:
    """Two tag policies (Henstock and McShane families) give the same integral."""
    rep = TheoremReport("thm_uniqueness", F.descriptor)
    r1 = integrate_norm(F, eps, TagMode.PERRON, path)
    r2 = integrate_norm(F, eps, TagMode.FREE, path)
    why = _not_certified(r1, r2)
    if why:
        return _skip(rep, why)
    rep.residuals["run_gap"] = hausdorff(_body(r1), _body(r2))
    rep.tolerances["run_gap"] = 2 * eps
    return rep.finish()


def check_stopping_coincidence(F: Integrand, levels: int = 24,
                               s: OSequence = OSequence((1.0,), 0.5),
                               indices=range(0, 24)) -> TheoremReport:
    """On the embedded path, order stops with ``b_n = ε_n 𝟙`` and sup-norm stops with ``ε_n`` agree."""
    rep = TheoremReport("thm_stopping_coincidence", F.descriptor)
    grid = make_grid(F.dim)
    mismatches = 0
    decisions = 0
    accepted = 0
    prev = None
    for lv in level_sums(F, None, TagMode.PERRON, Path.EMBEDDED, grid, levels - 1):
        pairs = [(lv.current, T) for T in lv.perturbed] + ([(lv.current, prev)] if prev is not None else [])
        for n in indices:
            b = order_radius(s, n, F, Path.EMBEDDED, grid)
            eps_n = float(s.at(n)[0])
            for S, T in pairs:
                o = order_accepts(S, T, b)
                m = norm_accepts(S, T, eps_n)
                mismatches += o != m
                decisions += 1
                accepted += o
        prev = lv.current
    rep.residuals["decision_mismatches"] = float(mismatches)
    rep.tolerances["decision_mismatches"] = 0.0
    rep.info.update({"decisions": decisions, "accepted": accepted, "levels": levels})
    return rep.finish()


def check_phi_outer(F: Integrand, n: int = 8, trials: int = 4, eps: float = 1e-5) -> TheoremReport:
    rep = TheoremReport("thm_phi_outer", F.descriptor)
    J = integrate_norm(F, eps, path=Path.EMBEDDED)
    if not J.converged:
        return _skip(rep, _not_certified(J))
    outer = phi_outer(F, MeasurableSet.unit(), n, trials)
    JB = J.body
    rep.residuals["inclusion_excess"] = max(point_distance(outer, v) for v in JB.vertices)
    rep.tolerances["inclusion_excess"] = 2.0 / n
    return rep.finish()


def random_polygon(rng: np.random.Generator, k: int = 8) -> ConvexBody:
    return ConvexBody(rng.uniform(-1.0, 1.0, size=(k, 2)) + rng.uniform(-2.0, 2.0, size=2))


def check_embedding_isometry(seed: int = 0, pairs: int = 500) -> TheoremReport:
    """One-dimensional embedding is an isometry: sup distance equals Hausdorff distance."""
    rep = TheoremReport("thm_embedding_isometry", {"fixture": "random_intervals", "seed": seed,
                                                   "pairs": pairs})
    rng = np.random.default_rng(seed)
    grid = make_grid(1)
    ends = np.sort(rng.uniform(-10.0, 10.0, size=(pairs, 2, 2)), axis=2)
    worst = 0.0
    for (a, b), (c, d) in ends:
        A, B = convex.interval(a, b), convex.interval(c, d)
        worst = max(worst, abs(sup_distance(embed(A, grid), embed(B, grid)) - hausdorff(A, B)))
    rep.residuals["isometry_defect"] = worst
    rep.tolerances["isometry_defect"] = 1e-12
    return rep.finish()


def check_max_identity(seed: int = 0, pairs: int = 200, m: int = 64) -> TheoremReport:
    """The embedding of a hull-union is the componentwise maximum of the embeddings."""
    rep = TheoremReport("thm_max_identity", {"fixture": "random_polygons", "seed": seed,
                                             "pairs": pairs, "m": m})
    rng = np.random.default_rng(seed)
    grid = make_grid(2, m)
    worst = 0.0
    for _ in range(pairs):
        A, B = random_polygon(rng), random_polygon(rng)
        lhs = embed(convex.hull_union(A, B), grid)
        rhs = embed(A, grid).max(embed(B, grid))
        worst = max(worst, sup_distance(lhs, rhs))
    rep.residuals["max_defect"] = worst
    rep.tolerances["max_defect"] = 1e-12
    return rep.finish()


# ---------------------------------------------------------------------------
# fixtures and manifests


TRIANGLE = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]

FIXTURES: dict[str, dict] = {
    "linear_box2": {"name": "linear_body", "body": {"kind": "box", "lo": [-1, -1], "hi": [1, 1]}},
    "linear_triangle2": {"name": "linear_body", "body": {"vertices": TRIANGLE}},
    "interval_0t_1": {"name": "interval_0t", "dim": 1},
    "interval_0t_2": {"name": "interval_0t", "dim": 2},
    "sym_interval_1": {"name": "sym_interval", "dim": 1},
    "sym_interval_2": {"name": "sym_interval", "dim": 2},
    "translate_box_1": {"name": "translate_box", "dim": 1},
    "translate_box_2": {"name": "translate_box", "dim": 2},
    "constant_square": {"name": "constant", "body": {"kind": "box", "lo": [0, 0], "hi": [1, 1]}},
    "simple_2": {"name": "simple", "steps": [
        {"set": [[0.0, 0.5]], "body": {"kind": "box", "lo": [0, 0], "hi": [1, 1]}},
        {"set": [[0.5, 1.0]], "body": {"vertices": TRIANGLE}}]},
    "linear_cube3": {"name": "linear_body",
                     "body": {"kind": "box", "lo": [-1, -1, -1], "hi": [1, 1, 1]}},
}

MULTI_FIXTURES_2D = [k for k in FIXTURES if k != "linear_cube3"]
INCREASING_FIXTURES = ["interval_0t_1", "interval_0t_2", "sym_interval_1", "sym_interval_2",
                       "linear_box2"]


def fixture(name_or_spec) -> Integrand | None:
    if name_or_spec is None:
        return None
    if isinstance(name_or_spec, str):
        if name_or_spec not in FIXTURES:
            raise KeyError(f"unknown fixture {name_or_spec!r}")
        spec = dict(FIXTURES[name_or_spec])
        F = integrand_from_config(spec)
        F.descriptor = {"fixture": name_or_spec, **F.descriptor}
        return F
    return integrand_from_config(name_or_spec)


def _oseq(params: dict) -> OSequence:
    spec = params.get("osequence", {"base": [1.0], "ratio": 0.5})
    return OSequence(tuple(spec["base"]), float(spec.get("ratio", 0.5)))


CHECKS: dict[str, Callable[[Integrand, dict], TheoremReport]] = {
    "thm_aumann_inclusion": lambda F, p: check_aumann_inclusion(F, p.get("directions"), p.get("eps", 1e-5)),
    "thm_decomposition_nonneg": lambda F, p: check_decomposition_nonneg(F, p.get("eps", 1e-5), p.get("u0")),
    "thm_deco2": lambda F, p: check_deco2(F, _oseq(p), int(p.get("n", 16))),
    "thm_quasiselezione": lambda F, p: check_quasiselezione(F, _oseq(p), int(p.get("n", 16))),
    "thm_sigma_additivity": lambda F, p: check_sigma_additivity(F, p.get("eps", 1e-5), int(p.get("N", 10))),
    "thm_uniform_integrability": lambda F, p: uniform_integrability_probe(
        F, p.get("directions"), int(p.get("levels", 10)), p.get("eps", 1e-6)),
    "thm_path_equivalence": lambda F, p: check_path_equivalence(F, p.get("eps", 1e-5)),
    "thm_additivity": lambda F, p: check_additivity(
        F, p.get("eps", 1e-5), p.get("A", [[0.0, 0.3]]), p.get("B", [[0.55, 1.0]])),
    "thm_monotone_bracket": lambda F, p: check_monotone_bracket(F, int(p.get("n", 100))),
    "thm_uniqueness": lambda F, p: check_uniqueness(F, p.get("eps", 1e-5)),
    "thm_stopping_coincidence": lambda F, p: check_stopping_coincidence(F, int(p.get("levels", 24))),
    "thm_phi_outer": lambda F, p: check_phi_outer(F, int(p.get("n", 8)), int(p.get("trials", 4))),
    "thm_embedding_isometry": lambda F, p: check_embedding_isometry(int(p.get("seed", 0)),
                                                                    int(p.get("pairs", 500))),
    "thm_max_identity": lambda F, p: check_max_identity(int(p.get("seed", 0)), int(p.get("pairs", 200)),
                                                        int(p.get("m", 64))),
}

RANDOMIZED = frozenset({"thm_embedding_isometry", "thm_max_identity"})


class UnknownTheoremError(KeyError):
    pass


def default_manifest() -> list[dict]:
    """Every check on every applicable builtin fixture, at desk-scale tolerances."""
    m: list[dict] = [{"theorem_id": "thm_embedding_isometry", "fixture": None, "params": {}},
                     {"theorem_id": "thm_max_identity", "fixture": None, "params": {}}]

    def add(tid, fixtures, params=None):
        for f in fixtures:
            m.append({"theorem_id": tid, "fixture": f, "params": params or {}})

    all_multi = MULTI_FIXTURES_2D + ["linear_cube3"]
    add("thm_path_equivalence", MULTI_FIXTURES_2D)
    add("thm_additivity", all_multi)
    add("thm_aumann_inclusion", all_multi)
    add("thm_decomposition_nonneg", MULTI_FIXTURES_2D)
    add("thm_decomposition_nonneg", ["linear_cube3"], {"eps": 1e-4})
    add("thm_deco2", ["translate_box_1", "interval_0t_2", "sym_interval_2", "linear_triangle2"])
    add("thm_quasiselezione", ["interval_0t_1", "sym_interval_2", "linear_box2"], {"n": 20})
    add("thm_sigma_additivity", ["linear_box2", "constant_square"])
    add("thm_uniform_integrability", ["linear_box2", "constant_square"], {"eps": 1e-5})
    add("thm_monotone_bracket", INCREASING_FIXTURES)
    add("thm_uniqueness", ["linear_box2", "interval_0t_1", "translate_box_2"])
    add("thm_stopping_coincidence", ["interval_0t_1", "linear_box2"], {"levels": 20})
    add("thm_phi_outer", ["linear_box2", "constant_square"])
    return m


def validate_manifest(manifest) -> list[dict]:
    """Check shape, theorem ids and fixture names before anything runs."""
    if not isinstance(manifest, list):
        raise ValueError("manifest must be a JSON list of entries")
    for entry in manifest:
        if not isinstance(entry, dict):
            raise ValueError("manifest entries must be objects")
        if entry.get("theorem_id") not in CHECKS:
            raise UnknownTheoremError(entry.get("theorem_id"))
        if not isinstance(entry.get("params", {}), dict):
            raise ValueError("'params' must be an object")
        fx = entry.get("fixture")
        if fx is None and entry["theorem_id"] not in RANDOMIZED:
            raise ValueError(f"{entry['theorem_id']} needs a fixture")
        if isinstance(fx, str) and fx not in FIXTURES:
            raise ValueError(f"unknown fixture {fx!r}")
    return manifest


def run_entry(entry: dict, seed: int | None = None) -> TheoremReport:
    tid = entry.get("theorem_id")
    if tid not in CHECKS:
        raise UnknownTheoremError(tid)
    params = dict(entry.get("params", {}))
    if seed is not None and tid in RANDOMIZED:
        params.setdefault("seed", seed)
    return CHECKS[tid](fixture(entry.get("fixture")), params)


def run_manifest(manifest: list[dict], seed: int | None = None) -> list[TheoremReport]:
    validate_manifest(manifest)
    return [run_entry(e, seed) for e in manifest]


def reports_json(reports: list[TheoremReport]) -> str:
    return json.dumps([r.to_json() for r in reports], indent=2, sort_keys=True)


def reports_csv(reports: list[TheoremReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["theorem_id", "fixture", "verdict", "max_residual"])
    for r in reports:
        name = r.fixture.get("fixture") or r.fixture.get("name")
        if isinstance(name, dict):
            name = json.dumps(name, sort_keys=True)
        w.writerow([r.theorem_id, name, r.verdict, repr(r.max_residual)])
    return buf.getvalue()
