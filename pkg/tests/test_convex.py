import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gauge_integral import convex
from gauge_integral.convex import (ConvexBody, VertexOverflowError, body_from_json, box, contains,
                                   hausdorff, hull_union, interval, member, min_norm_point,
                                   minkowski_combination, minkowski_sum, order_neighborhood,
                                   order_sup, point, point_distance, scale)
from gauge_integral.lattice import DimensionError
from gauge_integral.radstrom import make_grid

SQUARE = box([0, 0], [1, 1])
TRIANGLE = ConvexBody([[0, 0], [1, 0], [0, 1]])
U64 = make_grid(2, 64).directions
FINE = make_grid(2, 4096).directions

points2 = st.lists(st.tuples(st.floats(-5, 5), st.floats(-5, 5)), min_size=1, max_size=12)


def polygon(pts) -> ConvexBody:
    return ConvexBody(np.array(pts, dtype=float))


def test_normalization_removes_interior_and_collinear_points():
    C = ConvexBody([[0, 0], [2, 0], [2, 2], [0, 2], [1, 1], [1, 0], [0.5, 0.5]])
    assert len(C) == 4
    assert sorted(map(tuple, C.vertices.tolist())) == [(0, 0), (0, 2), (2, 0), (2, 2)]


def test_normalization_degenerate_cases():
    assert len(ConvexBody([[1, 1], [1, 1]])) == 1
    assert len(ConvexBody([[0, 0], [1, 1], [2, 2]])) == 2
    assert ConvexBody([3.0, 1.0, 2.0]).vertices.ravel().tolist() == [1.0, 3.0]
    with pytest.raises(ValueError):
        ConvexBody([[0, math.inf]])
    with pytest.raises(ValueError):
        ConvexBody(np.empty((0, 2)))


def test_support_examples():
    C = interval(0, 1)
    assert C.support([1]) == 1 and C.support([-1]) == 0
    assert math.isclose(SQUARE.support([1 / math.sqrt(2)] * 2), math.sqrt(2))
    p = point([2, -3])
    assert p.support([0.6, 0.8]) == pytest.approx(1.2 - 2.4)


def test_minkowski_examples():
    S = minkowski_sum(interval(0, 1), interval(2, 3))
    assert S.vertices.ravel().tolist() == [2, 4]
    assert np.array_equal(minkowski_sum(SQUARE, point([0, 0])).vertices, SQUARE.vertices)
    twice = SQUARE + SQUARE
    assert np.allclose(twice.supports(U64), 2 * SQUARE.supports(U64), atol=1e-12)
    assert hausdorff(twice, box([0, 0], [2, 2])) == 0


def test_scale_examples():
    assert scale(0.5, interval(0, 2)).vertices.ravel().tolist() == [0, 1]
    zero = scale(0, SQUARE)
    assert len(zero) == 1 and zero.vertices.tolist() == [[0, 0]]
    assert scale(-1, interval(0, 1)).vertices.ravel().tolist() == [-1, 0]
    assert (2 * SQUARE).diameter() == pytest.approx(2 * math.sqrt(2))


def test_hull_union_examples():
    assert hull_union(interval(0, 1), interval(2, 3)).vertices.ravel().tolist() == [0, 3]
    assert np.array_equal(hull_union(SQUARE, SQUARE).vertices, SQUARE.vertices)
    seg = hull_union(point([0, 0]), point([1, 1]))
    assert len(seg) == 2
    assert np.allclose(seg.supports(U64), np.maximum(0, U64 @ [1, 1]), atol=1e-15)


def test_hausdorff_examples():
    assert hausdorff(interval(0, 1), interval(0, 2)) == 1
    assert hausdorff(TRIANGLE, TRIANGLE) == 0
    assert abs(hausdorff(point([0, 0]), SQUARE, 1e-10) - math.sqrt(2)) <= 1e-10


def test_order_sup_examples():
    assert order_sup(interval(0, 1)).tolist() == [1]
    assert order_sup(box([-1, 0], [1, 2])).tolist() == [1, 2]
    assert order_sup(TRIANGLE).tolist() == [1, 1]
    assert not member(TRIANGLE, [1, 1])


def test_order_neighborhood_examples():
    assert order_neighborhood(interval(0, 1), [0.5]).vertices.ravel().tolist() == [-0.5, 1.5]
    assert order_neighborhood(TRIANGLE, [0, 0]) is TRIANGLE
    U = order_neighborhood(point([0, 0]), [1, 2])
    assert hausdorff(U, box([-1, -2], [1, 2])) == 0
    with pytest.raises(ValueError):
        order_neighborhood(SQUARE, [-1, 0])


def test_contains_examples():
    assert contains(interval(-1, 2), interval(0, 1))
    assert not contains(interval(0, 1), interval(0, 2))
    assert contains(order_neighborhood(TRIANGLE, [0.1, 0.1]), TRIANGLE)
    assert not contains(TRIANGLE, SQUARE)
    assert contains(TRIANGLE, SQUARE, tol=math.sqrt(0.5) + 1e-9)


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        hausdorff(interval(0, 1), SQUARE)
    with pytest.raises(DimensionError):
        SQUARE + interval(0, 1)


def test_body_literals():
    assert body_from_json({"kind": "interval", "lo": 0, "hi": 2}).vertices.ravel().tolist() == [0, 2]
    assert len(body_from_json({"kind": "ball_poly", "n": 12})) == 12
    assert body_from_json({"vertices": [[0, 0], [1, 0], [0, 1]]}, 2).dim == 2
    with pytest.raises(ValueError):
        body_from_json({"kind": "sphere"})
    with pytest.raises(ValueError):
        body_from_json({"vertices": []})
    with pytest.raises(DimensionError):
        body_from_json({"kind": "interval", "lo": 0, "hi": 1}, 2)


def test_unit_balls():
    assert hausdorff(convex.unit_ball("SUP", 2), box([-1, -1], [1, 1])) == 0
    l1 = convex.unit_ball("L1", 3)
    assert len(l1) == 6
    l2 = convex.unit_ball("L2", 2, n=64)
    assert np.all(l2.supports(U64) <= 1 + 1e-15)


def test_min_norm_point_known_answers():
    x, lower = min_norm_point(np.array([[1.0, -1.0], [1.0, 1.0]]))
    assert np.allclose(x, [1, 0]) and lower <= 1 + 1e-12
    x, _ = min_norm_point(np.array([[-1.0, -1.0], [1.0, -1.0], [0.0, 1.0]]))
    assert np.linalg.norm(x) <= 1e-12


def test_3d_bodies():
    cube = box([0, 0, 0], [1, 1, 1])
    assert len(cube) == 8
    flat = ConvexBody([[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0], [0.5, 0.5, 0]])
    assert len(flat) == 4
    S = cube + flat
    assert hausdorff(S, box([0, 0, 0], [2, 2, 1])) <= 1e-12
    assert point_distance(cube, [2, 0.5, 0.5]) == pytest.approx(1.0)


def test_vertex_cap():
    bodies = [convex.ball_poly(40, 3, r) for r in (1.0, 0.9, 0.8)]
    with pytest.raises(VertexOverflowError):
        minkowski_combination([1, 1, 1], bodies, cap=500)


def test_canonical_combination_is_order_free():
    rng = np.random.default_rng(1)
    bodies = [ConvexBody(rng.normal(size=(7, 2))) for _ in range(9)]
    w = rng.uniform(0, 1, 9)
    perm = rng.permutation(9)
    a = minkowski_combination(w, bodies, canonical=True)
    b = minkowski_combination(w[perm], [bodies[i] for i in perm], canonical=True)
    assert np.array_equal(a.vertices, b.vertices)


@given(points2, points2)
def test_minkowski_support_additivity(p, q):
    A, B = polygon(p), polygon(q)
    S = A + B
    assert np.allclose(S.supports(U64), A.supports(U64) + B.supports(U64), atol=1e-9)


@given(points2, st.lists(st.floats(0, 3), min_size=1, max_size=4))
def test_combination_matches_supports(p, w):
    rng = np.random.default_rng(len(p))
    bodies = [polygon(p)] + [ConvexBody(rng.normal(size=(5, 2))) for _ in w[1:]]
    S = minkowski_combination(w[: len(bodies)], bodies)
    want = sum(wi * C.supports(U64) for wi, C in zip(w, bodies))
    assert np.allclose(S.supports(U64), want, atol=1e-9)


@given(points2, points2)
def test_hausdorff_equals_support_sup_distance(p, q):
    A, B = polygon(p), polygon(q)
    d = hausdorff(A, B)
    lower = float(np.max(np.abs(A.supports(FINE) - B.supports(FINE))))
    # h_A - h_B is Lipschitz in the angle with constant R_A + R_B
    lip = np.abs(A.vertices).max() * 2 + np.abs(B.vertices).max() * 2
    assert lower - 1e-9 <= d <= lower + lip * math.pi / 4096 + 1e-9


@given(points2, st.tuples(st.floats(-8, 8), st.floats(-8, 8)))
def test_point_distance_against_support_dual(p, x):
    A = polygon(p)
    x = np.array(x)
    d = point_distance(A, x)
    dual = max(0.0, float(np.max(FINE @ x - A.supports(FINE))))
    lip = np.linalg.norm(x) + 2 * np.abs(A.vertices).max()
    assert dual - 1e-9 <= d <= dual + lip * math.pi / 4096 + 1e-9
    assert member(A, convex.project(A, x), tol=1e-8)


@given(points2, points2)
def test_contains_matches_hausdorff_direction(p, q):
    A, B = polygon(p), polygon(q)
    assert contains(A + B, A.translate(B.vertices[0]), tol=1e-12)
    excess = max(point_distance(A, v) for v in B.vertices)
    if excess > 1e-6:
        assert not contains(A, B, tol=1e-9)
    assert contains(A, B, tol=excess + 1e-9)
