import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gauge_integral.convex import ConvexBody, box, hausdorff, hull_union, interval, point
from gauge_integral.lattice import DimensionError
from gauge_integral.radstrom import (GridMismatchError, InconsistentSupportError, SupportVector,
                                     embed, make_grid, reconstruct, sup_distance, to_csv)

G1 = make_grid(1)
G64 = make_grid(2, 64)
SQUARE = box([0, 0], [1, 1])
poly = st.lists(st.tuples(st.floats(-3, 3), st.floats(-3, 3)), min_size=1, max_size=10).map(
    lambda p: ConvexBody(np.array(p)))


def test_grids():
    assert G1.directions.tolist() == [[1.0], [-1.0]]
    for u in ([1, 0], [0, 1], [-1, 0], [0, -1]):
        assert any(np.array_equal(row, u) for row in G64.directions)
    assert np.allclose(np.linalg.norm(G64.directions, axis=1), 1)
    g3 = make_grid(3)
    assert g3.m == 242
    assert np.allclose(g3.directions[g3.antipode], -g3.directions)
    for e in np.vstack([np.eye(3), -np.eye(3)]):
        assert any(np.array_equal(row, e) for row in g3.directions)
    with pytest.raises(ValueError):
        make_grid(2, 30)
    with pytest.raises(DimensionError):
        make_grid(4)


def test_embed_examples():
    assert embed(interval(0, 1), G1).values.tolist() == [1, 0]
    assert not np.any(embed(point([0, 0]), G64).values)
    with pytest.raises(DimensionError):
        embed(SQUARE, G1)


def test_reconstruct_examples():
    C = reconstruct(SupportVector([1.0, 0.0], G1))
    assert C.vertices.ravel().tolist() == [0, 1]
    Z = reconstruct(SupportVector(np.zeros(64), G64))
    assert len(Z) == 1 and not np.any(Z.vertices)
    assert hausdorff(reconstruct(embed(SQUARE, G64)), SQUARE) <= math.sqrt(2) * (1 - math.cos(math.pi / 64))


def test_reconstruct_rejects_inconsistent():
    with pytest.raises(InconsistentSupportError):
        reconstruct(SupportVector([0.0, -1.0], G1))
    bad = embed(SQUARE, G64).values.copy()
    bad[0] = -5.0
    with pytest.raises(InconsistentSupportError):
        reconstruct(SupportVector(bad, G64))


def test_sup_distance_examples():
    assert sup_distance(embed(interval(0, 1), G1), embed(interval(0, 2), G1)) == 1
    s = embed(SQUARE, G64)
    assert sup_distance(s, s) == 0
    moved = embed(SQUARE.translate([1, 0]), G64)
    assert abs(sup_distance(s, moved) - 1.0) <= 1e-12


def test_grid_mismatch():
    s = embed(SQUARE, G64)
    t = embed(SQUARE, make_grid(2, 32))
    with pytest.raises(GridMismatchError):
        s + t
    with pytest.raises(GridMismatchError):
        SupportVector(np.zeros(3), G64)


def test_csv():
    text = to_csv([embed(interval(0, 1), G1), embed(interval(0, 2), G1)], G1)
    assert text.splitlines() == ["u_1.000000,u_-1.000000", "1.0,0.0", "2.0,0.0"]
    assert to_csv([], G64).count("\n") == 1


def test_3d_round_trip():
    g = make_grid(3)
    cube = box([-1, -1, -1], [1, 1, 1])
    assert hausdorff(reconstruct(embed(cube, g)), cube) <= 1e-9
    seg = ConvexBody([[0, 0, 0], [1, 0, 0]])
    R = reconstruct(embed(seg, g))
    assert hausdorff(R, seg) <= 1e-6


@given(poly, poly)
def test_embedding_is_additive_and_positively_homogeneous(A, B):
    assert np.allclose(embed(A + B, G64).values, (embed(A, G64) + embed(B, G64)).values, atol=1e-9)
    assert np.allclose(embed(2.5 * A, G64).values, (2.5 * embed(A, G64)).values, atol=1e-12)


@given(poly, poly)
def test_max_identity(A, B):
    lhs = embed(hull_union(A, B), G64).values
    rhs = embed(A, G64).max(embed(B, G64)).values
    assert np.max(np.abs(lhs - rhs)) <= 1e-12


@given(poly, poly)
def test_two_sided_hausdorff_comparison(A, B):
    g = make_grid(2, 256)
    s = sup_distance(embed(A, g), embed(B, g))
    d = hausdorff(A, B)
    diam = max(A.diameter(), B.diameter(), 1e-300)
    assert s <= d + 1e-9
    lip = 2 * (np.abs(A.vertices).max() + np.abs(B.vertices).max())
    assert d <= s + lip * math.pi / 256 + 1e-9
    assert d <= s + 1e-2 * diam + 1e-9


@given(poly)
def test_reconstruction_contains_body_within_bound(C):
    R = reconstruct(embed(C, G64))
    # circumscribed: every vertex of C lies in R
    from gauge_integral.convex import contains
    assert contains(R, C, tol=1e-9)
    assert hausdorff(R, C) <= G64.reconstruction_bound(C.diameter()) + 1e-9
    assert np.max(np.abs(embed(R, G64).values - embed(C, G64).values)) <= 1e-9


@given(st.floats(-5, 5), st.floats(0, 5), st.floats(-5, 5), st.floats(0, 5))
def test_one_dimensional_isometry(a, la, b, lb):
    A, B = interval(a, a + la), interval(b, b + lb)
    assert abs(sup_distance(embed(A, G1), embed(B, G1)) - hausdorff(A, B)) <= 1e-12
