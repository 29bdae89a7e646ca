import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gauge_integral.lattice import (DimensionError, NormKind, OSequence, as_vector,
                                    in_order_interval, lattice_inf, lattice_sup, leq, modulus,
                                    norm, osequence_at)

coords = st.floats(-1e6, 1e6, allow_nan=False)
vec3 = st.lists(coords, min_size=3, max_size=3)
nonneg3 = st.lists(st.floats(0, 1e6), min_size=3, max_size=3)


def test_sup_examples():
    assert lattice_sup((1, 0), (0, 1)).tolist() == [1, 1]
    assert lattice_sup((-2, 3), (1, -5)).tolist() == [1, 3]
    a = np.array([0.5, -7.0])
    assert np.array_equal(lattice_sup(a, a), a)


def test_modulus_examples():
    assert modulus((-1, 2)).tolist() == [1, 2]
    assert modulus((0, 0)).tolist() == [0, 0]
    assert modulus((3, -4, 0)).tolist() == modulus((-3, 4, 0)).tolist() == [3, 4, 0]


def test_norm_examples():
    assert norm((3, 4), NormKind.L2) == 5
    assert norm((3, 4), "l1") == 7
    assert norm((3, 4)) == 4
    assert norm(np.add((2, 0), (0, 5)), NormKind.SUP) == 5


def test_osequence_examples():
    s = OSequence((1.0, 1.0), 0.5)
    assert osequence_at(s, 0).tolist() == [1, 1]
    assert osequence_at(s, 3).tolist() == [0.125, 0.125]
    assert np.all(s.at(5) <= s.at(4))


def test_osequence_validation():
    with pytest.raises(ValueError):
        OSequence((1.0,), 1.0)
    with pytest.raises(ValueError):
        OSequence((0.0,), 0.5)
    with pytest.raises(ValueError):
        OSequence((1.0,), 0.5).at(-1)


def test_osequence_broadcast():
    s = OSequence((2.0,), 0.25)
    assert s.broadcast(3).at(1).tolist() == [0.5, 0.5, 0.5]
    with pytest.raises(DimensionError):
        OSequence((1.0, 2.0)).broadcast(3)


def test_order_interval_examples():
    assert in_order_interval((0.1, -0.1), (0.2, 0.2))
    assert not in_order_interval((0.3, 0), (0.2, 0.2))
    assert in_order_interval((0.2, 0.2), (0.2, 0.2))
    with pytest.raises(ValueError):
        in_order_interval((0, 0), (-1, 1))


def test_vectors_reject_nonfinite_and_mismatch():
    with pytest.raises(ValueError):
        as_vector([1.0, math.nan])
    with pytest.raises(DimensionError):
        lattice_sup((1, 2), (1, 2, 3))
    with pytest.raises(DimensionError):
        as_vector([1, 2], dim=3)


def test_normkind_parse():
    assert NormKind.parse("sup") is NormKind.SUP
    with pytest.raises(ValueError):
        NormKind.parse("max")


@given(vec3, vec3)
def test_lattice_identities(a, b):
    a, b = np.array(a), np.array(b)
    assert np.array_equal(lattice_sup(a, b) + lattice_inf(a, b), a + b)
    assert np.array_equal(modulus(a), lattice_sup(a, -a))
    assert leq(lattice_inf(a, b), lattice_sup(a, b))


@given(nonneg3, nonneg3)
def test_m_space_and_l_space(u, v):
    u, v = np.array(u), np.array(v)
    # disjoint supports: zero out overlapping coordinates
    v = np.where(u > 0, 0.0, v)
    assert norm(u + v, NormKind.SUP) == max(norm(u), norm(v))
    assert math.isclose(norm(u + v, NormKind.L1), norm(u, NormKind.L1) + norm(v, NormKind.L1),
                        rel_tol=1e-12)


@given(st.floats(0.01, 100), st.floats(0.05, 0.95), st.integers(0, 40))
def test_osequence_antitone(base, ratio, n):
    s = OSequence((base, 2 * base), ratio)
    assert np.all(s.at(n + 1) <= s.at(n))
    assert np.all(s.at(n) > 0)
