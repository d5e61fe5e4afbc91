import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from symineq.fields import make_grid
from symineq.rearrange import (
    DecreasingProfile,
    decreasing_rearrangement,
    distribution,
    lebesgue_cells,
    point_power_density,
    profile_distribution,
    rearrange_cells,
    subadditivity_check,
)

vals = arrays(np.float64, st.integers(1, 60), elements=st.floats(-10, 10))


def test_simple_rearrangement():
    p = decreasing_rearrangement([1.0, -3.0, 2.0, 0.0], [0.5, 0.25, 0.25, 1.0])
    np.testing.assert_array_equal(p.breakpoints, [0, 0.25, 0.5, 1.0])
    np.testing.assert_array_equal(p.levels, [3, 2, 1])
    assert p(0.0) == 3 and p(0.25) == 2 and p(0.99) == 1 and p(1.0) == 0


def test_ties_merge():
    p = decreasing_rearrangement([2.0, 2.0, 1.0], [1.0, 1.0, 1.0])
    np.testing.assert_array_equal(p.levels, [2, 1])
    np.testing.assert_array_equal(p.breakpoints, [0, 2, 3])


def test_zero_profile():
    p = decreasing_rearrangement([0.0, 0.0], [1.0, 1.0])
    assert p.is_zero() and p.top == 0.0 and p(5.0) == 0.0


def test_bad_inputs():
    with pytest.raises(ValueError):
        decreasing_rearrangement([1.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        decreasing_rearrangement([1.0], [-1.0])
    with pytest.raises(ValueError):
        DecreasingProfile(np.array([0.0, 1.0]), np.array([1.0, 2.0]))
    with pytest.raises(ValueError):
        decreasing_rearrangement([1.0], [1.0])(-1.0)


@given(vals)
def test_equimeasurable(v):
    w = np.random.default_rng(len(v)).uniform(0.1, 2.0, len(v))
    p = decreasing_rearrangement(v, w)
    t = np.concatenate([np.abs(v), [0.0, 0.5]])
    np.testing.assert_allclose(profile_distribution(p, t), distribution(v, w, t), rtol=1e-12, atol=1e-12)
    assert p.support == pytest.approx(w[np.abs(v) > 0].sum())


@given(vals)
def test_rearrangement_invariant_under_permutation(v):
    w = np.ones(len(v))
    perm = np.random.default_rng(0).permutation(len(v))
    a = decreasing_rearrangement(v, w)
    b = decreasing_rearrangement(v[perm], w)
    np.testing.assert_array_equal(a.levels, b.levels)
    np.testing.assert_allclose(a.breakpoints, b.breakpoints)


@given(vals, st.integers(0, 2**31))
def test_subadditive(v, seed):
    rng = np.random.default_rng(seed)
    g = rng.normal(size=len(v))
    w = rng.uniform(0.1, 1.0, len(v))
    assert subadditivity_check(v, g, w) <= 1e-12


def test_csv_roundtrip():
    p = decreasing_rearrangement([0.1, 0.7, 0.3], [1 / 3, 1 / 7, 0.2])
    q = DecreasingProfile.from_csv(p.to_csv())
    np.testing.assert_array_equal(p.breakpoints, q.breakpoints)
    np.testing.assert_array_equal(p.levels, q.levels)


def test_cell_measures(lshape):
    g, m = make_grid(lshape, 32)
    leb = lebesgue_cells(g, m)
    assert leb.total == pytest.approx(0.75)
    mu = point_power_density(g, m, 1.5, (0.25, 0.25))
    assert mu.alpha == 1.5 and mu.total > 0
    with pytest.raises(ValueError):
        point_power_density(g, m, 0.5, (0.25, 0.25))
    p = rearrange_cells(np.where(m, 1.0, 0.0), leb)
    assert p.support == pytest.approx(0.75)
