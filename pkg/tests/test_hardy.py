import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from symineq.hardy import (
    SweepResult,
    catalog_family,
    characteristic,
    cumulative,
    kernel,
    kernel_K1,
    kernel_K2,
    kernel_K3,
    monotone_family,
    output_profile,
    power,
    power_log,
    reduction_sweep,
    step_fn,
    subcritical_sweep,
)
from symineq.norms import lebesgue_norm


def chi_formulas(a, s, alpha, n):
    e = (n - 1) / alpha
    k1 = s ** (-e) * np.minimum(s ** (n / alpha), a)
    k2 = n * np.maximum(a ** (1 / n) - s ** (1 / alpha), 0.0)
    k3 = s ** (-e) * np.minimum(s**e, a)
    return k1, k2, k3


@pytest.mark.parametrize("alpha", [2.0, 1.5, 1.1])
@pytest.mark.parametrize("a", [0.01, 0.5, 3.0])
def test_characteristic_closed_forms(a, alpha):
    s = np.geomspace(1e-4, 10, 50)
    phi = characteristic(a)
    k1, k2, k3 = chi_formulas(a, s, alpha, 2)
    np.testing.assert_allclose(kernel_K1(phi, s, alpha), k1, rtol=1e-12, atol=1e-15)
    np.testing.assert_allclose(kernel_K2(phi, s, alpha), k2, rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(kernel_K3(phi, s, alpha), k3, rtol=1e-12, atol=1e-15)


def test_unit_indicator_sum():
    # chi_(0,1), n = alpha = 2: K1 + K2 = 2 - sqrt(s) on (0, 1)
    s = np.linspace(0.01, 0.99, 30)
    phi = characteristic(1.0)
    np.testing.assert_allclose(kernel_K1(phi, s) + kernel_K2(phi, s), 2 - np.sqrt(s), rtol=1e-13)


def test_kernel_three_dims():
    s = np.geomspace(1e-3, 2, 20)
    k1, k2, k3 = chi_formulas(0.4, s, 2.5, 3)
    phi = characteristic(0.4)
    np.testing.assert_allclose(kernel("K1", phi, s, 2.5, 3), k1, rtol=1e-12)
    np.testing.assert_allclose(kernel("K2", phi, s, 2.5, 3), k2, rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(kernel("K3", phi, s, 2.5, 3), k3, rtol=1e-12)


def test_kernel_errors():
    phi = characteristic(1.0)
    with pytest.raises(ValueError):
        kernel("K4", phi, 0.5)
    with pytest.raises(ValueError):
        kernel_K1(phi, 0.0)
    with pytest.raises(ValueError):
        kernel_K1(phi, 0.5, alpha=0.5)
    with pytest.raises(ValueError):
        kernel_K1(phi, 0.5, n=1)


@given(st.lists(st.floats(0.01, 5.0), min_size=1, max_size=8))
def test_cumulative_exact(levels):
    levels = sorted(levels, reverse=True)
    b = np.arange(len(levels) + 1) * 0.5
    phi = step_fn(b, levels)
    t = np.array([0.25, 0.5, 1.3, 100.0])
    ref = [sum(l * max(0.0, min(ti, b1) - b0) for l, b0, b1 in zip(levels, b[:-1], b[1:])) for ti in t]
    np.testing.assert_allclose(cumulative(phi, t), ref, rtol=1e-13)


def test_step_fn_rejects_increasing():
    with pytest.raises(ValueError):
        step_fn([0, 1, 2], [1, 2])


def test_power_discretization_norm():
    # r^-gamma on (0, 1): ||.||_p^p = 1 / (1 - gamma p)
    g, p = 0.3, 1.5
    phi = power(g)
    assert lebesgue_norm(p, phi) == pytest.approx((1 / (1 - g * p)) ** (1 / p), rel=1e-3)
    assert np.all(np.diff(phi.levels) < 0)


def test_power_log_members_decreasing():
    phi = power_log(0.5, 1.0)
    assert np.all(np.diff(phi.levels) < 0) and phi.support == pytest.approx(1.0)


def test_family_specs():
    fam = monotone_family([{"tag": "characteristic", "a": 0.5}, {"tag": "power", "gamma": 0.2}])
    assert [p["tag"] for p, _ in fam] == ["characteristic", "power"]
    assert len(monotone_family({"tag": "catalog", "size": 9})) == 9
    with pytest.raises(ValueError):
        monotone_family({"tag": "gaussian"})
    with pytest.raises(ValueError):
        catalog_family(2)


def test_catalog_monotonicity():
    s = np.geomspace(1e-6, 1.0, 400)
    for params, phi in catalog_family(30):
        k12 = kernel_K1(phi, s) + kernel_K2(phi, s)
        k3 = kernel_K3(phi, s)
        assert np.all(np.diff(k12) <= 1e-12 * k12[:-1]), params
        assert np.all(np.diff(k3) <= 1e-12 * k3[:-1]), params


def test_output_profile_matches_kernel_norm():
    # K3 of chi_(0,1) is 1 on (0,1): its L^2(0,1) norm is 1
    out = output_profile("K3", characteristic(1.0), 2.0, 2, 1.0)
    assert lebesgue_norm(2, out) == pytest.approx(1.0, rel=1e-12)


def test_rigid_translation_ratio_single_member():
    # K1 chi_(0,1) = sqrt(s) on (0,1); ||sqrt s||_6 = 4^{-1/6}, ||chi||_1.5 = 1
    sw = subcritical_sweep(3)
    sw.family = [({"tag": "characteristic", "a": 1.0}, characteristic(1.0))]
    res = reduction_sweep(sw)
    assert res.sup == pytest.approx(4 ** (-1 / 6), rel=5e-4)  # midpoint step model
    assert res.rows[0]["disc_err"] < 1e-3


def test_sweep_csv_columns():
    res = reduction_sweep(subcritical_sweep(6))
    lines = res.to_csv().splitlines()
    assert lines[0].split(",") == list(SweepResult.CSV_COLUMNS)
    assert len(lines) == 7
    s = res.summary()
    assert s["members"] == 6 and math.isfinite(s["sup_ratio"])
    with pytest.raises(ValueError):
        sw = subcritical_sweep(3)
        sw.family = []
        reduction_sweep(sw)
