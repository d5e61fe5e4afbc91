import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from symineq.norms import (
    NormError,
    NormSpec,
    YoungFunction,
    exp_equiv_norm,
    lebesgue_norm,
    lorentz_norm,
    lorentz_zygmund_norm,
    luxemburg_norm,
    lz_weight_antiderivative,
)
from symineq.rearrange import DecreasingProfile, decreasing_rearrangement


def const(c, m):
    return DecreasingProfile(np.array([0.0, m]), np.array([c]))


def random_profile(seed, n=50):
    rng = np.random.default_rng(seed)
    return decreasing_rearrangement(rng.exponential(size=n), rng.uniform(0.01, 0.05, n))


def test_lebesgue_direct():
    f = random_profile(0)
    v = np.repeat(f.levels, 1)
    for p in (1, 1.5, 2, 7):
        ref = np.sum(v**p * f.widths) ** (1 / p)
        assert lebesgue_norm(p, f) == pytest.approx(ref, rel=1e-13)
    assert lebesgue_norm(math.inf, f) == f.top
    with pytest.raises(NormError):
        lebesgue_norm(0.5, f)


def test_lebesgue_no_overflow():
    f = const(1e200, 2.0)
    assert lebesgue_norm(4, f) == pytest.approx(1e200 * 2**0.25)


@pytest.mark.parametrize("p,q", [(2, 1), (1.5, 3), (3, 2), (4, math.inf)])
def test_lorentz_constant(p, q):
    c, m = 1.7, 0.6
    if math.isinf(q):
        ref = c * m ** (1 / p)
    else:
        ref = c * (p / q) ** (1 / q) * m ** (1 / p)
    assert lorentz_norm(p, q, const(c, m)) == pytest.approx(ref, rel=1e-13)


@given(st.integers(0, 10_000), st.sampled_from([1.2, 2.0, 3.5]))
def test_lorentz_diagonal(seed, p):
    f = random_profile(seed)
    assert lorentz_norm(p, p, f) == pytest.approx(lebesgue_norm(p, f), rel=1e-12)


def test_lorentz_against_quadrature():
    f = random_profile(3, n=8)
    p, q = 2.5, 1.3
    s = f.breakpoints
    total = sum(
        mpmath.quad(lambda t: (t ** (1 / p - 1 / q) * v) ** q, [a, b])
        for a, b, v in zip(s[:-1], s[1:], f.levels)
    )
    assert lorentz_norm(p, q, f) == pytest.approx(float(total ** (1 / q)), rel=1e-10)


def test_lorentz_inadmissible():
    with pytest.raises(NormError):
        lorentz_norm(1, 2, const(1, 1))
    with pytest.raises(NormError):
        NormSpec.lorentz(0.5, 2)


def lz_oracle(q, m):
    # substitution y = log(1 + m/t): int_log2^inf e^y / ((e^y - 1) y^q) dy
    mpmath.mp.dps = 30
    val = mpmath.quad(lambda y: mpmath.exp(y) / (mpmath.expm1(y) * y**q), [mpmath.log(2), 10, mpmath.inf])
    return float(val)


@pytest.mark.parametrize("q,m", [(2, 1.0), (1.5, 0.75), (3, 2.0)])
def test_lz_constant_profile(q, m):
    c = 0.8
    ref = c * lz_oracle(q, m) ** (1 / q)
    assert lorentz_zygmund_norm(q, const(c, m), m) == pytest.approx(ref, rel=1e-10)


def test_lz_known_value():
    assert lorentz_zygmund_norm(2, const(2.0, 1.0), 1.0) == pytest.approx(2.8238694592104387, rel=1e-12)


def test_lz_antiderivative_increasing():
    s = np.geomspace(1e-12, 1.0, 50)
    G = lz_weight_antiderivative(s, 1.0, 2.0)
    assert np.all(np.diff(G) > 0) and G[0] > 0
    assert lz_weight_antiderivative([0.0], 1.0, 2.0)[0] == 0.0


def test_lz_errors():
    with pytest.raises(NormError):
        lorentz_zygmund_norm(1.0, const(1, 1), 1.0)
    with pytest.raises(NormError):
        lorentz_zygmund_norm(2.0, const(1, 1), math.inf)


@given(st.integers(0, 10_000), st.sampled_from([1.0, 1.5, 2.0, 4.0]))
def test_luxemburg_power(seed, p):
    f = random_profile(seed)
    assert luxemburg_norm(YoungFunction.power(p), f) == pytest.approx(lebesgue_norm(p, f), rel=1e-9)


def test_luxemburg_exp_constant():
    # int A(c/lam) = m  with A = e^t - 1  gives lam = c / log(1 + 1/m)
    c, m = 2.0, 0.3
    lam = luxemburg_norm(YoungFunction.exp_sigma(1.0), const(c, m))
    assert lam == pytest.approx(c / math.log1p(1 / m), rel=1e-12)


def test_young_convexified():
    for A in (YoungFunction.exp_sigma(0.5), YoungFunction.zygmund(1.2, -0.5)):
        assert A.t0 > 0
        t = np.linspace(0, 5 * A.t0, 400)
        a = A(t)
        assert a[0] == 0
        assert np.all(np.diff(a, 2) >= -1e-9 * a.max())
    assert YoungFunction.exp_sigma(2.0).t0 == 0.0
    with pytest.raises(NormError):
        YoungFunction("gauss")


def test_exp_equiv_constant():
    c, m = 1.5, 0.5
    assert exp_equiv_norm(2.0, const(c, m), m) == pytest.approx(c)
    assert exp_equiv_norm(2.0, const(c, m), 2 * m) == pytest.approx(c * (1 + math.log(2)) ** -0.5)


def test_normspec_roundtrip_and_describe():
    specs = [
        NormSpec.lebesgue(2), NormSpec.lebesgue(math.inf), NormSpec.lorentz(6, 1.5),
        NormSpec.lorentz_zygmund(2), NormSpec.orlicz(YoungFunction.zygmund(2, 1)),
        NormSpec.exp_equiv(2),
    ]
    f = random_profile(9)
    for s in specs:
        r = NormSpec.from_dict(s.to_dict())
        assert r == s and s.describe()
        assert r(f, f.support) == s(f, f.support)
    with pytest.raises(NormError):
        NormSpec("weird")
    with pytest.raises(NormError):
        NormSpec("orlicz")


def test_zero_profile_norms():
    z = DecreasingProfile.zero()
    for s in (NormSpec.lebesgue(2), NormSpec.lorentz(2, 1), NormSpec.lorentz_zygmund(2),
              NormSpec.orlicz(YoungFunction.exp_sigma(1)), NormSpec.exp_equiv(1)):
        assert s(z, 1.0) == 0.0
