import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ldpoint import noise
from ldpoint.noise import LawError, MuInterval, RegVarLaw
from ldpoint.rng import Stream

SYM = RegVarLaw(1.5, 0.5, 1.0)


def test_quantile_example():
    law = RegVarLaw(1.5, 1.0, 1.0)
    z = noise.from_uniforms(law, np.array([0.01]), np.array([0.3]))
    # 0.01**(-2/3) = 10**(4/3)
    assert z[0] == pytest.approx(10 ** (4 / 3), rel=1e-15)
    assert z[0] == pytest.approx(21.544346900318832, rel=1e-15)


def test_sign_rule():
    law = RegVarLaw(2.0, 0.25, 1.0)
    z = noise.from_uniforms(law, np.full(3, 0.25), np.array([0.1, 0.25, 0.9]))
    assert list(z) == [2.0, 2.0, -2.0]


def test_empty_sample():
    assert noise.sample(SYM, Stream(1), 0).shape == (0,)
    with pytest.raises(ValueError):
        noise.sample(SYM, Stream(1), -1)


def test_symmetric_mean_zero():
    z = noise.sample(SYM, Stream(5), 10**6)
    se = z.std() / math.sqrt(z.size)
    assert abs(z.mean()) < 3 * se


def test_centered_mean_zero():
    law = RegVarLaw(2.5, 0.8, 1.0, centered=True)
    z = noise.sample(law, Stream(6), 10**7)
    assert abs(law.shift - 0.6 * 2.5 / 1.5) < 1e-15
    se = z.std() / math.sqrt(z.size)
    assert abs(z.mean()) < 4 * se


@pytest.mark.parametrize(
    "kwargs",
    [dict(alpha=0), dict(alpha=-1), dict(alpha=math.inf), dict(alpha=1.5, w=1.2), dict(alpha=1.5, w=-0.1),
     dict(alpha=1.5, u0=0), dict(alpha=0.9, centered=True), dict(alpha=1.0, centered=True)],
)
def test_construction_errors(kwargs):
    with pytest.raises(LawError):
        RegVarLaw(**kwargs)


def test_centering_noop_when_symmetric():
    assert RegVarLaw(1.5, 0.5, 1.0, centered=True).shift == 0.0


def test_tail_examples():
    assert noise.tail(SYM, 10.0) == pytest.approx(10**-1.5, rel=1e-15)
    assert noise.tail(RegVarLaw(0.7, 0.3, 2.0), 2.0) == 1.0
    assert noise.tail(SYM, 100.0) == pytest.approx(noise.tail(SYM, 10.0) * 10**-1.5, rel=1e-14)
    assert noise.tail(SYM, 0.5) == 1.0
    for bad in (0.0, -1.0):
        with pytest.raises(ValueError):
            noise.tail(SYM, bad)


def test_centered_tail_piecewise_oracle():
    # P(|Z - m| > u) = w P(R > u + m) + w P(R < m - u) + (1-w) P(R > u - m) + (1-w) P(R < -u - m)
    law = RegVarLaw(1.5, 0.8, 1.0, centered=True)
    m = law.shift

    def p_gt(s):
        return 1.0 if s < 1 else s**-1.5

    for u in (0.2, 1.0, 1.5, 3.0, 50.0):
        exact = law.w * (p_gt(u + m) + (1 - p_gt(m - u))) + (1 - law.w) * (p_gt(u - m) + (1 - p_gt(-u - m)))
        assert noise.tail(law, u) == pytest.approx(exact, rel=1e-13)


def test_centered_tail_equivalence():
    law = RegVarLaw(1.5, 0.8, 1.0, centered=True)
    raw = RegVarLaw(1.5, 0.8, 1.0)
    assert abs(noise.tail(law, 1e3) / noise.tail(raw, 1e3) - 1) < 0.01


def test_centered_tail_matches_sampler():
    law = RegVarLaw(1.5, 0.8, 1.0, centered=True)
    z = noise.sample(law, Stream(9), 10**6)
    for u in (1.0, 3.0, 10.0):
        p = noise.tail(law, u)
        assert abs(np.mean(np.abs(z) > u) - p) < 4 * math.sqrt(p * (1 - p) / z.size)


@pytest.mark.parametrize("u", [2.0, 10.0, 50.0])
def test_sampler_tail_consistency(u):
    z = noise.sample(SYM, Stream(2), 10**6)
    p = noise.tail(SYM, u)
    assert abs(np.mean(np.abs(z) > u) - p) < 4 * math.sqrt(p * (1 - p) / z.size)


def test_mu_halfline_examples():
    assert noise.mu_halfline(SYM, 2.0) == pytest.approx(0.5 * 2**-1.5, rel=1e-15)
    assert noise.mu_halfline(SYM, 2.0) == pytest.approx(0.1767766952966369, rel=1e-15)
    assert noise.mu_halfline(RegVarLaw(1.5, 1.0), 1.0, "negative") == 0.0
    law = RegVarLaw(0.7, 0.3)
    assert noise.mu_halfline(law, 1.0) + noise.mu_halfline(law, 1.0, "negative") == 1.0
    with pytest.raises(ValueError):
        noise.mu_halfline(SYM, 0.0)
    with pytest.raises(ValueError):
        noise.mu_halfline(SYM, 1.0, "up")


def test_mu_interval():
    assert noise.mu_interval(SYM, MuInterval(1.0, 2.0)) == pytest.approx(0.5 * (1 - 2**-1.5), rel=1e-15)
    assert noise.mu_interval(SYM, MuInterval(-math.inf, -1.0)) == 0.5
    assert noise.mu_interval(SYM, MuInterval(3.0, math.inf)) == noise.mu_halfline(SYM, 3.0)
    for lo, hi in ((-1.0, 1.0), (0.0, 1.0), (2.0, 1.0)):
        with pytest.raises(LawError):
            MuInterval(lo, hi)


@given(
    alpha=st.integers(1, 4),
    w=st.fractions(0, 1).map(float),
    a=st.integers(1, 64),
    u=st.integers(1, 64),
)
def test_homogeneity_exact_on_integers(alpha, w, a, u):
    # integer arguments and exponent: both sides are exact rationals, so compare to a Fraction
    law = RegVarLaw(float(alpha), w)
    lhs = noise.mu_halfline(law, float(a * u))
    exact = Fraction(w) / Fraction(a * u) ** alpha
    assert lhs == pytest.approx(float(exact), rel=4 * np.finfo(float).eps)
    assert lhs == pytest.approx(u ** (-alpha) * noise.mu_halfline(law, float(a)), rel=4 * np.finfo(float).eps)


@given(
    alpha=st.floats(0.1, 4.0),
    w=st.floats(0.0, 1.0),
    a=st.floats(1e-3, 1e3),
    u=st.floats(1e-3, 1e3),
)
def test_homogeneity_property(alpha, w, a, u):
    law = RegVarLaw(alpha, w)
    assert noise.mu_halfline(law, a * u) == pytest.approx(u**-alpha * noise.mu_halfline(law, a), rel=1e-12, abs=0)


@given(alpha=st.floats(0.2, 4.0), w=st.floats(0, 1), u0=st.floats(0.1, 10), centered=st.booleans())
def test_samples_respect_support(alpha, w, u0, centered):
    if centered and alpha <= 1:
        return
    law = RegVarLaw(alpha, w, u0, centered)
    z = noise.sample(law, Stream(1), 500) + law.shift
    assert np.all(np.abs(z) >= u0 * (1 - 1e-12))
    assert np.all(np.isfinite(z))
