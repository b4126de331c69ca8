import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ldpoint import limits
from ldpoint.limits import LimitConstant
from ldpoint.noise import RegVarLaw
from ldpoint.process import IID, SRE, ConditionError, DiscreteLaw, MovingAverage, RandomCoefMA, StochVol, VectorLaw
from ldpoint.rng import Stream

LAW = RegVarLaw(1.5, 0.5, 1.0)
IID_SPEC = IID(LAW)
MA_SPEC = MovingAverage((1.0, 0.5), LAW)
EPS = np.finfo(float).eps


def test_marginal_examples():
    assert limits.marginal_tail_constant(MA_SPEC).value == pytest.approx(0.5 * (1 + 0.5**1.5), rel=1e-15)
    assert limits.marginal_tail_constant(MA_SPEC).value == pytest.approx(0.676777, abs=5e-7)
    sre = SRE(DiscreteLaw.constant(0.5), RegVarLaw(0.8, 1.0))
    k = limits.marginal_tail_constant(sre)
    assert k.value == pytest.approx(1 / (1 - 0.5**0.8), rel=1e-14)
    assert k.value == pytest.approx(2.34936, abs=2e-5)
    assert k.method == "closed_form" and k.stderr == 0.0
    for alpha, w in ((0.7, 0.2), (1.5, 0.5), (3.0, 1.0)):
        assert limits.marginal_tail_constant(IID(RegVarLaw(alpha, w))).value == w
        assert limits.marginal_tail_constant(IID(RegVarLaw(alpha, w)), "negative").value == 1 - w


def _series_oracle(values, probs, alpha, w, terms=400):
    """sum_j E[|A_j|^alpha (w 1{A_j>0} + (1-w) 1{A_j<0})] with A_j = Y_1...Y_j, by direct recursion."""
    a = sum(p * max(v, 0) ** alpha for v, p in zip(values, probs))
    b = sum(p * max(-v, 0) ** alpha for v, p in zip(values, probs))
    pos, neg, total = 1.0, 0.0, []
    for _ in range(terms):
        total.append(w * pos + (1 - w) * neg)
        pos, neg = pos * a + neg * b, pos * b + neg * a
    return math.fsum(total)


@pytest.mark.parametrize(
    "values,probs,alpha,w",
    [((0.5,), (1.0,), 0.8, 1.0), ((-0.6, 0.3), (0.5, 0.5), 1.5, 0.5), ((-0.9, 0.2, 0.5), (0.2, 0.3, 0.5), 1.2, 0.7),
     ((-0.5,), (1.0,), 1.5, 0.9)],
)
def test_sre_marginal_against_series(values, probs, alpha, w):
    spec = SRE(DiscreteLaw(values, probs), RegVarLaw(alpha, w))
    for side, ww in (("positive", w), ("negative", 1 - w)):
        exact = _series_oracle(values, probs, alpha, ww)
        assert limits.marginal_tail_constant(spec, side).value == pytest.approx(exact, rel=1e-12)


def test_sre_marginal_mc_route():
    spec = SRE(DiscreteLaw((-0.6, 0.3), (0.5, 0.5)), LAW)
    closed = limits.marginal_tail_constant(spec)
    mc = limits.marginal_tail_constant(spec, method="mc", reps=100_000, rng=Stream(4))
    assert mc.method == "mc" and mc.stderr > 0
    assert abs(mc.value - closed.value) <= 4 * mc.stderr


def test_stochvol_multiplier():
    base = SRE(DiscreteLaw.constant(0.5), RegVarLaw(0.8, 1.0))
    sv = StochVol(base, DiscreteLaw.constant(3.0))
    assert limits.marginal_tail_constant(sv).value == pytest.approx(
        3.0**0.8 * limits.marginal_tail_constant(base).value, rel=1e-14)


def test_divergent_series_rejected():
    with pytest.raises(ConditionError):
        limits.marginal_tail_constant(SRE(DiscreteLaw.constant(1.1), LAW))


def test_order_stat_examples():
    assert limits.order_stat_constant(MA_SPEC, (1.0, 1.0)).value == pytest.approx(0.5 * 0.5**1.5, rel=1e-15)
    assert limits.order_stat_constant(MA_SPEC, (1.0, 1.0)).value == pytest.approx(0.176777, abs=5e-7)
    assert limits.order_stat_constant(MA_SPEC, (1.0, 2.0)).value == pytest.approx(0.0625, rel=1e-15)
    assert limits.order_stat_constant(IID_SPEC, (2.0, 1.0)).value == 0.0
    assert limits.order_stat_constant(IID_SPEC, (1.0,)).value == 0.5
    with pytest.raises(ValueError):
        limits.order_stat_constant(MovingAverage((1.0, -0.5), LAW), (1.0,))
    with pytest.raises(ValueError):
        limits.order_stat_constant(MA_SPEC, (1.0, 0.0))


def test_hitting_examples():
    assert limits.hitting_constant(IID_SPEC, 1.0, 2.0).value == pytest.approx(0.176777, abs=5e-7)
    assert limits.hitting_constant(IID_SPEC, 2.0, 2.0).value == 2 * limits.hitting_constant(IID_SPEC, 1.0, 2.0).value
    assert limits.hitting_constant(MA_SPEC, 1.0, 2.0).value == limits.hitting_constant(IID_SPEC, 1.0, 2.0).value
    with pytest.raises(ValueError):
        limits.hitting_constant(IID_SPEC, 0.0, 1.0)


def test_partial_sum_examples():
    assert limits.partial_sum_constant(MA_SPEC, 1.0).value == pytest.approx(0.5 * 1.5**1.5, rel=1e-15)
    assert limits.partial_sum_constant(MA_SPEC, 1.0).value == pytest.approx(0.918559, abs=5e-7)
    assert limits.partial_sum_constant(IID_SPEC, 2.0).value == pytest.approx(0.5 * 2**-1.5, rel=1e-15)
    assert limits.partial_sum_constant(MovingAverage((1.0, -1.0), LAW), 1.0).value == 0.0
    assert limits.partial_sum_constant(MovingAverage((1.0, -1.0), LAW), 1.0, absolute=True).value == pytest.approx(
        2**1.5, rel=1e-15)
    sre = SRE(DiscreteLaw.constant(-0.5), LAW)
    assert limits.partial_sum_constant(sre, 1.0).value == pytest.approx(0.5 * (1 / 1.5) ** 1.5, rel=1e-14)
    assert limits.partial_sum_constant(sre, 1.0, True).value == pytest.approx(2**1.5, rel=1e-14)


def test_ruin_examples():
    assert limits.ruin_constant(IID_SPEC, 1.0).value == 1.0
    assert limits.ruin_constant(MA_SPEC, 1.0).value == pytest.approx(0.5 * 1.5**1.5 / 0.5, rel=1e-15)
    assert limits.ruin_constant(MA_SPEC, 1.0).value == pytest.approx(1.83712, abs=5e-6)
    with pytest.raises(ValueError):
        limits.ruin_constant(IID(RegVarLaw(0.9, 0.5)), 1.0)
    with pytest.raises(ValueError):
        limits.ruin_constant(IID_SPEC, 0.0)


def test_sre_ruin_against_enumeration():
    # Y uniform on {-1/2, +1/2}: enumerate all 2^20 sign paths exactly; the tail beyond depth 20 moves
    # each running sum by at most 2^-20, far below the Monte Carlo error
    depth = 20
    bits = (np.arange(2**depth, dtype=np.uint32)[:, None] >> np.arange(depth, dtype=np.uint32)) & 1
    y = np.where(bits == 1, 0.5, -0.5)
    prods = np.cumprod(y, axis=1)
    sums = 1.0 + np.cumsum(prods, axis=1)
    mp = np.maximum(sums.max(axis=1), 1.0)
    mm = np.maximum((-sums).max(axis=1), 0.0)
    oracle = float(np.mean(0.5 * mp**1.5 + 0.5 * mm**1.5)) / 0.5
    spec = SRE(DiscreteLaw.uniform((-0.5, 0.5)), LAW)
    k = limits.ruin_constant(spec, 1.0, reps=200_000, rng=Stream(12))
    assert k.method == "mc" and k.truncation_depth >= 27
    assert abs(k.value - oracle) <= 4 * k.stderr, (k.value, k.stderr, oracle)


def test_constant_sre_ruin_closed_form():
    for y in (0.5, -0.5, 0.0):
        spec = SRE(DiscreteLaw.constant(y), LAW)
        mc = limits.ruin_constant(spec, 1.0, method="mc", reps=1000, rng=Stream(1))
        closed = limits.ruin_constant(spec, 1.0)
        assert closed.method == "closed_form"
        assert closed.value == pytest.approx(mc.value, rel=1e-7)


@pytest.mark.parametrize(
    "fn,args",
    [
        (limits.marginal_tail_constant, ()),
        (limits.order_stat_constant, ((1.0, 1.0),)),
        (limits.hitting_constant, (1.0, 2.0)),
        (limits.partial_sum_constant, (1.0,)),
        (limits.ruin_constant, (1.0,)),
    ],
)
def test_mc_agrees_with_closed_form_for_ma(fn, args):
    spec = MovingAverage((1.0, 0.5, 0.25), LAW)
    closed = fn(spec, *args)
    mc = fn(spec, *args, method="mc", reps=2000, rng=Stream(3))
    # deterministic coefficients: every draw is the same, so the MC error is pure rounding
    assert mc.stderr <= 1e-12 * max(1.0, closed.value)
    assert abs(mc.value - closed.value) <= 3 * mc.stderr + 1e-12 * closed.value


def test_rcma_mc_against_enumeration():
    law = VectorLaw(((1.0, 0.5), (0.5, 1.0), (0.0, 0.8)), (0.5, 0.3, 0.2))
    spec = RandomCoefMA(law, LAW)
    # A_{0,0} and A_{1,1} come from independent vectors: enumerate the 9 pairs
    vecs, probs = np.asarray(law.vectors), np.asarray(law.probs)
    exact = 0.0
    for i in range(3):
        for j in range(3):
            a0, a1 = vecs[i, 0], vecs[j, 1]
            exact += probs[i] * probs[j] * 0.5 * min(max(a0, a1) ** 1.5, (min(a0, a1) / 0.5) ** 1.5)
    mc = limits.order_stat_constant(spec, (1.0, 0.5), reps=200_000, rng=Stream(6))
    assert abs(mc.value - exact) <= 4 * mc.stderr


def test_limit_constant_invariants():
    with pytest.raises(ValueError):
        LimitConstant(1.0, "closed_form", 0.1, 0)
    with pytest.raises(ValueError):
        LimitConstant(1.0, "mc", math.nan, 0)
    with pytest.raises(ValueError):
        LimitConstant(1.0, "guess", 0.0, 0)
    assert LimitConstant(1.0, "mc", 0.0, 3).to_dict() == {"value": 1.0, "method": "mc", "stderr": 0.0,
                                                          "truncation_depth": 3}


# ---------------------------------------------------------------- properties


coef_lists = st.lists(st.floats(0.0, 2.0), min_size=1, max_size=6).filter(lambda c: max(c) > 0)


@given(coeffs=coef_lists, s=st.floats(0.1, 10.0), u=st.lists(st.floats(0.2, 5.0), min_size=1, max_size=3))
def test_order_stat_scaling(coeffs, s, u):
    spec = MovingAverage(tuple(coeffs), LAW)
    base = limits.order_stat_constant(spec, u).value
    scaled = limits.order_stat_constant(spec, [s * v for v in u]).value
    assert scaled == pytest.approx(s**-1.5 * base, rel=1e-13, abs=1e-300)


@given(coeffs=st.lists(st.floats(-2.0, 2.0), min_size=1, max_size=6), w=st.floats(0, 1), alpha=st.floats(0.3, 3.0),
       rho=st.floats(0.1, 5.0))
def test_signed_below_absolute(coeffs, w, alpha, rho):
    spec = MovingAverage(tuple(coeffs), RegVarLaw(alpha, w))
    signed = limits.partial_sum_constant(spec, rho).value
    absolute = limits.partial_sum_constant(spec, rho, absolute=True).value
    assert signed <= absolute * (1 + 1e-12)


@given(alpha=st.floats(1.01, 4.0), w=st.floats(0, 1), c=st.floats(0.01, 100.0))
def test_ruin_iid_consistency(alpha, w, c):
    k = limits.ruin_constant(IID(RegVarLaw(alpha, w, centered=w != 0.5)), c).value
    assert k * c * (alpha - 1) == pytest.approx(w, rel=4 * EPS, abs=1e-300)


@given(alpha=st.floats(1.05, 3.0), w=st.floats(0, 1))
def test_sre_zero_reproduces_iid(alpha, w):
    law = RegVarLaw(alpha, w, centered=w != 0.5)
    sre, iid = SRE(DiscreteLaw.constant(0.0), law), IID(law)
    pairs = [
        (lambda s: limits.marginal_tail_constant(s)),
        (lambda s: limits.marginal_tail_constant(s, "negative")),
        (lambda s: limits.order_stat_constant(s, (1.0,))),
        (lambda s: limits.order_stat_constant(s, (1.0, 0.5))),
        (lambda s: limits.hitting_constant(s, 1.0, 2.0)),
        (lambda s: limits.partial_sum_constant(s, 1.5)),
        (lambda s: limits.partial_sum_constant(s, 1.5, True)),
        (lambda s: limits.ruin_constant(s, 2.0)),
    ]
    for f in pairs:
        assert f(sre).value == f(iid).value
