"""Asymptotic constants: marginal tails, order statistics, hitting times, partial sums, ruin.

Closed forms are used whenever the coefficient sequence is deterministic or
the SRE structure gives a finite expression; otherwise the expectations run
by Monte Carlo over sampled coefficient diagonals truncated at
:func:`ldpoint.process.default_depth`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import process
from .process import IID, SRE, ConditionError, MovingAverage, ProcessSpec, RandomCoefMA, StochVol
from .rng import Stream
from .stats import chunk_plan, map_chunks, mean_stderr

METHODS = ("closed_form", "mc")


@dataclass(frozen=True)
class LimitConstant:
    value: float
    method: str
    stderr: float
    truncation_depth: int

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if self.method == "closed_form" and self.stderr != 0.0:
            raise ValueError("closed-form constants carry no standard error")
        if self.method == "mc" and not self.stderr >= 0.0:
            raise ValueError("Monte Carlo constants need a standard error")

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "method": self.method,
            "stderr": self.stderr,
            "truncation_depth": self.truncation_depth,
        }


def _closed(value: float, depth: int = 0) -> LimitConstant:
    return LimitConstant(float(value), "closed_form", 0.0, int(depth))


def _pick_method(spec: ProcessSpec, method: str) -> str:
    if method == "auto":
        return "closed_form" if process.is_deterministic(spec) else "mc"
    if method not in METHODS:
        raise ValueError(f"method must be auto, closed_form or mc, got {method!r}")
    return method


def _check_contraction(spec: ProcessSpec):
    base = spec.base if isinstance(spec, StochVol) else spec
    if isinstance(base, SRE):
        m = base.y_law.moment(spec.noise.alpha)
        if m >= 1.0:
            raise ConditionError(f"E|Y|^alpha = {m:g} >= 1: the series diverges")


def _mc(spec: ProcessSpec, fn, reps: int, rng: Stream | None, depth: int | None, workers: int = 1) -> LimitConstant:
    """Average ``fn(diagonals)`` over sampled coefficient diagonals."""
    if reps < 2:
        raise ValueError("Monte Carlo constants need reps >= 2")
    rng = Stream(0) if rng is None else rng
    depth = process.default_depth(spec) if depth is None else int(depth)
    parts = map_chunks(
        lambda r0, nr: fn(process.coeff_diagonals(spec, depth, rng, r0, nr)),
        chunk_plan(reps, 4 * (2 * depth + 1)),
        workers,
    )
    m, se = mean_stderr(np.concatenate(parts))
    return LimitConstant(m, "mc", se, depth)


def _diag(spec: ProcessSpec, depth: int | None = None) -> tuple[np.ndarray, int]:
    depth = process.default_depth(spec) if depth is None else int(depth)
    return process.coeff_diagonals(spec, depth, Stream(0), 0, 1)[0], depth


def _sre_const_y(spec: ProcessSpec):
    """``(y, v)`` for an SRE or stochastic volatility model with constant coefficients, else None."""
    if isinstance(spec, SRE) and spec.y_law.is_constant:
        return spec.y_law.sole_value, 1.0
    if isinstance(spec, StochVol) and process.is_deterministic(spec):
        return spec.base.y_law.sole_value, spec.v_law.sole_value
    return None


# ---------------------------------------------------------------- marginal tail


def _side_weights(w: float, side: str) -> tuple[float, float]:
    if side == "positive":
        return w, 1.0 - w
    if side == "negative":
        return 1.0 - w, w
    raise ValueError(f"side must be positive or negative, got {side!r}")


def marginal_tail_constant(
    spec: ProcessSpec,
    side: str = "positive",
    method: str = "auto",
    reps: int = 100_000,
    rng: Stream | None = None,
    depth: int | None = None,
) -> LimitConstant:
    """``lim P(X > x)/P(|Z| > x)`` (``side='negative'``: ``P(X < -x)``)."""
    law = spec.noise
    alpha = law.alpha
    wp, wn = _side_weights(law.w, side)
    _check_contraction(spec)

    def term(a):
        a = np.asarray(a, dtype=np.float64)
        mag = np.abs(a) ** alpha
        return np.where(a > 0, wp * mag, np.where(a < 0, wn * mag, 0.0))

    if method == "mc":
        return _mc(spec, lambda d: term(d).sum(axis=1), reps, rng, depth)
    if isinstance(spec, IID):
        return _closed(wp)
    if isinstance(spec, MovingAverage):
        return _closed(math.fsum(term(spec.coeffs)))
    if isinstance(spec, RandomCoefMA):
        cl = spec.coeff_law
        return _closed(math.fsum(p * math.fsum(term(v)) for v, p in zip(cl.vectors, cl.probs)))
    base = spec.base if isinstance(spec, StochVol) else spec
    a = base.y_law.pos_moment(alpha)
    b = base.y_law.neg_moment(alpha)
    value = (wp * (1.0 - a) + wn * b) / ((1.0 - a) ** 2 - b**2)
    if isinstance(spec, StochVol):
        value *= spec.v_law.pos_moment(alpha)
    return _closed(value)


# ---------------------------------------------------------------- clusters of extremes


def _require_nonnegative(spec: ProcessSpec):
    if not spec.nonnegative_coeffs:
        raise ValueError("this constant needs nonnegative coefficients")


def order_stat_constant(
    spec: ProcessSpec,
    u,
    method: str = "auto",
    reps: int = 100_000,
    rng: Stream | None = None,
    depth: int | None = None,
) -> LimitConstant:
    """``w E min_i (A_i^* / u_i)^alpha`` with ``A_i^*`` the descending diagonal."""
    _require_nonnegative(spec)
    u = np.asarray(u, dtype=np.float64).ravel()
    # the event {X_(i:n) > gamma_n u_i for all i} is well defined for any positive u
    if u.size == 0 or np.any(u <= 0):
        raise ValueError("u must be a non-empty vector of positive thresholds")
    _check_contraction(spec)
    alpha = spec.noise.alpha
    w = spec.noise.w
    q = u.size

    def fn(diag):
        srt = -np.sort(-diag, axis=1)
        if srt.shape[1] < q:
            srt = np.pad(srt, ((0, 0), (0, q - srt.shape[1])))
        return w * np.min((srt[:, :q] / u) ** alpha, axis=1)

    if _pick_method(spec, method) == "mc":
        return _mc(spec, fn, reps, rng, depth)
    d, depth_used = _diag(spec, max(process.default_depth(spec), q) if depth is None else depth)
    return _closed(fn(d[None, :])[0], depth_used)


def hitting_constant(
    spec: ProcessSpec,
    lam: float,
    a: float,
    method: str = "auto",
    reps: int = 100_000,
    rng: Stream | None = None,
    depth: int | None = None,
) -> LimitConstant:
    """``lam w a^-alpha E (A_1^*)^alpha``."""
    _require_nonnegative(spec)
    if not (lam > 0 and a > 0):
        raise ValueError("lambda and a must be positive")
    _check_contraction(spec)
    alpha = spec.noise.alpha
    scale = lam * spec.noise.w * a**-alpha

    def fn(diag):
        return scale * diag.max(axis=1) ** alpha

    if _pick_method(spec, method) == "mc":
        return _mc(spec, fn, reps, rng, depth)
    d, depth_used = _diag(spec, depth)
    return _closed(fn(d[None, :])[0], depth_used)


# ---------------------------------------------------------------- partial sums and ruin


def partial_sum_constant(
    spec: ProcessSpec,
    rho: float,
    absolute: bool = False,
    method: str = "auto",
    reps: int = 100_000,
    rng: Stream | None = None,
    depth: int | None = None,
) -> LimitConstant:
    """Limit of ``r_n P(S_n > rho gamma_n)``; ``absolute`` uses ``sum |A_jj|``."""
    if not rho > 0:
        raise ValueError("rho must be positive")
    _check_contraction(spec)
    alpha = spec.noise.alpha
    w = spec.noise.w
    scale = rho**-alpha

    def from_sums(s):
        s = np.asarray(s, dtype=np.float64)
        if absolute:
            return scale * s**alpha
        return scale * (w * np.maximum(s, 0.0) ** alpha + (1.0 - w) * np.maximum(-s, 0.0) ** alpha)

    def fn(diag):
        d = np.abs(diag) if absolute else diag
        return from_sums(np.cumsum(d, axis=1)[:, -1])

    if _pick_method(spec, method) == "mc":
        return _mc(spec, fn, reps, rng, depth)
    const = _sre_const_y(spec)
    if const is not None:
        y, v = const
        total = v / (1.0 - (abs(y) if absolute else y))
        return _closed(from_sums(total), 0)
    d, depth_used = _diag(spec, depth)
    return _closed(fn(d[None, :])[0], depth_used)


def _ruin_divide(expectation: float, c: float, alpha: float) -> float:
    num = np.longdouble(expectation)
    den = np.longdouble(c) * (np.longdouble(alpha) - np.longdouble(1))
    return float(num / den)


def ruin_constant(
    spec: ProcessSpec,
    c: float,
    method: str = "auto",
    reps: int = 100_000,
    rng: Stream | None = None,
    depth: int | None = None,
) -> LimitConstant:
    """``E[w M_+^alpha + (1-w) M_-^alpha] / (c (alpha - 1))``.

    ``M_+`` and ``M_-`` are the suprema over ``j`` of the running sums of
    ``A_kk`` and ``-A_kk`` (each floored at 0, the value at ``j -> -inf``).
    """
    alpha = spec.noise.alpha
    if alpha <= 1:
        raise ValueError("the ruin constant needs alpha > 1")
    if not c > 0:
        raise ValueError("drift c must be positive")
    if not isinstance(spec, (IID, MovingAverage, RandomCoefMA, SRE, StochVol)):
        raise TypeError("no diagonal sampler for this model")
    _check_contraction(spec)
    w = spec.noise.w

    def fn(diag):
        cs = np.cumsum(diag, axis=1)
        mp = np.maximum(cs.max(axis=1), 0.0)
        mm = np.maximum((-cs).max(axis=1), 0.0)
        return w * mp**alpha + (1.0 - w) * mm**alpha

    if _pick_method(spec, method) == "mc":
        k = _mc(spec, fn, reps, rng, depth)
        return LimitConstant(_ruin_divide(k.value, c, alpha), "mc", _ruin_divide(k.stderr, c, alpha), k.truncation_depth)
    const = _sre_const_y(spec)
    if const is not None:
        y, v = const
        # running sums of v y^k: increase to v/(1-y) for y >= 0, peak at v for y < 0
        mp = v / (1.0 - y) if y >= 0 else v
        return _closed(_ruin_divide(w * mp**alpha, c, alpha), 0)
    d, depth_used = _diag(spec, depth)
    return _closed(_ruin_divide(fn(d[None, :])[0], c, alpha), depth_used)
