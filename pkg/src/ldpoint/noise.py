"""Two-sided Pareto noise and its tail limit measure.

The law: ``|Z| = u0 * U**(-1/alpha)`` with ``U`` uniform on (0, 1), positive
sign with probability ``w``. With ``centered=True`` the mean is subtracted,
which is a bounded shift and leaves the limit measure unchanged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .rng import LANE_NOISE, Stream


class LawError(ValueError):
    pass


@dataclass(frozen=True)
class RegVarLaw:
    alpha: float
    w: float = 0.5
    u0: float = 1.0
    centered: bool = False

    def __post_init__(self):
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise LawError(f"alpha must be a positive finite number, got {self.alpha}")
        if not 0.0 <= self.w <= 1.0:
            raise LawError(f"w must lie in [0, 1], got {self.w}")
        if not (self.u0 > 0 and math.isfinite(self.u0)):
            raise LawError(f"u0 must be positive, got {self.u0}")
        if self.centered and self.alpha <= 1:
            raise LawError("centering needs a finite mean (alpha > 1)")

    @property
    def mean_uncentered(self) -> float:
        """Mean of the uncentered law (``nan`` when alpha <= 1 and w != 1/2)."""
        if self.w == 0.5:
            return 0.0
        if self.alpha <= 1:
            return math.nan
        m = self.u0 * self.alpha / (self.alpha - 1.0)
        return (2.0 * self.w - 1.0) * m

    @property
    def shift(self) -> float:
        """Constant subtracted from every draw."""
        return self.mean_uncentered if self.centered else 0.0

    @property
    def has_zero_mean(self) -> bool:
        return self.w == 0.5 or self.centered

    def abs_moment(self, s: float) -> float:
        """``E|Z0|**s`` of the uncentered law, ``inf`` if ``s >= alpha``."""
        if s >= self.alpha:
            return math.inf
        return self.u0**s * self.alpha / (self.alpha - s)


@dataclass(frozen=True)
class MuInterval:
    """An interval of the punctured real line, bounded away from 0."""

    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise LawError(f"empty interval ({self.lo}, {self.hi})")
        if self.lo <= 0.0 <= self.hi:
            raise LawError("interval closure contains the origin")


def magnitudes(u: np.ndarray, alpha: float, u0: float) -> np.ndarray:
    """Pareto quantile ``u0 * u**(-1/alpha)`` applied elementwise."""
    out = np.power(u, -1.0 / alpha)
    if u0 != 1.0:
        out *= u0
    return out


def from_uniforms(law: RegVarLaw, u_mag: np.ndarray, u_sign: np.ndarray) -> np.ndarray:
    """Noise from uniforms: magnitude from ``u_mag``, sign + iff ``u_sign <= w``."""
    z = magnitudes(u_mag, law.alpha, law.u0)
    apply_sign(z, u_sign, law)
    return z


def apply_sign(z: np.ndarray, u_sign: np.ndarray, law: RegVarLaw) -> None:
    """In place: negate where ``u_sign > w``, then subtract the centering shift."""
    np.copysign(z, law.w - u_sign, out=z)
    shift = law.shift
    if shift != 0.0:
        z -= shift


def sample(law: RegVarLaw, rng: Stream, count: int, rep: int = 0) -> np.ndarray:
    """``count`` i.i.d. draws from replication ``rep`` of ``rng``."""
    if count < 0:
        raise ValueError("count must be >= 0")
    u_mag, u_sign = rng.uniforms(rep, 1, LANE_NOISE, 0, count)
    return from_uniforms(law, u_mag[0], u_sign[0])


def _p_abs_gt(law: RegVarLaw, s: float) -> float:
    """P(R > s) for the Pareto magnitude R >= u0."""
    if s < law.u0:
        return 1.0
    return (s / law.u0) ** (-law.alpha)


def prob_greater(law: RegVarLaw, x: float) -> float:
    """Exact P(Z > x), centering included."""
    s = x + law.shift
    # Z0 = R with prob w, -R with prob 1-w
    return law.w * _p_abs_gt(law, s) + (1.0 - law.w) * (1.0 - _p_abs_gt(law, -s))


def prob_less(law: RegVarLaw, x: float) -> float:
    """Exact P(Z < x), centering included."""
    s = x + law.shift
    return law.w * (1.0 - _p_abs_gt(law, s)) + (1.0 - law.w) * _p_abs_gt(law, -s)


def tail(law: RegVarLaw, u: float) -> float:
    """Exact P(|Z| > u)."""
    if not u > 0:
        raise ValueError(f"tail needs u > 0, got {u}")
    if law.shift == 0.0:
        return min(1.0, _p_abs_gt(law, u))
    return prob_greater(law, u) + prob_less(law, -u)


def mu_halfline(law: RegVarLaw, a: float, side: str = "positive") -> float:
    """mu((a, inf)) or mu((-inf, -a))."""
    if not a > 0:
        raise ValueError(f"mu_halfline needs a > 0, got {a}")
    if side == "positive":
        return law.w * a ** (-law.alpha)
    if side == "negative":
        return (1.0 - law.w) * a ** (-law.alpha)
    raise ValueError(f"side must be 'positive' or 'negative', got {side!r}")


def mu_interval(law: RegVarLaw, iv: MuInterval) -> float:
    if iv.lo > 0:
        upper = 0.0 if math.isinf(iv.hi) else mu_halfline(law, iv.hi, "positive")
        return mu_halfline(law, iv.lo, "positive") - upper
    lower = 0.0 if math.isinf(iv.lo) else mu_halfline(law, -iv.lo, "negative")
    return mu_halfline(law, -iv.hi, "negative") - lower
