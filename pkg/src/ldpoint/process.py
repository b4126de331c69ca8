"""Random-coefficient linear processes driven by two-sided Pareto noise.

Model classes: :class:`IID`, :class:`MovingAverage`, :class:`RandomCoefMA`,
:class:`SRE` (``X_k = Y_k X_{k-1} + Z_k``) and :class:`StochVol`
(``U_k = V_k X_k`` over an SRE). Coefficient laws have finite support so
that every moment the theory needs is an exact finite sum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from . import kernels, noise as noise_mod
from .noise import RegVarLaw
from .rng import LANE_AUX, LANE_COEF, LANE_NOISE, LANE_VOL, Stream, philox_uniforms

EPS_GRID = (0.01, 0.05, 0.1)
CONDITION_IDS = ("H", "CC1", "CC15", "CC2", "GAMMA", "SMALLJUMP", "SUMA", "SRE-SYM")


class ConditionError(ValueError):
    """A model violates a standing assumption it needs for the requested use."""


# ---------------------------------------------------------------- coefficient laws


@dataclass(frozen=True)
class DiscreteLaw:
    """Finite-support scalar law; ``probs=None`` means uniform on ``values``."""

    values: tuple
    probs: tuple | None = None

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if not vals:
            raise ValueError("a discrete law needs at least one atom")
        if any(not math.isfinite(v) for v in vals):
            raise ValueError("atoms must be finite")
        if self.probs is None:
            probs = tuple(1.0 / len(vals) for _ in vals)
        else:
            probs = tuple(float(p) for p in self.probs)
            if len(probs) != len(vals):
                raise ValueError("values and probs differ in length")
            if any(p < 0 for p in probs) or abs(math.fsum(probs) - 1.0) > 1e-12:
                raise ValueError("probs must be non-negative and sum to 1")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def constant(cls, v: float) -> "DiscreteLaw":
        return cls((v,), (1.0,))

    @classmethod
    def uniform(cls, values) -> "DiscreteLaw":
        return cls(tuple(values))

    @classmethod
    def signed(cls, scale: float, p_plus: float = 0.5) -> "DiscreteLaw":
        """``+scale`` with probability ``p_plus``, else ``-scale``."""
        return cls((scale, -scale), (p_plus, 1.0 - p_plus))

    def moment(self, s: float) -> float:
        """E|Y|^s (with 0**s = 0 for s > 0)."""
        return math.fsum(p * abs(v) ** s for v, p in zip(self.values, self.probs) if v != 0.0)

    def pos_moment(self, s: float) -> float:
        return math.fsum(p * v**s for v, p in zip(self.values, self.probs) if v > 0.0)

    def neg_moment(self, s: float) -> float:
        return math.fsum(p * (-v) ** s for v, p in zip(self.values, self.probs) if v < 0.0)

    @property
    def is_constant(self) -> bool:
        return len(set(v for v, p in zip(self.values, self.probs) if p > 0)) == 1

    @property
    def nonnegative(self) -> bool:
        return all(v >= 0 for v, p in zip(self.values, self.probs) if p > 0)

    @property
    def positive(self) -> bool:
        return all(v > 0 for v, p in zip(self.values, self.probs) if p > 0)

    @property
    def is_symmetric(self) -> bool:
        mass: dict[float, float] = {}
        for v, p in zip(self.values, self.probs):
            mass[v] = mass.get(v, 0.0) + p
        return all(abs(m - mass.get(-v, 0.0)) <= 1e-12 for v, m in mass.items())

    @property
    def sole_value(self) -> float:
        if not self.is_constant:
            raise ValueError("law is not degenerate")
        return next(v for v, p in zip(self.values, self.probs) if p > 0)

    def quantile(self, u: np.ndarray) -> np.ndarray:
        cum = np.cumsum(self.probs)
        i = np.searchsorted(cum, u, side="right")
        return np.asarray(self.values)[np.minimum(i, len(self.values) - 1)]


@dataclass(frozen=True)
class VectorLaw:
    """Finite-support law over coefficient vectors ``(A_jmin, ..., A_jmax)``."""

    vectors: tuple
    probs: tuple | None = None
    jmin: int = 0

    def __post_init__(self):
        vecs = tuple(tuple(float(a) for a in v) for v in self.vectors)
        if not vecs or not vecs[0]:
            raise ValueError("need at least one non-empty coefficient vector")
        if len({len(v) for v in vecs}) != 1:
            raise ValueError("all coefficient vectors must share one support")
        if self.probs is None:
            probs = tuple(1.0 / len(vecs) for _ in vecs)
        else:
            probs = tuple(float(p) for p in self.probs)
            if len(probs) != len(vecs) or abs(math.fsum(probs) - 1.0) > 1e-12 or min(probs) < 0:
                raise ValueError("probs must match vectors and sum to 1")
        object.__setattr__(self, "vectors", vecs)
        object.__setattr__(self, "probs", probs)

    @property
    def span(self) -> int:
        return len(self.vectors[0])

    @property
    def jmax(self) -> int:
        return self.jmin + self.span - 1

    def quantile(self, u: np.ndarray) -> np.ndarray:
        cum = np.cumsum(self.probs)
        return np.minimum(np.searchsorted(cum, u, side="right"), len(self.vectors) - 1)


# ---------------------------------------------------------------- model specs


@dataclass(frozen=True)
class IID:
    noise: RegVarLaw
    kind: str = field(default="iid", init=False)

    @property
    def nonnegative_coeffs(self) -> bool:
        return True


@dataclass(frozen=True)
class MovingAverage:
    """``X_k = sum_j coeffs[j - jmin] * Z_{k-j}``."""

    coeffs: tuple
    noise: RegVarLaw
    jmin: int = 0
    kind: str = field(default="ma", init=False)

    def __post_init__(self):
        c = tuple(float(a) for a in self.coeffs)
        if not c:
            raise ValueError("moving average needs at least one coefficient")
        if any(not math.isfinite(a) for a in c):
            raise ValueError("coefficients must be finite")
        object.__setattr__(self, "coeffs", c)

    @property
    def jmax(self) -> int:
        return self.jmin + len(self.coeffs) - 1

    @property
    def nonnegative_coeffs(self) -> bool:
        return all(a >= 0 for a in self.coeffs)


@dataclass(frozen=True)
class RandomCoefMA:
    """Coefficient vectors drawn i.i.d. over time from ``coeff_law``."""

    coeff_law: VectorLaw
    noise: RegVarLaw
    kind: str = field(default="rcma", init=False)

    @property
    def nonnegative_coeffs(self) -> bool:
        return all(a >= 0 for v, p in zip(self.coeff_law.vectors, self.coeff_law.probs) if p > 0 for a in v)


@dataclass(frozen=True)
class SRE:
    y_law: DiscreteLaw
    noise: RegVarLaw
    kind: str = field(default="sre", init=False)

    @property
    def nonnegative_coeffs(self) -> bool:
        return self.y_law.nonnegative


@dataclass(frozen=True)
class StochVol:
    base: SRE
    v_law: DiscreteLaw
    kind: str = field(default="sv", init=False)

    def __post_init__(self):
        if not self.v_law.positive:
            raise ValueError("volatility law must be strictly positive")

    @property
    def noise(self) -> RegVarLaw:
        return self.base.noise

    @property
    def nonnegative_coeffs(self) -> bool:
        return self.base.nonnegative_coeffs


ProcessSpec = Union[IID, MovingAverage, RandomCoefMA, SRE, StochVol]


def is_deterministic(spec: ProcessSpec) -> bool:
    """True when the coefficient sequence is non-random."""
    if isinstance(spec, (IID, MovingAverage)):
        return True
    if isinstance(spec, SRE):
        return spec.y_law.is_constant
    if isinstance(spec, StochVol):
        return spec.base.y_law.is_constant and spec.v_law.is_constant
    return len(set(spec.coeff_law.vectors)) == 1


def replace_noise(spec: ProcessSpec, law: RegVarLaw) -> ProcessSpec:
    if isinstance(spec, StochVol):
        return StochVol(SRE(spec.base.y_law, law), spec.v_law)
    if isinstance(spec, IID):
        return IID(law)
    if isinstance(spec, MovingAverage):
        return MovingAverage(spec.coeffs, law, spec.jmin)
    if isinstance(spec, RandomCoefMA):
        return RandomCoefMA(spec.coeff_law, law)
    return SRE(spec.y_law, law)


# ---------------------------------------------------------------- conditions


@dataclass(frozen=True)
class Condition:
    id: str
    status: str  # holds | fails | unknown
    evidence: str
    numbers: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ConditionReport:
    conditions: tuple

    def __post_init__(self):
        ids = [c.id for c in self.conditions]
        if sorted(ids) != sorted(CONDITION_IDS):
            raise ValueError(f"condition ids must be exactly {CONDITION_IDS}, got {ids}")

    def __getitem__(self, cid: str) -> Condition:
        for c in self.conditions:
            if c.id == cid:
                return c
        raise KeyError(cid)

    def status(self, cid: str) -> str:
        return self[cid].status

    def failing(self, ids=CONDITION_IDS) -> list[str]:
        return [c.id for c in self.conditions if c.id in ids and c.status == "fails"]

    def to_dict(self) -> dict:
        return {c.id: {"status": c.status, "evidence": c.evidence, **c.numbers} for c in self.conditions}


def _sre_parts(spec: ProcessSpec):
    """(y_law, is_sre_like): IID is the SRE with Y = 0."""
    if isinstance(spec, SRE):
        return spec.y_law, True
    if isinstance(spec, IID):
        return DiscreteLaw.constant(0.0), True
    if isinstance(spec, StochVol):
        return spec.base.y_law, False
    return None, False


def contraction_moments(y_law: DiscreteLaw, alpha: float) -> dict:
    return {eps: y_law.moment(alpha + eps) for eps in EPS_GRID}


def gamma_admissible(alpha: float, beta: float) -> tuple[bool, str]:
    """Growth rule for ``gamma_n = n**beta``.

    Partial sums over ``gamma_n`` vanish iff ``beta > 1/alpha`` for alpha < 2
    (alpha = 1 included, the log factor forces strictness); for alpha >= 2 both
    ``sqrt(n log n)`` and ``sqrt(n**(1+eps))`` are beaten iff ``beta > 1/2``.
    ``beta > 1/alpha`` also makes ``r_n`` diverge.
    """
    if alpha < 2:
        need = 1.0 / alpha
    else:
        need = 0.5
    ok = beta > need
    return ok, f"need beta > {need:g} for alpha={alpha:g}, got beta={beta:g}"


def validate_conditions(spec: ProcessSpec, gamma_exponent: float = 1.0) -> ConditionReport:
    law = spec.noise
    alpha = law.alpha
    out = []

    # H: mean zero when alpha > 1
    if alpha <= 1:
        out.append(Condition("H", "holds", "alpha <= 1, no centering needed"))
    elif law.has_zero_mean:
        how = "symmetric sign weight" if law.w == 0.5 else "centered by constant shift"
        out.append(Condition("H", "holds", f"E Z = 0 ({how})"))
    else:
        out.append(Condition("H", "fails", f"alpha={alpha:g} > 1 but E Z = {law.mean_uncentered:g} != 0"))

    # CC: moment conditions on the coefficients
    applicable = "CC1" if (alpha < 2 and alpha != 1) else ("CC15" if alpha in (1, 2) else "CC2")
    y_law, _ = _sre_parts(spec)
    if isinstance(spec, (MovingAverage, RandomCoefMA)):
        cc_status, cc_ev, nums = "holds", "finite coefficient support", {}
    elif isinstance(spec, IID):
        cc_status, cc_ev, nums = "holds", "single coefficient A_0 = 1", {}
    else:
        moms = contraction_moments(y_law, alpha)
        nums = {"E|Y|^(alpha+eps)": {str(k): v for k, v in moms.items()}}
        if min(moms.values()) < 1.0:
            eps = min(k for k, v in moms.items() if v < 1.0)
            cc_status, cc_ev = "holds", f"E|Y|^(alpha+{eps:g}) = {moms[eps]:.6g} < 1"
            if isinstance(spec, StochVol):
                cc_ev += "; V has finite support so E V^(alpha+eps) < inf"
        else:
            cc_status, cc_ev = "fails", "E|Y|^(alpha+eps) >= 1 on the whole eps grid"
    for cid in ("CC1", "CC15", "CC2"):
        if cid == applicable:
            out.append(Condition(cid, cc_status, cc_ev, nums))
        else:
            out.append(Condition(cid, "holds", f"not the applicable branch for alpha={alpha:g}"))

    ok, ev = gamma_admissible(alpha, gamma_exponent)
    out.append(Condition("GAMMA", "holds" if ok else "fails", ev, {"beta": gamma_exponent}))

    contraction = cc_status == "holds"
    finite_iid = isinstance(spec, (IID, MovingAverage, RandomCoefMA))
    symmetric_sre = (
        y_law is not None
        and not isinstance(spec, StochVol)
        and y_law.is_symmetric
        and law.w == 0.5
        and not law.centered
        and alpha < 2
        and contraction
    )

    if alpha < 1:
        out.append(Condition("SMALLJUMP", "holds", "alpha < 1"))
    elif finite_iid:
        out.append(Condition("SMALLJUMP", "holds", "finitely many i.i.d. coefficients"))
    elif symmetric_sre:
        out.append(Condition("SMALLJUMP", "holds", "symmetric SRE with alpha < 2 and contraction"))
    else:
        out.append(Condition("SMALLJUMP", "unknown", "no sufficient criterion applies"))

    if finite_iid:
        out.append(Condition("SUMA", "holds", "finite coefficient sums"))
    elif alpha <= 1 and contraction:
        out.append(Condition("SUMA", "holds", "alpha <= 1 with the moment conditions"))
    elif contraction:
        out.append(Condition("SUMA", "holds", "E|Y|^alpha < 1 bounds E(sum |A_jj|)^alpha"))
    else:
        out.append(Condition("SUMA", "unknown", "no contraction certificate"))

    if y_law is None or isinstance(spec, StochVol):
        out.append(Condition("SRE-SYM", "unknown", f"not an SRE ({spec.kind})"))
    elif symmetric_sre:
        out.append(Condition("SRE-SYM", "holds", "symmetric Y and Z, alpha < 2, E|Y|^(alpha+eps) < 1"))
    else:
        out.append(Condition("SRE-SYM", "fails", "SRE is not symmetric, alpha >= 2 or not contracting"))

    return ConditionReport(tuple(out))


def require_simulable(spec: ProcessSpec) -> ConditionReport:
    report = validate_conditions(spec, 2.0)
    bad = report.failing(("H", "CC1", "CC15", "CC2"))
    if bad:
        raise ConditionError("; ".join(f"{c}: {report[c].evidence}" for c in bad))
    return report


# ---------------------------------------------------------------- layout and simulation


def burn_in(spec: ProcessSpec) -> int:
    if isinstance(spec, StochVol):
        spec = spec.base
    if not isinstance(spec, SRE):
        return 0
    alpha = spec.noise.alpha
    rate = spec.y_law.moment(min(1.0, alpha))
    if rate >= 1.0:
        raise ConditionError(f"E|Y|^min(1,alpha) = {rate:g} >= 1, no geometric forgetting")
    if rate == 0.0:
        return 1000
    return max(1000, math.ceil((alpha + 50.0) / -math.log(rate)))


@dataclass(frozen=True)
class _Layout:
    """Noise window and output geometry for paths ``X_{1-prefix}..X_n``."""

    n: int
    prefix: int
    width: int   # number of noise variables
    start: int   # first kept column (SRE)


def _layout(spec: ProcessSpec, n: int, prefix: int) -> _Layout:
    length = n + prefix
    if isinstance(spec, IID):
        return _Layout(n, prefix, length, 0)
    if isinstance(spec, MovingAverage):
        return _Layout(n, prefix, length + len(spec.coeffs) - 1, 0)
    if isinstance(spec, RandomCoefMA):
        return _Layout(n, prefix, length + spec.coeff_law.span - 1, 0)
    b = burn_in(spec)
    if b < prefix:
        b = prefix
    return _Layout(n, prefix, b + n, b - prefix)


def _tilted_noise(law: RegVarLaw, u_mag, u_sign, u_pick, tilt_alpha: float, scheme: str):
    """Noise drawn under the tilted proposal plus the log likelihood ratio per row."""
    alpha = law.alpha
    nrep, width = u_mag.shape
    log_u = np.log(u_mag)
    if scheme == "product":
        z = law.u0 * np.exp(log_u * (-1.0 / tilt_alpha))
        # log f/g at each draw: log(alpha/beta) + (alpha-beta) * log(u) / beta
        logw = width * math.log(alpha / tilt_alpha) + (alpha - tilt_alpha) / tilt_alpha * np.cumsum(log_u, axis=1)[:, -1]
    elif scheme == "single":
        pick = np.minimum((u_pick * width).astype(np.int64), width - 1)
        rows = np.arange(nrep)
        z = noise_mod.magnitudes(u_mag, alpha, law.u0)
        z[rows, pick] = law.u0 * u_mag[rows, pick] ** (-1.0 / tilt_alpha)
        # proposal density ratio g/f of each coordinate at its realised value
        inv = np.full((nrep, width), 1.0 / alpha)
        inv[rows, pick] = 1.0 / tilt_alpha
        log_r = math.log(tilt_alpha / alpha) - (alpha - tilt_alpha) * log_u * inv
        top = log_r.max(axis=1)
        logw = -(top + np.log(np.mean(np.exp(log_r - top[:, None]), axis=1)))
    else:
        raise ValueError(f"unknown tilt scheme {scheme!r}")
    noise_mod.apply_sign(z, u_sign, law)
    return z, logw


def simulate_block(
    spec: ProcessSpec,
    rng: Stream,
    rep0: int,
    nrep: int,
    n: int,
    prefix: int = 0,
    tilt: tuple[float, str] | None = None,
    return_noise: bool = False,
):
    """Paths ``X_{1-prefix}..X_n`` for replications ``rep0..rep0+nrep-1``.

    Returns ``(x, logw, z)``: ``x`` has shape ``(nrep, n + prefix)``; ``logw`` is
    the log likelihood ratio per row (``None`` without ``tilt``); ``z`` is the
    driving noise window when ``return_noise`` is set.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    lay = _layout(spec, n, prefix)
    law = spec.noise
    k0, k1 = rng.key
    u_mag, u_sign = philox_uniforms(k0, k1, rep0, nrep, LANE_NOISE, 0, lay.width)
    logw = None
    if tilt is None or tilt[0] == law.alpha:
        z = noise_mod.from_uniforms(law, u_mag, u_sign)
        if tilt is not None:
            logw = np.zeros(nrep)
    else:
        u_pick = philox_uniforms(k0, k1, rep0, nrep, LANE_AUX, 0, 1)[0][:, 0]
        z, logw = _tilted_noise(law, u_mag, u_sign, u_pick, tilt[0], tilt[1])
    del u_mag, u_sign
    x = _apply_coefficients(spec, z, lay, k0, k1, rep0, nrep)
    return x, logw, (z if return_noise else None)


def _apply_coefficients(spec, z, lay: _Layout, k0, k1, rep0, nrep):
    length = lay.n + lay.prefix
    if isinstance(spec, IID):
        return z
    if isinstance(spec, MovingAverage):
        return kernels.linear_paths(z, np.asarray([spec.coeffs]))
    if isinstance(spec, RandomCoefMA):
        law = spec.coeff_law
        u = philox_uniforms(k0, k1, rep0, nrep, LANE_COEF, 0, length)[0]
        idx = law.quantile(u).astype(np.int64)
        return kernels.linear_paths(z, np.asarray(law.vectors), idx)
    base = spec.base if isinstance(spec, StochVol) else spec
    if base.y_law.is_constant:
        x = kernels.sre_paths(z, None, base.y_law.sole_value, lay.start)
    else:
        u = philox_uniforms(k0, k1, rep0, nrep, LANE_COEF, 0, lay.width)[0]
        x = kernels.sre_paths(z, base.y_law.quantile(u), 0.0, lay.start)
    if isinstance(spec, StochVol):
        u = philox_uniforms(k0, k1, rep0, nrep, LANE_VOL, 0, length)[0]
        x = x * spec.v_law.quantile(u)
    return x


def simulate_path(
    spec: ProcessSpec,
    n: int,
    rng: Stream,
    return_noise: bool = False,
    rep: int = 0,
    prefix: int = 0,
):
    """One stationary path ``X_{1-prefix}..X_n`` (replication ``rep`` of ``rng``)."""
    require_simulable(spec)
    x, _, z = simulate_block(spec, rng, rep, 1, n, prefix=prefix, return_noise=return_noise)
    if return_noise:
        return x[0], z[0]
    return x[0]


def filter_noise(spec: ProcessSpec, z: np.ndarray, n: int, prefix: int = 0, y: np.ndarray | None = None):
    """Apply the coefficient recursion to a given noise window (deterministic hook).

    ``z`` must have the window width of ``spec`` for ``n`` and ``prefix``; for a
    random-``Y`` SRE pass ``y`` of the same width.
    """
    lay = _layout(spec, n, prefix)
    z = np.atleast_2d(np.asarray(z, dtype=np.float64))
    if z.shape[1] != lay.width:
        raise ValueError(f"noise window must have width {lay.width}, got {z.shape[1]}")
    if isinstance(spec, IID):
        return z[0].copy()
    if isinstance(spec, MovingAverage):
        return kernels.linear_paths(z, np.asarray([spec.coeffs]))[0]
    if isinstance(spec, SRE):
        if y is None:
            return kernels.sre_paths(z, None, spec.y_law.sole_value, lay.start)[0]
        return kernels.sre_paths(z, np.atleast_2d(np.asarray(y, dtype=np.float64)), 0.0, lay.start)[0]
    raise TypeError(f"filter_noise does not support {spec.kind}")


def noise_width(spec: ProcessSpec, n: int, prefix: int = 0) -> int:
    return _layout(spec, n, prefix).width


# ---------------------------------------------------------------- coefficient diagonals


def default_depth(spec: ProcessSpec) -> int:
    if isinstance(spec, IID):
        return 0
    if isinstance(spec, MovingAverage):
        return max(abs(spec.jmin), abs(spec.jmax))
    if isinstance(spec, RandomCoefMA):
        return max(abs(spec.coeff_law.jmin), abs(spec.coeff_law.jmax))
    base = spec.base if isinstance(spec, StochVol) else spec
    m = base.y_law.moment(1.0)
    if m == 0.0:
        return 1
    if m >= 1.0:
        raise ConditionError(f"E|Y| = {m:g} >= 1; truncation depth undefined")
    depth = max(1, math.ceil(math.log(1e-8) / math.log(m)))
    while m**depth >= 1e-8:
        depth += 1
    return depth


def coeff_diagonals(spec: ProcessSpec, depth: int, rng: Stream, rep0: int, nrep: int) -> np.ndarray:
    """Rows of ``A_{j,j}`` for ``j = -depth..depth`` (column ``j + depth``)."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    width = 2 * depth + 1
    out = np.zeros((nrep, width))
    k0, k1 = rng.key
    if isinstance(spec, IID):
        out[:, depth] = 1.0
        return out
    if isinstance(spec, MovingAverage):
        for jj, a in enumerate(spec.coeffs):
            j = spec.jmin + jj
            if -depth <= j <= depth:
                out[:, j + depth] = a
        return out
    if isinstance(spec, RandomCoefMA):
        law = spec.coeff_law
        u = philox_uniforms(k0, k1, rep0, nrep, LANE_COEF, 0, width)[0]
        idx = law.quantile(u)
        vecs = np.asarray(law.vectors)
        for j in range(max(-depth, law.jmin), min(depth, law.jmax) + 1):
            out[:, j + depth] = vecs[idx[:, j + depth], j - law.jmin]
        return out
    base = spec.base if isinstance(spec, StochVol) else spec
    out[:, depth] = 1.0
    if depth > 0:
        if base.y_law.is_constant:
            y = np.full((nrep, depth), base.y_law.sole_value)
        else:
            y = base.y_law.quantile(philox_uniforms(k0, k1, rep0, nrep, LANE_COEF, 0, depth)[0])
        out[:, depth + 1:] = np.cumprod(y, axis=1)
    if isinstance(spec, StochVol):
        v = spec.v_law.quantile(philox_uniforms(k0, k1, rep0, nrep, LANE_VOL, 0, width)[0])
        out *= v
    return out


def coeff_sequence_sample(spec: ProcessSpec, depth: int, rng: Stream, rep: int = 0) -> np.ndarray:
    """``A_{j,j}`` for ``|j| <= depth``; index ``depth`` holds ``A_{0,0}``."""
    return coeff_diagonals(spec, depth, rng, rep, 1)[0]
