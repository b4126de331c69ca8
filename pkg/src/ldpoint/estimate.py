"""Monte Carlo estimates of normalized rare-event probabilities.

Indicator events are counted as integers and normalized once at the end.
Tilted runs carry per-replication likelihood ratios and report batch-means
standard errors. Several events can share one set of simulated paths through
:func:`estimate_events`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, NamedTuple

import numpy as np
from scipy import integrate

from . import kernels, noise as noise_mod, process
from .pointproc import NormalizationPlan
from .process import IID, ProcessSpec
from .rng import Stream
from .stats import Estimate, batch_means, chunk_plan, from_counts, map_chunks, mean_stderr

DEFAULT_BATCHES = 100


# ---------------------------------------------------------------- events


@dataclass(frozen=True)
class OrderStats:
    """``X_(1:n) > gamma_n u_1, ..., X_(q:n) > gamma_n u_q``."""

    u: tuple
    kind = "order_stats"

    def __post_init__(self):
        u = tuple(float(v) for v in np.atleast_1d(self.u))
        if not u or min(u) <= 0:
            raise ValueError("order-statistic thresholds must be positive")
        object.__setattr__(self, "u", u)

    def length(self, n: int) -> int:
        return n


@dataclass(frozen=True)
class Hitting:
    """First exceedance of ``a gamma_n`` happens by time ``lam n``."""

    lam: float
    a: float
    kind = "hitting"

    def __post_init__(self):
        if self.lam < 0 or not self.a > 0:
            raise ValueError("need lam >= 0 and a > 0")

    def length(self, n: int) -> int:
        return int(math.floor(self.lam * n))


@dataclass(frozen=True)
class PartialSum:
    """``S_n > rho gamma_n``; ``absolute`` sums ``|X_k|`` (centered when alpha > 1 and beta = 1)."""

    rho: float
    absolute: bool = False
    kind = "partial_sum"

    def __post_init__(self):
        if not self.rho > 0:
            raise ValueError("rho must be positive")

    def length(self, n: int) -> int:
        return n


Event = OrderStats | Hitting | PartialSum


def mean_abs_x(spec: ProcessSpec, rng: Stream, paths: int = 100, length: int = 100_000) -> float:
    """E|X_0| from an auxiliary stream (stationary paths, compensated sum)."""
    total = []
    for r0, nr in chunk_plan(paths, process.noise_width(spec, length)):
        x, _, _ = process.simulate_block(spec, rng, r0, nr, length)
        total.append(math.fsum(np.abs(x).ravel()))
    return math.fsum(total) / (paths * length)


def _centering(spec: ProcessSpec, plan: NormalizationPlan, event: PartialSum, rng: Stream) -> float:
    if event.absolute and spec.noise.alpha > 1 and plan.beta == 1.0:
        return plan.n * mean_abs_x(spec, rng.child(0xABC))
    return 0.0


def _hit_fn(event, spec, plan: NormalizationPlan, rng: Stream):
    """Vectorized indicator ``x -> bool[rows]`` on paths ``X_1..X_L``."""
    g = plan.gamma_n
    if isinstance(event, OrderStats):
        thr = g * np.asarray(event.u)
        need = np.arange(1, len(event.u) + 1)
        n = plan.n
        return lambda x: np.all(kernels.exceed_counts(x[:, :n], thr) >= need, axis=1)
    if isinstance(event, Hitting):
        m = event.length(plan.n)
        return lambda x: kernels.exceed_counts(x[:, :m], [event.a * g])[:, 0] >= 1
    if isinstance(event, PartialSum):
        center = _centering(spec, plan, event, rng)
        n = plan.n
        return lambda x: kernels.row_sums(x[:, :n], event.absolute) - center > event.rho * g
    raise TypeError(f"unknown event {event!r}")


def estimate_events(
    spec: ProcessSpec,
    plan: NormalizationPlan,
    events: Mapping[str, Event],
    reps: int,
    rng: Stream,
    workers: int = 1,
    tilt: tuple[float, str] | None = None,
    batches: int = DEFAULT_BATCHES,
) -> dict[str, Estimate]:
    """``r_n P(event)`` for every named event, all read off the same paths."""
    if reps < 1:
        raise ValueError("reps must be >= 1")
    process.require_simulable(spec)
    if tilt is not None and reps < batches:
        raise ValueError(f"tilted runs need reps >= {batches} for batch means")
    live = {k: e for k, e in events.items() if e.length(plan.n) > 0}
    out: dict[str, Estimate] = {}
    for k, e in events.items():
        if k not in live:
            out[k] = Estimate(0.0, 0.0, reps, "by_nPZ", {"empty_window": True})
    if not live:
        return out
    length = max(e.length(plan.n) for e in live.values())
    hit_fns = {k: _hit_fn(e, spec, plan, rng) for k, e in live.items()}

    def work(rep0, nrep):
        x, logw, _ = process.simulate_block(spec, rng, rep0, nrep, length, tilt=tilt)
        if tilt is None:
            return {k: int(np.count_nonzero(f(x))) for k, f in hit_fns.items()}
        if np.max(logw) > 700.0:
            raise FloatingPointError("likelihood ratio overflows; lower the tilt")
        wts = np.exp(logw)
        out = {k: np.where(f(x), wts, 0.0) for k, f in hit_fns.items()}
        out[None] = float(np.max(logw))
        return out

    parts = map_chunks(work, chunk_plan(reps, process.noise_width(spec, length)), workers)
    for k in live:
        if tilt is None:
            hits = sum(p[k] for p in parts)
            out[k] = from_counts(hits, reps, plan.r_n, "by_nPZ", n=plan.n)
        else:
            vals = np.concatenate([p[k] for p in parts])
            m, se = batch_means(vals, batches)
            meta = {"n": plan.n, "tilt_alpha": tilt[0], "scheme": tilt[1], "batches": batches,
                    "nonzero": int(np.count_nonzero(vals)), "max_logw": max(p[None] for p in parts)}
            out[k] = Estimate(plan.r_n * m, plan.r_n * se, reps, "by_nPZ", meta)
    return out


def estimate_order_stats(spec, plan, u, reps, rng, workers: int = 1) -> Estimate:
    if not spec.nonnegative_coeffs:
        raise ValueError("order-statistic limits need nonnegative coefficients")
    return estimate_events(spec, plan, {"e": OrderStats(tuple(np.atleast_1d(u)))}, reps, rng, workers)["e"]


def estimate_hitting(spec, plan, lam, a, reps, rng, workers: int = 1) -> Estimate:
    return estimate_events(spec, plan, {"e": Hitting(lam, a)}, reps, rng, workers)["e"]


def estimate_partial_sum(spec, plan, rho, absolute, reps, rng, workers: int = 1) -> Estimate:
    return estimate_events(spec, plan, {"e": PartialSum(rho, absolute)}, reps, rng, workers)["e"]


def tilted_estimator(
    spec: ProcessSpec,
    plan: NormalizationPlan,
    event: Event,
    tilt_alpha: float | None = None,
    reps: int = 10_000,
    rng: Stream | None = None,
    scheme: str = "single",
    batches: int = DEFAULT_BATCHES,
    workers: int = 1,
) -> Estimate:
    """Importance-sampled ``r_n P(event)`` with noise drawn at tail index ``tilt_alpha``.

    ``scheme='single'`` tilts one uniformly chosen noise variable per path (a
    mixture proposal with bounded weights); ``'product'`` tilts every variable.
    """
    alpha = spec.noise.alpha
    tilt_alpha = alpha / 2 if tilt_alpha is None else float(tilt_alpha)
    if not 0 < tilt_alpha <= alpha:
        raise ValueError("tilt_alpha must lie in (0, alpha]")
    if scheme not in ("single", "product"):
        raise ValueError(f"unknown tilt scheme {scheme!r}")
    rng = Stream(0) if rng is None else rng
    return estimate_events(spec, plan, {"e": event}, reps, rng, workers, (tilt_alpha, scheme), batches)["e"]


# ---------------------------------------------------------------- marginal tail and ruin


def estimate_marginal_tail(
    spec: ProcessSpec,
    x: float,
    reps: int,
    length: int,
    rng: Stream,
    side: str = "positive",
    workers: int = 1,
) -> Estimate:
    """``P(X > x)/P(|Z| > x)`` (``side='negative'``: ``P(X < -x)``) from ``reps`` paths of ``length``.

    The standard error comes from the spread of per-path frequencies, so
    serial dependence within a path is accounted for.
    """
    if not x > 0:
        raise ValueError("x must be positive")
    if reps < 2:
        raise ValueError("need at least two paths for a standard error")
    process.require_simulable(spec)
    sign = {"positive": 1.0, "negative": -1.0}[side]

    def work(rep0, nrep):
        xs, _, _ = process.simulate_block(spec, rng, rep0, nrep, length)
        return kernels.exceed_counts(sign * xs, [x])[:, 0]

    counts = np.concatenate(map_chunks(work, chunk_plan(reps, process.noise_width(spec, length)), workers))
    m, se = mean_stderr(counts / length)
    pz = noise_mod.tail(spec.noise, x)
    meta = {"x": x, "side": side, "length": length, "hits": int(counts.sum())}
    return Estimate(m / pz, se / pz, reps, "by_PZ", meta)


def estimate_ruin(
    spec: ProcessSpec,
    u: float,
    c: float,
    horizon_M: int = 20,
    reps: int = 100_000,
    rng: Stream | None = None,
    workers: int = 1,
) -> Estimate:
    """``P(max_{k <= M u}(S_k - c k) > u) / (u P(|Z| > u))`` with a 2M sensitivity run.

    Both horizons are read off the same paths of length ``2 ceil(M u)``.
    """
    if spec.noise.alpha <= 1:
        raise ValueError("ruin estimates need alpha > 1")
    if not (u > 0 and c > 0 and horizon_M >= 1):
        raise ValueError("need u > 0, c > 0 and M >= 1")
    report = process.require_simulable(spec)
    if report.status("H") != "holds":
        raise process.ConditionError("ruin needs E Z = 0")
    rng = Stream(0) if rng is None else rng
    h1 = math.ceil(horizon_M * u)
    h2 = math.ceil(2 * horizon_M * u)

    def work(rep0, nrep):
        x, _, _ = process.simulate_block(spec, rng, rep0, nrep, h2)
        best = kernels.drift_max(x, c, [h1, h2])
        return np.count_nonzero(best > u, axis=0)

    parts = map_chunks(work, chunk_plan(reps, process.noise_width(spec, h2)), workers)
    hits1 = int(sum(int(p[0]) for p in parts))
    hits2 = int(sum(int(p[1]) for p in parts))
    scale = 1.0 / (u * noise_mod.tail(spec.noise, u))
    e1 = from_counts(hits1, reps, scale, "by_uPZ")
    e2 = from_counts(hits2, reps, scale, "by_uPZ")
    combined = math.hypot(e1.stderr, e2.stderr)
    meta = {
        "u": u,
        "c": c,
        "M": horizon_M,
        "horizon": h1,
        "hits": hits1,
        "value_2M": e2.value,
        "stderr_2M": e2.stderr,
        "hits_2M": hits2,
        "horizon_stable": bool(abs(e2.value - e1.value) <= 2.0 * combined),
    }
    return Estimate(e1.value, e1.stderr, reps, "by_uPZ", meta)


# ---------------------------------------------------------------- small-n exact oracle and raw MC


class OracleValue(NamedTuple):
    value: float
    abserr: float


def oracle_exact(spec: ProcessSpec, n: int, event: str, s: float, quadrature_points: int = 200) -> OracleValue:
    """``P(max(Z_1..Z_n) > s)`` or ``P(Z_1 + ... + Z_n > s)`` for ``n`` in {1, 2} by quadrature.

    Integrates the two-sided Pareto convolution over the magnitude of ``Z_1``
    after the substitution ``v = (r/u0)^-alpha``; kinks of the inner tail
    are passed to the integrator as break points.
    """
    if not isinstance(spec, IID):
        raise TypeError("the exact oracle covers i.i.d. noise only")
    if n not in (1, 2):
        raise ValueError("n must be 1 or 2")
    if event not in ("max", "sum"):
        raise ValueError("event must be 'max' or 'sum'")
    law = spec.noise
    G = lambda x: noise_mod.prob_greater(law, x)  # noqa: E731
    if n == 1:
        return OracleValue(G(s), 0.0)
    if event == "max":
        return OracleValue(1.0 - (1.0 - G(s)) ** 2, 0.0)
    alpha, w, u0, sh = law.alpha, law.w, law.u0, law.shift

    def f(v):
        r = u0 * v ** (-1.0 / alpha)
        return w * G(s + sh - r) + (1.0 - w) * G(s + sh + r)

    breaks = []
    for r in (s + 2 * sh - u0, s + 2 * sh + u0, -s - 2 * sh - u0, -s - 2 * sh + u0):
        if r > u0:
            breaks.append((r / u0) ** -alpha)
    val, err = integrate.quad(
        f, 0.0, 1.0, points=sorted(breaks) or None, limit=quadrature_points, epsabs=1e-14, epsrel=1e-12
    )
    return OracleValue(val, err)


def estimate_exceedance(spec: ProcessSpec, n: int, event: str, s: float, reps: int, rng: Stream, workers: int = 1) -> Estimate:
    """Plain Monte Carlo ``P(max_k X_k > s)`` or ``P(S_n > s)`` (raw probability)."""
    if event not in ("max", "sum"):
        raise ValueError("event must be 'max' or 'sum'")
    if reps < 1:
        raise ValueError("reps must be >= 1")
    process.require_simulable(spec)

    def work(rep0, nrep):
        x, _, _ = process.simulate_block(spec, rng, rep0, nrep, n)
        if event == "max":
            return int(np.count_nonzero(kernels.exceed_counts(x, [s])[:, 0]))
        return int(np.count_nonzero(kernels.row_sums(x) > s))

    hits = sum(map_chunks(work, chunk_plan(reps, process.noise_width(spec, n)), workers))
    return from_counts(hits, reps, 1.0, "raw", n=n, s=s, event=event)
