"""Large-deviation point processes ``N_n^q``, annulus test functionals and the limit measure.

Points of ``N_n^q`` are ``(k/n, X_k/gamma_n, ..., X_{k-q}/gamma_n)``. The limit
``m^q`` is the push-forward of ``Leb x mu`` under
``(t, z) -> sum_j delta(t, A_jj z, ..., A_{j-q,j-q} z)``; :func:`limit_F_mc`
samples it with ``mu`` restricted to ``|z| > rho``.
"""

from __future__ import annotations

import io
import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import kernels, noise as noise_mod, process
from .noise import RegVarLaw
from .process import ProcessSpec
from .rng import LANE_NOISE, LANE_TIME, Stream
from .stats import Estimate, chunk_plan, map_chunks, mean_stderr


class PlanError(ValueError):
    """The growth exponent of ``gamma_n`` is not admissible."""


class SupportError(ValueError):
    """A test function reaches into the region discarded by the storage floor."""


# ---------------------------------------------------------------- normalization


@dataclass(frozen=True)
class NormalizationPlan:
    n: int
    beta: float
    gamma_n: float
    r_n: float


def make_plan(n: int, beta: float, noise: RegVarLaw, check: bool = True) -> NormalizationPlan:
    """``gamma_n = n**beta`` and ``r_n = 1/(n P(|Z| > gamma_n))``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if check:
        ok, why = process.gamma_admissible(noise.alpha, beta)
        if not ok:
            raise PlanError(why)
    gamma = float(n) ** beta
    return NormalizationPlan(int(n), float(beta), gamma, 1.0 / (n * noise_mod.tail(noise, gamma)))


# ---------------------------------------------------------------- test functions


@dataclass(frozen=True)
class AnnulusTestFn:
    """``h * ramp(|x|; a, b) * ramp(t; s0, s1)``.

    With ``timed=False`` the time factor is dropped (constant 1 on [0, 1]).
    """

    a: float
    b: float
    s0: float = 0.0
    s1: float = 1.0
    h: float = 1.0
    timed: bool = True

    def __post_init__(self):
        if not (self.a > 0 and self.b > self.a):
            raise ValueError(f"need 0 < a < b, got a={self.a}, b={self.b}")
        if not (0.0 <= self.s0 < self.s1 <= 1.0):
            raise ValueError(f"time window must satisfy 0 <= s0 < s1 <= 1, got [{self.s0}, {self.s1}]")
        if not self.h > 0:
            raise ValueError("height must be positive")

    def __call__(self, t, norm):
        val = self.h * kernels.ramp(norm, self.a, self.b)
        if self.timed:
            val = val * kernels.ramp(t, self.s0, self.s1)
        return val

    @property
    def lipschitz(self) -> float:
        """Lipschitz constant in ``(t, x)`` (sum of the two slopes)."""
        c = 4.0 * self.h / (self.b - self.a)
        if self.timed:
            c += 4.0 * self.h / (self.s1 - self.s0)
        return c

    def pack(self) -> list[float]:
        return [self.a, self.b, self.s0, self.s1, self.h, 1.0 if self.timed else 0.0]


def pack_fns(fns: Sequence[AnnulusTestFn]) -> np.ndarray:
    return np.asarray([g.pack() for g in fns], dtype=np.float64).reshape(-1, 6)


def F_from_sums(s1, s2, eps1: float, eps2: float):
    """``(1 - exp(-(s1 - eps1)+)) (1 - exp(-(s2 - eps2)+))``."""
    return -np.expm1(-np.maximum(s1 - eps1, 0.0)) * -np.expm1(-np.maximum(s2 - eps2, 0.0))


# ---------------------------------------------------------------- point measures


@dataclass(frozen=True)
class PointMeasure:
    """Finite point measure; row ``i`` of ``points`` is ``(t, x_0, ..., x_q)``."""

    q: int
    floor_tau: float
    points: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.q < 0:
            raise ValueError("q must be >= 0")
        if not self.floor_tau > 0:
            raise ValueError("floor_tau must be positive")
        pts = np.asarray(self.points, dtype=np.float64).reshape(-1, self.q + 2)
        if pts.size:
            t = pts[:, 0]
            if np.any((t < 0) | (t > 1)):
                raise ValueError("time stamps must lie in [0, 1]")
            if np.any(np.abs(pts[:, 1:]).max(axis=1) <= self.floor_tau):
                raise ValueError("stored points must exceed the floor")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def times(self) -> np.ndarray:
        return self.points[:, 0]

    @property
    def norms(self) -> np.ndarray:
        return np.sqrt(np.sum(self.points[:, 1:] ** 2, axis=1))

    def integrate(self, g: AnnulusTestFn) -> float:
        """``xi(g) = sum over points of g(t, |x|)``."""
        if not len(self):
            return 0.0
        return math.fsum(g(self.times, self.norms))

    def __eq__(self, other):
        if not isinstance(other, PointMeasure):
            return NotImplemented
        return (
            self.q == other.q
            and self.floor_tau == other.floor_tau
            and self.points.shape == other.points.shape
            and bool(np.all(self.points.view(np.uint64) == other.points.view(np.uint64)))
        )

    __hash__ = None

    # serialization; 17 significant digits round-trip every double
    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(["t"] + [f"x{i}" for i in range(self.q + 1)]) + "\n")
        for row in self.points:
            buf.write(",".join("%.17g" % v for v in row) + "\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, floor_tau: float) -> "PointMeasure":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        header = lines[0].split(",")
        if header[0] != "t" or len(header) < 2:
            raise ValueError("CSV header must be t,x0,...,xq")
        q = len(header) - 2
        rows = [[float(v) for v in ln.split(",")] for ln in lines[1:]]
        return cls(q, floor_tau, np.asarray(rows, dtype=np.float64).reshape(-1, q + 2))

    def to_json(self) -> str:
        return json.dumps({"q": self.q, "floor": self.floor_tau, "points": self.points.tolist()})

    @classmethod
    def from_json(cls, text: str) -> "PointMeasure":
        doc = json.loads(text)
        q = int(doc["q"])
        return cls(q, float(doc["floor"]), np.asarray(doc["points"], dtype=np.float64).reshape(-1, q + 2))


def null_measure(q: int = 0, floor_tau: float = 0.05) -> PointMeasure:
    return PointMeasure(q, floor_tau, np.empty((0, q + 2)))


def build_point_measure(path, plan: NormalizationPlan, q: int, floor_tau: float) -> PointMeasure:
    """Points of ``N_n^q`` from ``path = (X_{1-q}, ..., X_n)`` above ``floor_tau``."""
    x = np.asarray(path, dtype=np.float64)
    if q < 0:
        raise ValueError("q must be >= 0")
    if x.ndim != 1 or x.shape[0] != plan.n + q:
        raise ValueError(f"path must hold X_(1-q)..X_n: expected {plan.n + q} values, got {x.shape}")
    n = plan.n
    lags = np.stack([x[q - lag:q - lag + n] for lag in range(q + 1)], axis=1) / plan.gamma_n
    keep = np.abs(lags).max(axis=1) > floor_tau
    t = np.arange(1, n + 1, dtype=np.float64) / n
    pts = np.column_stack([t[keep], lags[keep]])
    return PointMeasure(q, floor_tau, pts)


def eval_F(xi: PointMeasure, g1: AnnulusTestFn, g2: AnnulusTestFn, eps1: float, eps2: float) -> float:
    if not (eps1 > 0 and eps2 > 0):
        raise ValueError("eps1 and eps2 must be positive")
    if min(g1.a, g2.a) <= xi.floor_tau:
        raise SupportError(f"test function support reaches the floor {xi.floor_tau}")
    return float(F_from_sums(xi.integrate(g1), xi.integrate(g2), eps1, eps2))


def metric_family(depth: int) -> list[AnnulusTestFn]:
    return [AnnulusTestFn(1.0 / m, 2.0 / m, timed=False) for m in range(1, depth + 1)]


def metric_d(xi: PointMeasure, eta: PointMeasure, family_depth: int = 20) -> float:
    """``sum_i 2^-i |xi(h_i) - eta(h_i)| / (1 + |...|)`` over annuli ``(1/i, 2/i)``."""
    if xi.q != eta.q:
        raise ValueError("measures must share q")
    terms = []
    for i, h in enumerate(metric_family(family_depth), start=1):
        diff = abs(xi.integrate(h) - eta.integrate(h))
        terms.append(2.0**-i * diff / (1.0 + diff))
    return math.fsum(terms)


# ---------------------------------------------------------------- limit measure sampler


def _unit_norms(diag: np.ndarray, depth: int, q: int) -> np.ndarray:
    """Norms of ``(A_jj, ..., A_{j-q,j-q})`` for ``j = -depth..depth+q``."""
    nrep, width = diag.shape
    pad = np.zeros((nrep, width + 2 * q))
    pad[:, q:q + width] = diag
    npts = width + q
    sq = np.zeros((nrep, npts))
    for lag in range(q + 1):
        # point j sits at column j + depth; its lag-l coordinate is pad column j - l + depth + q
        sq += pad[:, q - lag:q - lag + npts] ** 2
    return np.sqrt(sq)


def default_rho(spec: ProcessSpec, min_a: float, depth: int, rng: Stream, pilot: int = 10_000) -> float:
    if process.is_deterministic(spec):
        top = float(np.abs(process.coeff_diagonals(spec, depth, rng, 0, 1)).max())
    else:
        diag = process.coeff_diagonals(spec, depth, rng.child(0x5EED), 0, pilot)
        top = float(np.quantile(np.abs(diag).max(axis=1), 0.999))
    if top <= 0.0:
        raise ValueError("coefficient diagonal is identically zero")
    return 0.5 * min_a / top


def _check_depth(spec: ProcessSpec, depth: int):
    if isinstance(spec, (process.IID, process.MovingAverage, process.RandomCoefMA)):
        need = process.default_depth(spec)
        if depth < need:
            raise ValueError(f"depth {depth} cuts the coefficient support (needs {need})")


def limit_F_battery(
    spec: ProcessSpec,
    q: int,
    triples: Sequence[tuple],
    reps: int,
    rng: Stream,
    rho: float | None = None,
    depth: int | None = None,
    workers: int = 1,
) -> list[Estimate]:
    """``m^q(F)`` for several ``(g1, g2, eps1, eps2)`` from one set of draws."""
    if reps < 1:
        raise ValueError("reps must be >= 1")
    if q < 0:
        raise ValueError("q must be >= 0")
    depth = process.default_depth(spec) if depth is None else int(depth)
    _check_depth(spec, depth)
    min_a = min(min(g1.a, g2.a) for g1, g2, _, _ in triples)
    if rho is None:
        rho = default_rho(spec, min_a, depth, rng)
    if not rho > 0:
        raise ValueError("rho must be positive")
    law = spec.noise
    alpha = law.alpha
    fns = [g for g1, g2, _, _ in triples for g in (g1, g2)]
    k0, k1 = rng.key

    def work(rep0, nrep):
        u_t = rng.uniforms(rep0, nrep, LANE_TIME, 0, 1)[0][:, 0]
        u_mag, u_sign = rng.uniforms(rep0, nrep, LANE_NOISE, 0, 1)
        zabs = rho * u_mag[:, 0] ** (-1.0 / alpha)
        unit = _unit_norms(process.coeff_diagonals(spec, depth, rng, rep0, nrep), depth, q)
        norms = zabs[:, None] * unit
        reach = rho * unit.max(axis=1)
        sums = np.empty((nrep, len(fns)))
        for i, g in enumerate(fns):
            sums[:, i] = np.sum(g(u_t[:, None], norms), axis=1)
        fvals = np.empty((nrep, len(triples)))
        for i, (_, _, e1, e2) in enumerate(triples):
            fvals[:, i] = F_from_sums(sums[:, 2 * i], sums[:, 2 * i + 1], e1, e2)
        return fvals, int(np.count_nonzero(reach >= min_a))

    width = (2 * depth + 1 + q) * (len(fns) + 4)
    parts = map_chunks(work, chunk_plan(reps, width), workers)
    fvals = np.concatenate([p[0] for p in parts])
    violations = sum(p[1] for p in parts)
    if violations:
        warnings.warn(f"rho={rho:g}: {violations} draws place mass below rho inside a test-function support")
    scale = rho**-alpha
    out = []
    for i in range(len(triples)):
        m, se = mean_stderr(fvals[:, i])
        meta = {
            "rho": rho,
            "depth": depth,
            "q": q,
            "rho_violations": violations,
            "degenerate": bool(not np.any(fvals[:, i] > 0)),
        }
        out.append(Estimate(scale * m, scale * se if reps > 1 else math.nan, reps, "raw", meta))
    return out


def limit_F_mc(
    spec: ProcessSpec,
    q: int,
    g1: AnnulusTestFn,
    g2: AnnulusTestFn,
    eps1: float,
    eps2: float,
    rho: float | None = None,
    depth: int | None = None,
    reps: int = 100_000,
    rng: Stream | None = None,
    workers: int = 1,
) -> Estimate:
    """Monte Carlo value of ``m^q(F_{g1,g2,eps1,eps2})``."""
    rng = Stream(0) if rng is None else rng
    return limit_F_battery(spec, q, [(g1, g2, eps1, eps2)], reps, rng, rho, depth, workers)[0]


# ---------------------------------------------------------------- pre-asymptotic side


def empirical_F_battery(
    spec: ProcessSpec,
    plan: NormalizationPlan,
    qs: Sequence[int],
    triples: Sequence[tuple],
    reps: int,
    rng: Stream,
    floor_tau: float | None = None,
    workers: int = 1,
) -> dict[tuple[int, int], Estimate]:
    """``r_n E F(N_n^q)`` for every ``q`` in ``qs`` and every triple, sharing paths.

    Keys of the result are ``(q, triple_index)``.
    """
    if reps < 1:
        raise ValueError("reps must be >= 1")
    qs = sorted(set(int(q) for q in qs))
    if qs[0] < 0:
        raise ValueError("q must be >= 0")
    qmax = qs[-1]
    fns = [g for g1, g2, _, _ in triples for g in (g1, g2)]
    min_a = min(g.a for g in fns)
    floor = 0.05 * min_a if floor_tau is None else floor_tau
    if min_a <= floor:
        raise SupportError("test function support reaches the storage floor")
    table = pack_fns(fns)
    process.require_simulable(spec)

    def work(rep0, nrep):
        x, _, _ = process.simulate_block(spec, rng, rep0, nrep, plan.n, prefix=qmax)
        out = {}
        for q in qs:
            sums = kernels.fn_sums(x[:, qmax - q:], q, plan.gamma_n, table, floor)
            for i, (_, _, e1, e2) in enumerate(triples):
                out[q, i] = F_from_sums(sums[:, 2 * i], sums[:, 2 * i + 1], e1, e2)
        return out

    parts = map_chunks(work, chunk_plan(reps, process.noise_width(spec, plan.n, qmax)), workers)
    result = {}
    for q in qs:
        for i in range(len(triples)):
            v = np.concatenate([p[q, i] for p in parts])
            m, se = mean_stderr(v)
            meta = {"q": q, "n": plan.n, "r_n": plan.r_n, "degenerate": bool(not np.any(v > 0))}
            result[q, i] = Estimate(plan.r_n * m, plan.r_n * se if reps > 1 else math.nan, reps, "by_nPZ", meta)
    return result


def empirical_F_mc(
    spec: ProcessSpec,
    plan: NormalizationPlan,
    q: int,
    g1: AnnulusTestFn,
    g2: AnnulusTestFn,
    eps1: float,
    eps2: float,
    reps: int,
    rng: Stream,
    floor_tau: float | None = None,
    workers: int = 1,
) -> Estimate:
    """``m_n^q(F) = r_n E F(N_n^q)`` by brute force."""
    return empirical_F_battery(spec, plan, [q], [(g1, g2, eps1, eps2)], reps, rng, floor_tau, workers)[q, 0]
