"""Monte Carlo bookkeeping: estimates, exact reductions, chunked replication maps."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

NORMALIZATIONS = ("raw", "by_nPZ", "by_uPZ", "by_PZ")

# elements per simulated block; fixed so results never depend on worker count
CHUNK_ELEMS = 1 << 16


@dataclass(frozen=True)
class Estimate:
    value: float
    stderr: float
    reps: int
    normalization: str = "raw"
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.normalization not in NORMALIZATIONS:
            raise ValueError(f"unknown normalization {self.normalization!r}")

    @property
    def ci95(self) -> tuple[float, float]:
        return (self.value - 1.96 * self.stderr, self.value + 1.96 * self.stderr)

    def z(self, theory: float) -> float:
        if self.stderr == 0.0:
            return 0.0 if self.value == theory else math.copysign(math.inf, self.value - theory)
        return (self.value - theory) / self.stderr

    def to_dict(self) -> dict:
        lo, hi = self.ci95
        out = {
            "value": self.value,
            "stderr": self.stderr,
            "ci95": [lo, hi],
            "reps": self.reps,
            "normalization": self.normalization,
        }
        if self.meta:
            out["meta"] = self.meta
        return out


def from_counts(hits: int, reps: int, scale: float = 1.0, normalization: str = "raw", **meta) -> Estimate:
    """Binomial proportion times ``scale``, divided exactly and rounded once."""
    if reps < 1:
        raise ValueError("reps must be >= 1")
    p = Fraction(int(hits), int(reps))
    s = Fraction(scale)
    value = float(p * s)
    var = p * (1 - p) / reps
    stderr = math.sqrt(float(var)) * abs(scale)
    return Estimate(value, stderr, int(reps), normalization, dict(meta, hits=int(hits)))


def mean_stderr(values: np.ndarray) -> tuple[float, float]:
    """Correctly rounded two-pass mean and standard error."""
    v = np.asarray(values, dtype=np.float64).ravel()
    n = v.size
    if n == 0:
        raise ValueError("no values")
    m = math.fsum(v) / n
    if n == 1:
        return m, math.nan
    var = math.fsum((v - m) ** 2) / (n - 1)
    return m, math.sqrt(var / n)


def batch_means(values: np.ndarray, batches: int = 100) -> tuple[float, float]:
    """Mean with a standard error from ``batches`` contiguous batch means."""
    v = np.asarray(values, dtype=np.float64).ravel()
    n = v.size
    if n < batches or batches < 2:
        raise ValueError(f"need at least {batches} values for {batches} batches")
    edges = np.linspace(0, n, batches + 1).astype(np.int64)
    sizes = np.diff(edges)
    sums = np.array([math.fsum(v[a:b]) for a, b in zip(edges[:-1], edges[1:])])
    mean = math.fsum(sums) / n
    bm = sums / sizes
    # weight batches by size; equal up to one element
    var_b = math.fsum(sizes * (bm - mean) ** 2) / (batches - 1)
    return mean, math.sqrt(var_b / n)


def chunk_plan(reps: int, width: int) -> list[tuple[int, int]]:
    per = max(1, CHUNK_ELEMS // max(1, width))
    return [(r0, min(per, reps - r0)) for r0 in range(0, reps, per)]


def map_chunks(fn: Callable[[int, int], object], chunks: Sequence[tuple[int, int]], workers: int = 1) -> list:
    """Apply ``fn(rep0, nrep)`` to every chunk; results come back in chunk order."""
    if workers <= 1 or len(chunks) <= 1:
        return [fn(r0, nr) for r0, nr in chunks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda c: fn(*c), chunks))
