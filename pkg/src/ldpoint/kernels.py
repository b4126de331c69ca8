"""Hot loops, each in a numba and a pure-numpy flavour.

The two flavours add floating point terms in the same order, so they agree
bit for bit; ``tests/test_kernels.py`` holds them to that. Public functions
dispatch on :func:`ldpoint._accel.backend`.
"""

from __future__ import annotations

import math

import numpy as np

from . import _accel

# ---------------------------------------------------------------- paths


@_accel.njit
def _linear_paths_nb(z, coefs, idx, out):
    nrep, length = out.shape
    span = coefs.shape[1]
    if idx.shape[0] == 0:
        c = coefs[0].copy()
        for r in range(nrep):
            for p in range(length):
                acc = 0.0
                for jj in range(span):
                    acc += c[jj] * z[r, p + span - 1 - jj]
                out[r, p] = acc
        return
    for r in range(nrep):
        for p in range(length):
            row = idx[r, p]
            acc = 0.0
            for jj in range(span):
                acc += coefs[row, jj] * z[r, p + span - 1 - jj]
            out[r, p] = acc


def _linear_paths_np(z, coefs, idx, out):
    nrep, length = out.shape
    span = coefs.shape[1]
    acc = np.zeros((nrep, length))
    for jj in range(span):
        lo = span - 1 - jj
        if idx.shape[0] > 0:
            c = coefs[idx, jj]
        else:
            c = coefs[0, jj]
        acc += c * z[:, lo:lo + length]
    out[...] = acc


def linear_paths(z, coefs, idx=None):
    """``X[r, p] = sum_jj coefs[row, jj] * z[r, p + span - 1 - jj]``.

    ``coefs[:, jj]`` holds the coefficient at lag ``jmin + jj``; ``idx`` picks
    the coefficient row per output entry (random coefficients) or is ``None``.
    """
    coefs = np.ascontiguousarray(coefs, dtype=np.float64)
    span = coefs.shape[1]
    length = z.shape[1] - span + 1
    if length < 0:
        raise ValueError("noise window shorter than the coefficient span")
    out = np.empty((z.shape[0], length))
    if idx is None:
        idx = np.zeros((0, 0), dtype=np.int64)
    if _accel.backend() == "numba":
        _linear_paths_nb(z, coefs, idx, out)
    else:
        _linear_paths_np(z, coefs, idx, out)
    return out


@_accel.njit
def _sre_paths_nb(z, y, y_const, start, out):
    nrep, width = z.shape
    random_y = y.shape[0] > 0
    for r in range(nrep):
        x = 0.0
        for i in range(width):
            yi = y[r, i] if random_y else y_const
            x = yi * x + z[r, i]
            if i >= start:
                out[r, i - start] = x


def _sre_paths_np(z, y, y_const, start, out):
    x = np.zeros(z.shape[0])
    random_y = y.shape[0] > 0
    for i in range(z.shape[1]):
        yi = y[:, i] if random_y else y_const
        x = yi * x + z[:, i]
        if i >= start:
            out[:, i - start] = x


def sre_paths(z, y=None, y_const=0.0, start=0):
    """Forward recursion ``x = y*x + z`` from ``x = 0``; keeps columns ``>= start``."""
    out = np.empty((z.shape[0], z.shape[1] - start))
    if y is None:
        y = np.zeros((0, 0))
    if _accel.backend() == "numba":
        _sre_paths_nb(z, y, float(y_const), start, out)
    else:
        _sre_paths_np(z, y, float(y_const), start, out)
    return out


# ---------------------------------------------------------------- events


@_accel.njit
def _exceed_counts_nb(x, thr, out):
    nrep, length = x.shape
    m = thr.shape[0]
    lowest = thr.min()
    for r in range(nrep):
        for i in range(m):
            out[r, i] = 0
        for p in range(length):
            v = x[r, p]
            if v <= lowest:
                continue
            for i in range(m):
                if v > thr[i]:
                    out[r, i] += 1


def exceed_counts(x, thresholds):
    """Number of entries per row strictly above each threshold."""
    thr = np.asarray(thresholds, dtype=np.float64)
    out = np.empty((x.shape[0], thr.shape[0]), dtype=np.int64)
    if thr.shape[0] == 0:
        return out
    if _accel.backend() == "numba":
        _exceed_counts_nb(x, thr, out)
    else:
        for i, t in enumerate(thr):
            out[:, i] = np.count_nonzero(x > t, axis=1)
    return out


@_accel.njit
def _row_sums_nb(x, absolute, out):
    nrep, length = x.shape
    for r in range(nrep):
        acc = 0.0
        for p in range(length):
            acc += abs(x[r, p]) if absolute else x[r, p]
        out[r] = acc


def row_sums(x, absolute=False):
    """Left-to-right row sums (sequential order, matching ``np.cumsum``)."""
    out = np.empty(x.shape[0])
    if x.shape[1] == 0:
        out[:] = 0.0
        return out
    if _accel.backend() == "numba":
        _row_sums_nb(x, absolute, out)
    else:
        v = np.abs(x) if absolute else x
        out[:] = np.cumsum(v, axis=1)[:, -1]
    return out


@_accel.njit
def _drift_max_nb(x, c, horizons, out):
    nrep, length = x.shape
    nh = horizons.shape[0]
    for r in range(nrep):
        acc = 0.0
        best = -np.inf
        h = 0
        for p in range(length):
            acc += x[r, p] - c
            if acc > best:
                best = acc
            while h < nh and horizons[h] == p + 1:
                out[r, h] = best
                h += 1
        while h < nh:
            out[r, h] = best
            h += 1


def drift_max(x, c, horizons):
    """``max_{k <= h} sum_{i<=k} (x_i - c)`` for each horizon ``h`` (sorted)."""
    hz = np.asarray(horizons, dtype=np.int64)
    if np.any(np.diff(hz) < 0) or hz.size == 0 or hz[0] < 1 or hz[-1] > x.shape[1]:
        raise ValueError("horizons must be sorted and within the path length")
    out = np.empty((x.shape[0], hz.shape[0]))
    if _accel.backend() == "numba":
        _drift_max_nb(x, float(c), hz, out)
    else:
        cs = np.cumsum(x - c, axis=1)
        for i, h in enumerate(hz):
            out[:, i] = cs[:, :h].max(axis=1)
    return out


# ---------------------------------------------------------------- point process functionals

# columns of the packed test-function table
FN_A, FN_B, FN_S0, FN_S1, FN_H, FN_TIMED = range(6)


@_accel.njit_inline
def _ramp_nb(x, lo, hi):
    quarter = (hi - lo) * 0.25
    if x <= lo or x >= hi:
        return 0.0
    if x < lo + quarter:
        return (x - lo) / quarter
    if x > hi - quarter:
        return (hi - x) / quarter
    return 1.0


def ramp(x, lo, hi):
    """Trapezoid: 0 outside (lo, hi), 1 on the middle half, linear in between."""
    x = np.asarray(x, dtype=np.float64)
    quarter = (hi - lo) * 0.25
    out = np.ones_like(x)
    out = np.where(x < lo + quarter, (x - lo) / quarter, out)
    out = np.where(x > hi - quarter, (hi - x) / quarter, out)
    out = np.where((x <= lo) | (x >= hi), 0.0, out)
    return out


@_accel.njit
def _fn_sums_nb(x, q, n, gamma, fns, floor, out):
    nrep = x.shape[0]
    m = fns.shape[0]
    for r in range(nrep):
        for i in range(m):
            out[r, i] = 0.0
        for k in range(n):
            p = k + q
            sq = 0.0
            big = 0.0
            for lag in range(q + 1):
                v = x[r, p - lag] / gamma
                sq += v * v
                if abs(v) > big:
                    big = abs(v)
            if big <= floor:
                continue
            norm = math.sqrt(sq)
            t = (k + 1) / n
            for i in range(m):
                val = fns[i, 4] * _ramp_nb(norm, fns[i, 0], fns[i, 1])
                if fns[i, 5] != 0.0:
                    val *= _ramp_nb(t, fns[i, 2], fns[i, 3])
                out[r, i] += val


def _fn_sums_np(x, q, n, gamma, fns, floor, out):
    nrep = x.shape[0]
    sq = np.zeros((nrep, n))
    big = np.zeros((nrep, n))
    for lag in range(q + 1):
        v = x[:, q - lag:q - lag + n] / gamma
        sq += v * v
        big = np.maximum(big, np.abs(v))
    norm = np.sqrt(sq)
    keep = big > floor
    t = np.arange(1, n + 1) / n
    for i in range(fns.shape[0]):
        val = fns[i, FN_H] * ramp(norm, fns[i, FN_A], fns[i, FN_B])
        if fns[i, FN_TIMED] != 0.0:
            val = val * ramp(t, fns[i, FN_S0], fns[i, FN_S1])[None, :]
        val = np.where(keep, val, 0.0)
        out[:, i] = np.cumsum(val, axis=1)[:, -1]


def fn_sums(x, q, gamma, fns, floor):
    """``xi(g)`` for every packed test function ``g`` and every row.

    ``x`` rows hold ``X_{1-q}, ..., X_n``; points are
    ``(k/n, X_k/gamma, ..., X_{k-q}/gamma)`` and points whose largest
    coordinate is ``<= floor`` are skipped.
    """
    n = x.shape[1] - q
    fns = np.ascontiguousarray(fns, dtype=np.float64)
    out = np.empty((x.shape[0], fns.shape[0]))
    if n <= 0:
        out[:] = 0.0
        return out
    if _accel.backend() == "numba":
        _fn_sums_nb(x, q, n, float(gamma), fns, float(floor), out)
    else:
        _fn_sums_np(x, q, n, float(gamma), fns, float(floor), out)
    return out
