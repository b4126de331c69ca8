"""Counter-based random streams (Philox4x32-10).

Every uniform is a pure function of ``(seed, stream, replication, lane, index)``.
Replications never share counters, so any partition of the replication range
over workers reproduces the same numbers bit for bit.

Counter layout for one Philox block::

    c0 = index & 0xffffffff
    c1 = (lane << 24) | (index >> 32)
    c2 = rep & 0xffffffff
    c3 = rep >> 32

The 128 output bits give two doubles on the open interval (0, 1), 53 bits each.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _accel

M64 = (1 << 64) - 1

PHILOX_M0 = 0xD2511F53
PHILOX_M1 = 0xCD9E8D57
PHILOX_W0 = 0x9E3779B9
PHILOX_W1 = 0xBB67AE85

# lanes partition the index space of one replication
LANE_NOISE = 0
LANE_COEF = 1
LANE_VOL = 2
LANE_AUX = 3
LANE_TIME = 4
LANE_EXTRA = 5

_TWO53_INV = 1.0 / 9007199254740992.0


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & M64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & M64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & M64
    return x ^ (x >> 31)


@dataclass(frozen=True)
class Stream:
    """A seeded family of replication streams.

    ``Stream(seed, stream)`` fixes the Philox key; replication ``r`` of it reads
    counters tagged with ``r``. Use :meth:`child` to derive statistically
    independent families for different purposes within one experiment.
    """

    seed: int
    stream: int = 0

    def __post_init__(self):
        if self.seed < 0 or self.stream < 0:
            raise ValueError("seed and stream must be non-negative")

    @property
    def key(self) -> tuple[int, int]:
        k = splitmix64((splitmix64(self.seed & M64) + (self.stream & M64)) & M64)
        return k & 0xFFFFFFFF, k >> 32

    def child(self, tag: int) -> "Stream":
        return Stream(self.seed, splitmix64((self.stream * 0x100000001B3 + tag + 1) & M64))

    def uniforms(self, rep0: int, nrep: int, lane: int, start: int, count: int):
        """Two ``(nrep, count)`` arrays of uniforms for replications ``rep0..rep0+nrep-1``."""
        k0, k1 = self.key
        return philox_uniforms(k0, k1, rep0, nrep, lane, start, count)


def _philox_rounds_np(c0, c1, c2, c3, k0, k1):
    m0 = np.uint64(PHILOX_M0)
    m1 = np.uint64(PHILOX_M1)
    mask = np.uint64(0xFFFFFFFF)
    s32 = np.uint64(32)
    k0 = np.uint64(k0)
    k1 = np.uint64(k1)
    for _ in range(10):
        p0 = m0 * c0
        p1 = m1 * c2
        c0, c1, c2, c3 = (
            ((p1 >> s32) ^ c1 ^ k0) & mask,
            p1 & mask,
            ((p0 >> s32) ^ c3 ^ k1) & mask,
            p0 & mask,
        )
        k0 = (k0 + np.uint64(PHILOX_W0)) & mask
        k1 = (k1 + np.uint64(PHILOX_W1)) & mask
    return c0, c1, c2, c3


def philox4x32_np(ctr, key):
    """Reference Philox4x32-10 on scalar words; returns four 32-bit ints."""
    c = [np.uint64(v) for v in ctr]
    out = _philox_rounds_np(c[0], c[1], c[2], c[3], key[0], key[1])
    return tuple(int(v) for v in out)


def _uniforms_np(k0, k1, rep0, nrep, lane, start, count):
    idx = np.arange(start, start + count, dtype=np.uint64)
    reps = np.arange(rep0, rep0 + nrep, dtype=np.uint64)
    mask = np.uint64(0xFFFFFFFF)
    c0 = np.broadcast_to(idx & mask, (nrep, count))
    c1 = np.broadcast_to((np.uint64(lane) << np.uint64(24)) | (idx >> np.uint64(32)), (nrep, count))
    c2 = np.broadcast_to((reps & mask)[:, None], (nrep, count))
    c3 = np.broadcast_to((reps >> np.uint64(32))[:, None], (nrep, count))
    x0, x1, x2, x3 = _philox_rounds_np(c0, c1, c2, c3, k0, k1)
    s32 = np.uint64(32)
    s11 = np.uint64(11)
    u1 = ((((x0 << s32) | x1) >> s11).astype(np.float64) + 0.5) * _TWO53_INV
    u2 = ((((x2 << s32) | x3) >> s11).astype(np.float64) + 0.5) * _TWO53_INV
    return u1, u2


@_accel.njit_inline
def _philox_nb(c0, c1, c2, c3, k0, k1):
    mask = np.uint64(0xFFFFFFFF)
    m0 = np.uint64(PHILOX_M0)
    m1 = np.uint64(PHILOX_M1)
    w0 = np.uint64(PHILOX_W0)
    w1 = np.uint64(PHILOX_W1)
    s32 = np.uint64(32)
    for _ in range(10):
        p0 = m0 * c0
        p1 = m1 * c2
        n0 = ((p1 >> s32) ^ c1 ^ k0) & mask
        n1 = p1 & mask
        n2 = ((p0 >> s32) ^ c3 ^ k1) & mask
        n3 = p0 & mask
        c0 = n0
        c1 = n1
        c2 = n2
        c3 = n3
        k0 = (k0 + w0) & mask
        k1 = (k1 + w1) & mask
    return c0, c1, c2, c3


@_accel.njit
def _uniforms_fill_nb(k0, k1, rep0, lane, start, u1, u2):
    mask = np.uint64(0xFFFFFFFF)
    s32 = np.uint64(32)
    s11 = np.uint64(11)
    lane_bits = np.uint64(lane) << np.uint64(24)
    kk0 = np.uint64(k0)
    kk1 = np.uint64(k1)
    nrep, count = u1.shape
    for r in range(nrep):
        rep = np.uint64(rep0 + r)
        c2 = rep & mask
        c3 = rep >> s32
        for i in range(count):
            idx = np.uint64(start + i)
            x0, x1, x2, x3 = _philox_nb(idx & mask, lane_bits | (idx >> s32), c2, c3, kk0, kk1)
            u1[r, i] = ((((x0 << s32) | x1) >> s11) + 0.5) * _TWO53_INV
            u2[r, i] = ((((x2 << s32) | x3) >> s11) + 0.5) * _TWO53_INV


def philox_uniforms(k0, k1, rep0, nrep, lane, start, count):
    if nrep < 0 or count < 0:
        raise ValueError("nrep and count must be non-negative")
    if _accel.backend() == "numba":
        u1 = np.empty((nrep, count))
        u2 = np.empty((nrep, count))
        if nrep and count:
            _uniforms_fill_nb(k0, k1, rep0, lane, start, u1, u2)
        return u1, u2
    if nrep == 0 or count == 0:
        return np.empty((nrep, count)), np.empty((nrep, count))
    return _uniforms_np(k0, k1, rep0, nrep, lane, start, count)
