"""The numba kernels and the numpy fallbacks must agree bit for bit."""

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ldpoint import _accel, kernels, pointproc as pp, process
from ldpoint.noise import RegVarLaw
from ldpoint.process import IID, SRE, DiscreteLaw, MovingAverage, RandomCoefMA, StochVol, VectorLaw
from ldpoint.rng import Stream

LAW = RegVarLaw(1.5, 0.5, 1.0)


def both(fn, *args, **kwargs):
    with _accel.using_backend("numba"):
        a = fn(*args, **kwargs)
    with _accel.using_backend("numpy"):
        b = fn(*args, **kwargs)
    return a, b


def same(a, b):
    if isinstance(a, tuple):
        return all(same(x, y) for x, y in zip(a, b))
    if a is None:
        return b is None
    return np.array_equal(a, b) and np.asarray(a).dtype == np.asarray(b).dtype


def test_env_switch_documented():
    assert _accel.backend() in ("numba", "numpy")
    with pytest.raises(ValueError):
        _accel.set_backend("cuda")


@pytest.mark.parametrize(
    "spec",
    [
        IID(LAW),
        MovingAverage((1.0, 0.5, -0.25), LAW),
        RandomCoefMA(VectorLaw(((1.0, 0.5), (0.2, 1.0), (0.0, 0.0)), (0.3, 0.3, 0.4)), LAW),
        SRE(DiscreteLaw.constant(0.5), LAW),
        SRE(DiscreteLaw.uniform((-0.5, 0.3, 0.6)), LAW),
        StochVol(SRE(DiscreteLaw.uniform((0.2, 0.5)), LAW), DiscreteLaw.uniform((0.5, 2.0))),
    ],
    ids=["iid", "ma", "rcma", "sre-const", "sre-random", "sv"],
)
def test_simulation_backends_identical(spec):
    a, b = both(process.simulate_block, spec, Stream(3), 2, 4, 300, prefix=2)
    assert same(a[0], b[0])


@pytest.mark.parametrize("scheme", ["single", "product"])
def test_tilted_backends_identical(scheme):
    spec = MovingAverage((1.0, 0.5), LAW)
    a, b = both(process.simulate_block, spec, Stream(3), 0, 3, 200, tilt=(0.75, scheme))
    assert same(a[0], b[0]) and same(a[1], b[1])


@given(seed=st.integers(0, 2**32), nrep=st.integers(1, 4), length=st.integers(1, 60))
def test_event_kernels_identical(seed, nrep, length):
    x = np.asarray(Stream(seed).uniforms(0, nrep, 0, 0, length)[0]) * 4 - 2
    thr = np.array([-1.0, 0.0, 0.5, 1.5])
    assert same(*both(kernels.exceed_counts, x, thr))
    assert same(*both(kernels.row_sums, x))
    assert same(*both(kernels.row_sums, x, True))
    hz = sorted({1, max(1, length // 2), length})
    assert same(*both(kernels.drift_max, x, 0.1, hz))


@given(seed=st.integers(0, 2**32), q=st.integers(0, 3), timed=st.booleans())
def test_fn_sums_identical(seed, q, timed):
    x = np.asarray(Stream(seed).uniforms(0, 3, 0, 0, 50 + q)[0]) * 6 - 3
    fns = pp.pack_fns([pp.AnnulusTestFn(0.5, 2.0, 0.1, 0.7, 1.5, timed), pp.AnnulusTestFn(1.0, 4.0)])
    assert same(*both(kernels.fn_sums, x, q, 1.0, fns, 0.05))


def test_linear_paths_random_rows():
    z = np.arange(10.0)[None, :]
    coefs = np.array([[1.0, 0.0], [0.0, 1.0]])
    idx = np.array([[0, 1, 0, 1, 0, 1, 0, 1, 0]])
    for out in both(kernels.linear_paths, z, coefs, idx):
        # coefs[:, 0] is lag 0 -> z[p + 1], coefs[:, 1] is lag 1 -> z[p]
        assert list(out[0]) == [1, 1, 3, 3, 5, 5, 7, 7, 9]


def test_drift_max_values():
    x = np.array([[3.0, -1.0, 2.0, -5.0]])
    for out in both(kernels.drift_max, x, 1.0, [1, 2, 4]):
        # walk: 2, 0, 1, -5
        assert list(out[0]) == [2.0, 2.0, 2.0]
    with pytest.raises(ValueError):
        kernels.drift_max(x, 1.0, [3, 2])


def test_exceed_counts_empty_thresholds():
    assert kernels.exceed_counts(np.ones((2, 3)), []).shape == (2, 0)


def test_ramp_shape():
    x = np.array([0.0, 1.0, 1.25, 1.5, 2.0, 2.75, 3.0, 4.0])
    assert list(kernels.ramp(x, 1.0, 3.0)) == [0.0, 0.0, 0.5, 1.0, 1.0, 0.5, 0.0, 0.0]
