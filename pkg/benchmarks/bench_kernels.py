"""Time the numba kernels against the numpy fallback and check they agree bitwise.

    python3 benchmarks/bench_kernels.py [--reps 200] [--n 10000] [--repeat 3]

A second table compares the plain and tilted estimators of one rare
order-statistic event at equal replication counts.
"""

import argparse
import time

import numpy as np

from ldpoint import _accel, estimate as est, kernels, process
from ldpoint import pointproc as pp
from ldpoint.noise import RegVarLaw
from ldpoint.process import MovingAverage
from ldpoint.rng import LANE_NOISE, Stream, philox_uniforms


def best_of(fn, repeat):
    times = []
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def same(a, b) -> bool:
    a = a if isinstance(a, tuple) else (a,)
    b = b if isinstance(b, tuple) else (b,)
    return all(np.array_equal(x, y, equal_nan=True) for x, y in zip(a, b) if x is not None)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--reps", type=int, default=200)
    ap.add_argument("--n", type=int, default=10_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if not _accel.HAS_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    law = RegVarLaw(1.5, 0.5, 1.0)
    spec = MovingAverage((1.0, 0.5), law)
    rng = Stream(1)
    plan = pp.make_plan(args.n, 1.0, law)
    x, _, _ = process.simulate_block(spec, rng, 0, args.reps, args.n, prefix=1)
    table = pp.pack_fns([pp.AnnulusTestFn(0.5, 2.0), pp.AnnulusTestFn(1.0, 3.0, timed=False)])
    k0, k1 = rng.key

    cases = {
        "philox uniforms": lambda: philox_uniforms(k0, k1, 0, args.reps, LANE_NOISE, 0, args.n),
        "simulate MA": lambda: process.simulate_block(spec, rng, 0, args.reps, args.n)[0],
        "exceed counts": lambda: kernels.exceed_counts(x, [plan.gamma_n, 2 * plan.gamma_n]),
        "drift max": lambda: kernels.drift_max(x, 1.0, [args.n // 2, args.n]),
        "fn sums q=1": lambda: kernels.fn_sums(x, 1, plan.gamma_n, table, 0.05),
    }

    # compile outside the timed region
    with _accel.using_backend("numba"):
        for fn in cases.values():
            fn()

    print(f"reps={args.reps} n={args.n} best of {args.repeat}")
    print(f"{'kernel':<18}{'numba s':>10}{'numpy s':>10}{'speedup':>9}  equal")
    for name, fn in cases.items():
        with _accel.using_backend("numba"):
            t_nb, out_nb = best_of(fn, args.repeat)
        with _accel.using_backend("numpy"):
            t_np, out_np = best_of(fn, args.repeat)
        print(f"{name:<18}{t_nb:>10.4f}{t_np:>10.4f}{t_np / t_nb:>9.1f}  {same(out_nb, out_np)}")

    print()
    event = est.OrderStats((3.0,))
    small = pp.make_plan(1000, 1.0, law)
    reps = 20_000
    plain = est.estimate_events(spec, small, {"e": event}, reps, Stream(2))["e"]
    tilted = est.tilted_estimator(spec, small, event, 0.75, reps, Stream(2))
    print(f"order stat u=(3), n=1000, reps={reps}")
    print(f"  plain : {plain.value:.5g} +- {plain.stderr:.3g}")
    print(f"  tilted: {tilted.value:.5g} +- {tilted.stderr:.3g}  (tilt alpha 0.75)")


if __name__ == "__main__":
    main()
