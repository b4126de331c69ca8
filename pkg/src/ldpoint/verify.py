"""The acceptance battery: theory against Monte Carlo at desk scale.

Each criterion returns a :class:`CriterionResult` made of individual checks.
``quick`` shrinks replication counts (same n, same tolerances); ``full`` runs
the stated scales.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import estimate as est
from . import limits, noise as noise_mod, pointproc as pp
from .noise import RegVarLaw
from .process import IID, SRE, DiscreteLaw, MovingAverage, RandomCoefMA, VectorLaw
from .rng import Stream

SUITES = ("quick", "full")
EPS = float(np.finfo(np.float64).eps)

SCALES = {
    "full": {
        "c1_draws": 10**6,
        "c2_paths": 100,
        "c2_length": 10**5,
        "c3_emp_reps": 10**5,
        "c3_limit_reps": 10**6,
        "c456_reps": 10**6,
        "c7_reps": 10**5,
        "c8_reps": 10**8,
        "c9_const_reps": 10**5,
        "c9_tilt_reps": 10**5,
    },
    "quick": {
        "c1_draws": 10**6,
        "c2_paths": 20,
        "c2_length": 10**5,
        "c3_emp_reps": 10**4,
        "c3_limit_reps": 10**5,
        "c456_reps": 10**5,
        "c7_reps": 10**4,
        "c8_reps": 10**7,
        "c9_const_reps": 2 * 10**4,
        "c9_tilt_reps": 2 * 10**4,
    },
}


@dataclass
class Check:
    label: str
    theory: float
    estimate: float
    stderr: float
    passed: bool
    rule: str

    @property
    def z(self) -> float:
        if self.stderr > 0:
            return (self.estimate - self.theory) / self.stderr
        return 0.0 if self.estimate == self.theory else math.inf

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "theory": self.theory,
            "estimate": self.estimate,
            "stderr": self.stderr,
            "z": self.z,
            "passed": self.passed,
            "rule": self.rule,
        }


@dataclass
class CriterionResult:
    id: int
    title: str
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)

    @property
    def z(self) -> float:
        zs = [abs(c.z) for c in self.checks if math.isfinite(c.z)]
        return max(zs) if zs else 0.0

    def summary(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return f"[{verdict}] criterion {self.id}: {self.title} (max |z| = {self.z:.2f})"

    def to_dict(self) -> dict:
        return {"id": self.id, "title": self.title, "passed": self.passed, "z": self.z,
                "checks": [c.to_dict() for c in self.checks]}


def within(theory: float, e: float, se: float, nsig: float, rel: float | None = None) -> bool:
    """``|e - theory| <= nsig*se``, or within the relative allowance ``rel`` when given."""
    d = abs(e - theory)
    return d <= nsig * se or (rel is not None and d <= rel * abs(theory))


def _rule(nsig, rel=None) -> str:
    return f"{nsig:g} stderr" + (f" or {rel:.0%}" if rel is not None else "")


def _check(label, theory, e: est.Estimate | float, se=None, nsig=4.0, rel=None) -> Check:
    if isinstance(e, est.Estimate):
        value, se = e.value, e.stderr
    else:
        value = float(e)
    return Check(label, float(theory), value, float(se), within(theory, value, se, nsig, rel), _rule(nsig, rel))


# ---------------------------------------------------------------- the standard models

LAW = RegVarLaw(1.5, 0.5, 1.0)
IID_SPEC = IID(LAW)
MA_SPEC = MovingAverage((1.0, 0.5), LAW)
SRE_TAIL_SPEC = SRE(DiscreteLaw.constant(0.5), RegVarLaw(0.8, 1.0, 1.0))
N = 10**4

# six (g1, g2, eps1, eps2) triples for the point-process comparison
TRIPLES = (
    (pp.AnnulusTestFn(0.5, 2.0), pp.AnnulusTestFn(0.5, 2.0), 0.1, 0.1),
    (pp.AnnulusTestFn(0.5, 2.0, 0.0, 0.5), pp.AnnulusTestFn(0.5, 2.0, 0.5, 1.0), 0.05, 0.05),
    (pp.AnnulusTestFn(1.0, 4.0, 0.2, 0.9), pp.AnnulusTestFn(0.5, 2.0, timed=False), 0.1, 0.1),
    (pp.AnnulusTestFn(0.3, 1.0, timed=False), pp.AnnulusTestFn(1.0, 3.0, timed=False), 0.05, 0.05),
    (pp.AnnulusTestFn(2.0, 6.0), pp.AnnulusTestFn(2.0, 6.0, h=4.0), 0.5, 0.5),
    (pp.AnnulusTestFn(0.4, 1.2, h=3.0), pp.AnnulusTestFn(0.8, 5.0, 0.0, 0.6, h=2.0), 0.2, 0.3),
)


class Battery:
    """Runs criteria; shares expensive path simulations between criteria 4, 5 and 6."""

    def __init__(self, suite: str = "full", seed: int = 20240601, workers: int = 1):
        if suite not in SUITES:
            raise ValueError(f"suite must be one of {SUITES}")
        self.suite = suite
        self.scale = SCALES[suite]
        self.seed = seed
        self.workers = workers
        self._events: dict[str, dict] = {}

    def stream(self, tag: int) -> Stream:
        return Stream(self.seed, tag)

    # -- 1
    def criterion_1(self) -> CriterionResult:
        res = CriterionResult(1, "noise tail frequencies match the exact Pareto tail")
        draws = self.scale["c1_draws"]
        z = noise_mod.sample(LAW, self.stream(100), draws)
        for u in (2.0, 10.0, 50.0):
            p = noise_mod.tail(LAW, u)
            freq = np.count_nonzero(np.abs(z) > u) / draws
            res.checks.append(_check(f"P(|Z|>{u:g})", p, freq, math.sqrt(p * (1 - p) / draws)))
        return res

    # -- 2
    def criterion_2(self) -> CriterionResult:
        res = CriterionResult(2, "marginal tail ratio at x=50 matches the tail constant")
        paths, length = self.scale["c2_paths"], self.scale["c2_length"]
        for label, spec, tag in (("MA(1,0.5)", MA_SPEC, 200), ("SRE Y=0.5", SRE_TAIL_SPEC, 201)):
            theory = limits.marginal_tail_constant(spec).value
            e = est.estimate_marginal_tail(spec, 50.0, paths, length, self.stream(tag), workers=self.workers)
            res.checks.append(_check(f"{label} P(X>50)/P(|Z|>50)", theory, e, rel=0.05))
        return res

    # -- 3
    def criterion_3(self) -> CriterionResult:
        res = CriterionResult(3, "point-process functionals: n=10^4 against the limit measure")
        plan = pp.make_plan(N, 1.0, LAW)
        for label, spec, tag in (("IID", IID_SPEC, 300), ("MA(1,0.5)", MA_SPEC, 310)):
            emp = pp.empirical_F_battery(
                spec, plan, (0, 1), TRIPLES, self.scale["c3_emp_reps"], self.stream(tag), workers=self.workers
            )
            for q in (0, 1):
                lim = pp.limit_F_battery(
                    spec, q, TRIPLES, self.scale["c3_limit_reps"], self.stream(tag + 1 + q), workers=self.workers
                )
                for i in range(len(TRIPLES)):
                    e, m = emp[q, i], lim[i]
                    se = math.hypot(e.stderr, m.stderr)
                    res.checks.append(_check(f"{label} q={q} triple {i + 1}", m.value, e.value, se))
        return res

    # -- 4, 5, 6 share paths
    def _shared(self, label: str) -> dict:
        if label not in self._events:
            plan = pp.make_plan(N, 1.0, LAW)
            reps = self.scale["c456_reps"]
            if label == "IID":
                events = {"os": est.OrderStats((1.0,)), "hit": est.Hitting(1.0, 2.0), "ps": est.PartialSum(1.0)}
                self._events[label] = est.estimate_events(IID_SPEC, plan, events, reps, self.stream(400), self.workers)
            else:
                events = {"os": est.OrderStats((1.0, 1.0)), "ps": est.PartialSum(1.0)}
                self._events[label] = est.estimate_events(MA_SPEC, plan, events, reps, self.stream(410), self.workers)
        return self._events[label]

    def criterion_4(self) -> CriterionResult:
        res = CriterionResult(4, "order statistics")
        res.checks.append(_check("IID u=(1)", limits.order_stat_constant(IID_SPEC, (1.0,)).value,
                                 self._shared("IID")["os"], rel=0.10))
        res.checks.append(_check("MA(1,0.5) u=(1,1)", limits.order_stat_constant(MA_SPEC, (1.0, 1.0)).value,
                                 self._shared("MA")["os"], rel=0.10))
        return res

    def criterion_5(self) -> CriterionResult:
        res = CriterionResult(5, "hitting times")
        res.checks.append(_check("IID lambda=1 a=2", limits.hitting_constant(IID_SPEC, 1.0, 2.0).value,
                                 self._shared("IID")["hit"], rel=0.10))
        return res

    def criterion_6(self) -> CriterionResult:
        res = CriterionResult(6, "partial sums")
        res.checks.append(_check("IID rho=1", limits.partial_sum_constant(IID_SPEC, 1.0).value,
                                 self._shared("IID")["ps"], rel=0.10))
        res.checks.append(_check("MA(1,0.5) rho=1", limits.partial_sum_constant(MA_SPEC, 1.0).value,
                                 self._shared("MA")["ps"], rel=0.10))
        return res

    # -- 7
    def criterion_7(self) -> CriterionResult:
        res = CriterionResult(7, "ruin probabilities at u=10^3, M=20")
        for label, spec, tag in (("IID", IID_SPEC, 700), ("MA(1,0.5)", MA_SPEC, 710)):
            theory = limits.ruin_constant(spec, 1.0).value
            e = est.estimate_ruin(spec, 1e3, 1.0, 20, self.scale["c7_reps"], self.stream(tag), self.workers)
            ok = abs(e.value - theory) <= 0.25 * theory
            res.checks.append(Check(f"{label} psi(u)/(uP(|Z|>u))", theory, e.value, e.stderr, ok, "25%"))
            se2 = math.hypot(e.stderr, e.meta["stderr_2M"])
            res.checks.append(Check(f"{label} M vs 2M", e.value, e.meta["value_2M"], se2,
                                    e.meta["horizon_stable"], "2 combined stderr"))
        return res

    # -- 8
    def criterion_8(self) -> CriterionResult:
        res = CriterionResult(8, "n=2 quadrature oracle against plain Monte Carlo")
        oracle = est.oracle_exact(IID_SPEC, 2, "sum", 100.0)
        e = est.estimate_exceedance(IID_SPEC, 2, "sum", 100.0, self.scale["c8_reps"], self.stream(800), self.workers)
        res.checks.append(_check("P(Z1+Z2>100)", oracle.value, e))
        return res

    # -- 9
    def criterion_9(self) -> CriterionResult:
        res = CriterionResult(9, "property suites")
        res.checks.extend(self._homogeneity())
        res.checks.extend(self._order_scaling())
        res.checks.extend(self._degeneracy_chain())
        res.checks.extend(self._signed_vs_absolute())
        res.checks.extend(self._tilt_unbiased())
        res.checks.extend(self._worker_invariance())
        return res

    def _homogeneity(self) -> list[Check]:
        worst = 0.0
        exact = True
        for alpha in (0.5, 1.0, 1.5, 2.0, 3.0):
            for w in (0.0, 0.3, 1.0):
                law = RegVarLaw(alpha, w)
                for a in (0.25, 1.0, 3.0):
                    for u in (0.5, 2.0, 8.0):
                        for side in ("positive", "negative"):
                            lhs = noise_mod.mu_halfline(law, a * u, side)
                            rhs = u**-alpha * noise_mod.mu_halfline(law, a, side)
                            if alpha in (1.0, 2.0, 3.0):
                                exact &= lhs == rhs
                            if rhs:
                                worst = max(worst, abs(lhs / rhs - 1.0))
        return [
            Check("mu homogeneity, dyadic grid, integer alpha", 1.0, 1.0 if exact else 0.0, 0.0, exact, "bitwise"),
            Check("mu homogeneity, relative rounding", 0.0, worst, 0.0, worst <= 8 * EPS, "8 ulp"),
        ]

    def _order_scaling(self) -> list[Check]:
        out = []
        u = (1.0, 0.5)
        for s in (0.5, 3.0):
            base = limits.order_stat_constant(MA_SPEC, u).value
            scaled = limits.order_stat_constant(MA_SPEC, tuple(s * x for x in u)).value
            target = s**-LAW.alpha * base
            ok = abs(scaled - target) <= 1e-14 * target
            out.append(Check(f"MA order-stat scaling s={s:g}", target, scaled, 0.0, ok, "closed form, 1e-14 rel"))
        rcma = RandomCoefMA(VectorLaw(((1.0, 0.5), (0.5, 1.0), (0.2, 0.0))), LAW)
        reps = self.scale["c9_const_reps"]
        s = 2.0
        k1 = limits.order_stat_constant(rcma, u, reps=reps, rng=self.stream(900))
        k2 = limits.order_stat_constant(rcma, tuple(s * x for x in u), reps=reps, rng=self.stream(901))
        target = s**-LAW.alpha * k1.value
        se = math.hypot(s**-LAW.alpha * k1.stderr, k2.stderr)
        out.append(_check("RCMA order-stat scaling s=2 (independent streams)", target, k2.value, se, nsig=3.0))
        return out

    def _degeneracy_chain(self) -> list[Check]:
        sre0 = SRE(DiscreteLaw.constant(0.0), LAW)
        pairs = [
            ("marginal +", lambda s: limits.marginal_tail_constant(s, "positive")),
            ("marginal -", lambda s: limits.marginal_tail_constant(s, "negative")),
            ("order stats", lambda s: limits.order_stat_constant(s, (1.0, 0.5))),
            ("order stats q=1", lambda s: limits.order_stat_constant(s, (2.0,))),
            ("hitting", lambda s: limits.hitting_constant(s, 1.0, 2.0)),
            ("partial sum", lambda s: limits.partial_sum_constant(s, 1.5)),
            ("partial sum abs", lambda s: limits.partial_sum_constant(s, 1.5, absolute=True)),
            ("ruin", lambda s: limits.ruin_constant(s, 2.0)),
        ]
        out = []
        for label, fn in pairs:
            a, b = fn(IID_SPEC).value, fn(sre0).value
            out.append(Check(f"Y=0 chain: {label}", a, b, 0.0, a == b, "exact"))
        return out

    def _signed_vs_absolute(self) -> list[Check]:
        reps = self.scale["c9_const_reps"]
        specs = [
            ("IID", IID_SPEC),
            ("MA(1,0.5)", MA_SPEC),
            ("MA(1,-1)", MovingAverage((1.0, -1.0), LAW)),
            ("SRE Y=+-0.5", SRE(DiscreteLaw.signed(0.5), LAW)),
            ("RCMA", RandomCoefMA(VectorLaw(((1.0, -0.7), (0.3, 0.9))), LAW)),
        ]
        out = []
        for label, spec in specs:
            sg = limits.partial_sum_constant(spec, 1.0, reps=reps, rng=self.stream(920))
            ab = limits.partial_sum_constant(spec, 1.0, absolute=True, reps=reps, rng=self.stream(920))
            out.append(Check(f"signed <= absolute: {label}", ab.value, sg.value, 0.0, sg.value <= ab.value, "<="))
        return out

    def _tilt_unbiased(self) -> list[Check]:
        plan = pp.make_plan(1000, 1.0, LAW)
        reps = self.scale["c9_tilt_reps"]
        events = {"order_stats u=(3)": est.OrderStats((3.0,)), "partial_sum rho=1": est.PartialSum(1.0),
                  "hitting lam=0.5 a=2": est.Hitting(0.5, 2.0)}
        plain = est.estimate_events(IID_SPEC, plan, events, reps, self.stream(930), self.workers)
        tilted = est.estimate_events(IID_SPEC, plan, events, reps, self.stream(931), self.workers,
                                     tilt=(LAW.alpha / 2, "single"))
        out = []
        for k in events:
            se = math.hypot(plain[k].stderr, tilted[k].stderr)
            out.append(_check(f"tilted vs plain: {k}", plain[k].value, tilted[k].value, se))
        return out

    def _worker_invariance(self) -> list[Check]:
        plan = pp.make_plan(2000, 1.0, LAW)
        events = {"os": est.OrderStats((1.0, 0.5)), "ps": est.PartialSum(1.0)}
        runs = [est.estimate_events(MA_SPEC, plan, events, 2000, self.stream(940), workers=w) for w in (1, 3)]
        tilted = [est.estimate_events(MA_SPEC, plan, events, 2000, self.stream(941), workers=w,
                                      tilt=(1.0, "single")) for w in (1, 4)]
        lims = [pp.limit_F_battery(MA_SPEC, 1, TRIPLES[:2], 200_000, self.stream(942), workers=w) for w in (1, 3)]
        same = all(
            a[k].value == b[k].value and a[k].stderr == b[k].stderr
            for a, b in (runs, tilted) for k in events
        ) and all(x.value == y.value and x.stderr == y.stderr for x, y in zip(*lims))
        return [Check("bit-identical results for 1 vs 3-4 workers", 1.0, 1.0 if same else 0.0, 0.0, same, "bitwise")]

    def run(self, ids=None) -> list[CriterionResult]:
        ids = sorted(CRITERIA) if ids is None else list(ids)
        return [getattr(self, f"criterion_{i}")() for i in ids]


CRITERIA = {
    1: "noise tail",
    2: "marginal tail",
    3: "point-process functionals",
    4: "order statistics",
    5: "hitting times",
    6: "partial sums",
    7: "ruin",
    8: "quadrature oracle",
    9: "property suites",
}


def run_battery(suite: str = "quick", seed: int = 20240601, workers: int = 1, ids=None) -> list[CriterionResult]:
    return Battery(suite, seed, workers).run(ids)
