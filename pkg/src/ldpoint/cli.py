"""Command line entry point: ``ldpoint run | verify | limits | simulate``.

Exit codes: 0 success, 1 verification failures, 2 invalid configuration or
model, 3 degenerate estimate (no event was observed).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import subprocess
import sys
from pathlib import Path

from . import __version__
from . import estimate as est
from . import limits, pointproc as pp, process
from .config import ConfigError, ExperimentConfig, dump_config, parse_config
from .process import ConditionError
from .rng import Stream
from .verify import CRITERIA, SUITES, Battery

SEED_ENV = "LDPOINT_SEED"
EXIT_OK, EXIT_FAIL, EXIT_INVALID, EXIT_DEGENERATE = 0, 1, 2, 3


def build_id() -> str:
    """``git describe`` of the source tree, or the package version outside a checkout."""
    here = Path(__file__).resolve().parent
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty", "--tags"],
            cwd=here, capture_output=True, text=True, timeout=10, check=True,
        )
        return f"ldpoint-{__version__}-{out.stdout.strip()}"
    except (OSError, subprocess.SubprocessError):
        return f"ldpoint-{__version__}"


def resolve_seed(flag: int | None, cfg: ExperimentConfig | None = None) -> int:
    if flag is not None:
        return flag
    if cfg is not None and cfg.seed is not None:
        return cfg.seed
    env = os.environ.get(SEED_ENV)
    if env:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(SEED_ENV, f"not an integer: {env!r}") from None
    return 0


def _clean(obj):
    """JSON-safe copy: non-finite floats become null, tuples become lists."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def write_json(path: Path, doc: dict):
    path.write_text(json.dumps(_clean(doc), indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _write_series(path: Path, x, start: int = 1):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("k,x\n")
        for k, v in enumerate(x, start=start):
            fh.write(f"{k},{v:.17g}\n")


def _load(path: str) -> tuple[ExperimentConfig, str]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from None
    return parse_config(text), text


# ---------------------------------------------------------------- constants


def all_constants(cfg: ExperimentConfig, rng: Stream) -> dict:
    """Every constant that applies to the configured model; others carry the reason."""
    spec = cfg.spec
    p = cfg.params
    u = p.get("u") if cfg.experiment == "order_stats" else (1.0,)
    jobs = {
        "marginal_tail_positive": lambda: limits.marginal_tail_constant(spec, "positive", rng=rng),
        "marginal_tail_negative": lambda: limits.marginal_tail_constant(spec, "negative", rng=rng),
        "order_stats": lambda: limits.order_stat_constant(spec, u, rng=rng),
        "hitting": lambda: limits.hitting_constant(spec, p.get("lam", 1.0), p.get("a", 1.0), rng=rng),
        "partial_sum": lambda: limits.partial_sum_constant(spec, p.get("rho", 1.0) or 1.0, rng=rng),
        "partial_sum_abs": lambda: limits.partial_sum_constant(spec, p.get("rho", 1.0) or 1.0, True, rng=rng),
        "ruin": lambda: limits.ruin_constant(spec, p.get("c", 1.0), rng=rng),
    }
    out = {}
    for name, fn in jobs.items():
        try:
            out[name] = fn().to_dict()
        except (ValueError, TypeError) as exc:
            out[name] = {"not_applicable": str(exc)}
    return out


# ---------------------------------------------------------------- run


def _experiment(cfg: ExperimentConfig, seed: int, outdir: Path):
    """Returns (theory constant, theory stderr, estimate, extra report fields)."""
    spec, p = cfg.spec, cfg.params
    rng = Stream(seed, 0)
    aux = Stream(seed, 1)
    plan = pp.make_plan(cfg.n, cfg.beta, spec.noise)
    tilt = None if cfg.tilt_alpha is None else (cfg.tilt_alpha, cfg.tilt_scheme)
    extra = {"plan": {"n": plan.n, "beta": plan.beta, "gamma_n": plan.gamma_n, "r_n": plan.r_n}}

    def events(event):
        if tilt is None:
            return est.estimate_events(spec, plan, {"e": event}, cfg.reps, rng, cfg.workers)["e"]
        return est.tilted_estimator(spec, plan, event, tilt[0], cfg.reps, rng, tilt[1], workers=cfg.workers)

    kind = cfg.experiment
    if kind == "tail":
        k = limits.marginal_tail_constant(spec, p["side"], rng=aux)
        e = est.estimate_marginal_tail(spec, p["x"], cfg.reps, p["length"], rng, p["side"], cfg.workers)
        x, _, _ = process.simulate_block(spec, rng, 0, 1, p["length"])
        _write_series(outdir / "series.csv", x[0])
        return k.value, k.stderr, e, {"constant": k.to_dict(), **extra}
    if kind == "pointproc_F":
        g1, g2, q = p["g1"], p["g2"], p["q"]
        lim = pp.limit_F_mc(spec, q, g1, g2, p["eps1"], p["eps2"], p["rho"], None, p["limit_reps"], aux, cfg.workers)
        e = pp.empirical_F_mc(spec, plan, q, g1, g2, p["eps1"], p["eps2"], cfg.reps, rng, workers=cfg.workers)
        x, _, _ = process.simulate_block(spec, rng, 0, 1, plan.n, prefix=q)
        pm = pp.build_point_measure(x[0], plan, q, 0.05 * min(g1.a, g2.a))
        (outdir / "points.csv").write_text(pm.to_csv(), encoding="utf-8")
        degenerate = lim.meta["degenerate"] or e.meta["degenerate"]
        return lim.value, lim.stderr, e, {"limit": lim.to_dict(), "degenerate": degenerate, **extra}
    if kind == "order_stats":
        k = limits.order_stat_constant(spec, p["u"], rng=aux)
        return k.value, k.stderr, events(est.OrderStats(p["u"])), {"constant": k.to_dict(), **extra}
    if kind == "hitting":
        k = limits.hitting_constant(spec, p["lam"], p["a"], rng=aux)
        return k.value, k.stderr, events(est.Hitting(p["lam"], p["a"])), {"constant": k.to_dict(), **extra}
    if kind == "partial_sum":
        k = limits.partial_sum_constant(spec, p["rho"], p["absolute"], rng=aux)
        return k.value, k.stderr, events(est.PartialSum(p["rho"], p["absolute"])), {"constant": k.to_dict(), **extra}
    k = limits.ruin_constant(spec, p["c"], rng=aux)
    e = est.estimate_ruin(spec, p["u"], p["c"], p["M"], cfg.reps, rng, cfg.workers)
    return k.value, k.stderr, e, {"constant": k.to_dict()}


def cmd_run(args) -> int:
    cfg, text = _load(args.config)
    if args.workers:
        cfg = dataclasses.replace(cfg, workers=args.workers)
    seed = resolve_seed(args.seed, cfg)
    outdir = Path(args.output or cfg.output)
    outdir.mkdir(parents=True, exist_ok=True)
    report = process.validate_conditions(cfg.spec, cfg.beta)
    bad = report.failing(("H", "CC1", "CC15", "CC2", "GAMMA"))
    if bad:
        raise ConditionError("; ".join(f"{c}: {report[c].evidence}" for c in bad))
    theory, theory_se, e, extra = _experiment(cfg, seed, outdir)
    se = math.hypot(e.stderr, theory_se)
    z = (e.value - theory) / se if se > 0 else (0.0 if e.value == theory else math.inf)
    degenerate = bool(extra.pop("degenerate", False)) or e.meta.get("hits", 1) == 0 or e.meta.get("nonzero", 1) == 0
    doc = {
        "build": build_id(),
        "seed": seed,
        "config_text": text,
        "config": dump_config(cfg),
        "experiment": cfg.experiment,
        "conditions": report.to_dict(),
        "theory": theory,
        "theory_stderr": theory_se,
        "estimate": e.value,
        "stderr": e.stderr,
        "ci95": list(e.ci95),
        "reps": e.reps,
        "normalization": e.normalization,
        "z": z,
        "degenerate": degenerate,
        "estimates": {cfg.experiment: e.to_dict()},
        "constants": all_constants(cfg, Stream(seed, 1)),
        **extra,
    }
    write_json(outdir / "report.json", doc)
    print(f"{cfg.experiment}: theory {theory:.6g}  estimate {e.value:.6g} +- {e.stderr:.3g}  z = {z:.2f}")
    print(f"report written to {outdir / 'report.json'}")
    if degenerate:
        print("degenerate estimate: no event observed", file=sys.stderr)
        return EXIT_DEGENERATE
    return EXIT_OK


def cmd_limits(args) -> int:
    cfg, _ = _load(args.config)
    seed = resolve_seed(args.seed, cfg)
    doc = {"seed": seed, "conditions": process.validate_conditions(cfg.spec, cfg.beta).to_dict(),
           "constants": all_constants(cfg, Stream(seed, 1))}
    text = json.dumps(_clean(doc), indent=2, sort_keys=True)
    if args.output:
        Path(args.output).mkdir(parents=True, exist_ok=True)
        (Path(args.output) / "limits.json").write_text(text + "\n", encoding="utf-8")
    print(text)
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg, _ = _load(args.config)
    seed = resolve_seed(args.seed, cfg)
    n = args.n or cfg.n
    x = process.simulate_path(cfg.spec, n, Stream(seed, 0), rep=args.rep)
    outdir = Path(args.output or cfg.output)
    outdir.mkdir(parents=True, exist_ok=True)
    _write_series(outdir / "series.csv", x)
    print(f"{n} values written to {outdir / 'series.csv'}")
    return EXIT_OK


def cmd_verify(args) -> int:
    ids = sorted(CRITERIA) if not args.criteria else [int(c) for c in args.criteria.split(",")]
    unknown = [i for i in ids if i not in CRITERIA]
    if unknown:
        raise ConfigError("--criteria", f"unknown criteria {unknown}")
    seed = args.seed if args.seed is not None else int(os.environ.get(SEED_ENV, "20240601"))
    battery = Battery(args.suite, seed, args.workers)
    results = []
    for i in ids:
        r = battery.run([i])[0]
        results.append(r)
        print(r.summary(), flush=True)
        if args.verbose:
            for c in r.checks:
                flag = "ok " if c.passed else "BAD"
                print(f"    {flag} {c.label}: theory {c.theory:.6g} estimate {c.estimate:.6g} "
                      f"stderr {c.stderr:.3g} z {c.z:.2f} [{c.rule}]", flush=True)
    failed = [r.id for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed" + (f"; failed: {failed}" if failed else ""))
    if args.json:
        write_json(Path(args.json), {"suite": args.suite, "seed": seed, "build": build_id(),
                                     "results": [r.to_dict() for r in results]})
    return EXIT_FAIL if failed else EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ldpoint",
        description="Heavy-tailed linear processes: limit constants against Monte Carlo.",
        epilog=f"The default seed is read from ${SEED_ENV} when neither --seed nor run.seed is given.",
    )
    parser.add_argument("--version", action="version", version=f"ldpoint {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run the configured experiment and write report.json")
    p.add_argument("config")
    p.add_argument("--output", help="output directory (overrides run.output)")
    p.add_argument("--seed", type=int, help="seed (overrides run.seed)")
    p.add_argument("--workers", type=int, help="worker threads (results do not depend on it)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("verify", help="run the acceptance battery")
    p.add_argument("suite", choices=SUITES)
    p.add_argument("--criteria", help="comma-separated criterion ids (default: all)")
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--json", help="write results to this file")
    p.add_argument("-v", "--verbose", action="store_true", help="print every check")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("limits", help="print the limit constants for a configuration")
    p.add_argument("config")
    p.add_argument("--output", help="also write limits.json into this directory")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_limits)

    p = sub.add_parser("simulate", help="dump one stationary path as series.csv")
    p.add_argument("config")
    p.add_argument("--n", type=int, help="path length (default: plan.n)")
    p.add_argument("--rep", type=int, default=0, help="replication index")
    p.add_argument("--output", help="output directory (overrides run.output)")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (ConditionError, pp.PlanError) as exc:
        print(f"model validation failed: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
