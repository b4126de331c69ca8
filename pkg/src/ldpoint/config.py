"""Experiment configuration: a strict INI grammar with sections.

Example::

    [noise]
    alpha = 1.5
    w = 0.5
    u0 = 1
    centered = false

    [process]
    kind = ma            ; iid | ma | rcma | sre | sv
    coeffs = 1, 0.5
    jmin = 0

    [plan]
    n = 10000
    beta = 1

    [experiment]
    kind = order_stats   ; tail | pointproc_F | order_stats | hitting | partial_sum | ruin
    u = 1, 1

    [run]
    reps = 100000
    seed = 7
    workers = 1
    output = out

Process keys by kind: ``ma``: coeffs, jmin; ``rcma``: vectors (``|``-separated
rows of comma-separated numbers), probs, jmin; ``sre``: y_values, y_probs;
``sv``: the ``sre`` keys plus v_values, v_probs.

Experiment keys by kind: ``tail``: x, length, side; ``pointproc_F``: q, g1,
g2 (``a, b[, s0, s1, h, timed]``), eps1, eps2, limit_reps, rho; ``order_stats``:
u; ``hitting``: lam, a; ``partial_sum``: rho, absolute; ``ruin``: u, c, M.
Unknown sections or keys are errors.
"""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, field

from . import process
from .noise import LawError, RegVarLaw
from .pointproc import AnnulusTestFn
from .process import IID, SRE, DiscreteLaw, MovingAverage, ProcessSpec, RandomCoefMA, StochVol, VectorLaw

EXPERIMENTS = ("tail", "pointproc_F", "order_stats", "hitting", "partial_sum", "ruin")
PROCESS_KINDS = ("iid", "ma", "rcma", "sre", "sv")

_PROCESS_KEYS = {
    "iid": (),
    "ma": ("coeffs", "jmin"),
    "rcma": ("vectors", "probs", "jmin"),
    "sre": ("y_values", "y_probs"),
    "sv": ("y_values", "y_probs", "v_values", "v_probs"),
}

# experiment key -> (type, default); a default of ... marks a required key
_EXPERIMENT_KEYS = {
    "tail": {"x": ("float", ...), "length": ("int", 100_000), "side": ("str", "positive")},
    "pointproc_F": {
        "q": ("int", 0),
        "g1": ("fn", ...),
        "g2": ("fn", ...),
        "eps1": ("float", ...),
        "eps2": ("float", ...),
        "limit_reps": ("int", 1_000_000),
        "rho": ("float", None),
    },
    "order_stats": {"u": ("floats", ...)},
    "hitting": {"lam": ("float", ...), "a": ("float", ...)},
    "partial_sum": {"rho": ("float", ...), "absolute": ("bool", False)},
    "ruin": {"u": ("float", ...), "c": ("float", ...), "M": ("int", 20)},
}

_RUN_KEYS = {
    "reps": ("int", ...),
    "seed": ("int", None),
    "workers": ("int", 1),
    "output": ("str", "ldpoint-out"),
    "tilt_alpha": ("float", None),
    "tilt_scheme": ("str", "single"),
}


class ConfigError(ValueError):
    """Invalid configuration; ``key`` names the offending ``section.key``."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


@dataclass(frozen=True)
class ExperimentConfig:
    spec: ProcessSpec
    n: int
    beta: float
    experiment: str
    params: dict = field(hash=False)
    reps: int
    seed: int | None
    workers: int = 1
    output: str = "ldpoint-out"
    tilt_alpha: float | None = None
    tilt_scheme: str = "single"

    @property
    def noise(self) -> RegVarLaw:
        return self.spec.noise


# ---------------------------------------------------------------- value parsing


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, AnnulusTestFn):
        return ", ".join(_fmt(x) for x in (v.a, v.b, v.s0, v.s1, v.h)) + (", true" if v.timed else ", false")
    if isinstance(v, (tuple, list)):
        return ", ".join(_fmt(x) for x in v)
    return str(v)


def _parse(kind: str, raw: str, key: str):
    try:
        if kind == "float":
            return float(raw)
        if kind == "int":
            f = float(raw)
            if f != int(f):
                raise ValueError("not an integer")
            return int(f)
        if kind == "bool":
            low = raw.strip().lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError("not a boolean")
        if kind == "floats":
            return tuple(float(x) for x in raw.split(",") if x.strip())
        if kind == "fn":
            parts = [p.strip() for p in raw.split(",")]
            nums = [float(p) for p in parts[:5]]
            timed = _parse("bool", parts[5], key) if len(parts) > 5 else True
            if len(parts) not in (2, 4, 5, 6):
                raise ValueError("expected a, b[, s0, s1[, h[, timed]]]")
            a, b = nums[0], nums[1]
            s0, s1 = (nums[2], nums[3]) if len(nums) >= 4 else (0.0, 1.0)
            h = nums[4] if len(nums) == 5 else 1.0
            return AnnulusTestFn(a, b, s0, s1, h, timed)
        return raw.strip()
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(key, f"cannot read {raw!r} ({exc})") from None


def _section(cp: configparser.ConfigParser, name: str, allowed) -> dict:
    if not cp.has_section(name):
        raise ConfigError(name, "missing section")
    items = dict(cp.items(name))
    for k in items:
        if k not in allowed:
            raise ConfigError(f"{name}.{k}", "unknown key")
    return items


def _typed(items: dict, table: dict, section: str) -> dict:
    out = {}
    for k, (kind, default) in table.items():
        if k in items:
            out[k] = _parse(kind, items[k], f"{section}.{k}")
        elif default is ...:
            raise ConfigError(f"{section}.{k}", "required key missing")
        else:
            out[k] = default
    return out


# ---------------------------------------------------------------- process sections


def _discrete(items: dict, vk: str, pk: str) -> DiscreteLaw:
    if vk not in items:
        raise ConfigError(f"process.{vk}", "required key missing")
    vals = _parse("floats", items[vk], f"process.{vk}")
    probs = _parse("floats", items[pk], f"process.{pk}") if pk in items else None
    try:
        return DiscreteLaw(vals, probs)
    except ValueError as exc:
        raise ConfigError(f"process.{vk}", str(exc)) from None


def _build_spec(items: dict, law: RegVarLaw) -> ProcessSpec:
    kind = items.get("kind", "").strip()
    if kind not in PROCESS_KINDS:
        raise ConfigError("process.kind", f"must be one of {', '.join(PROCESS_KINDS)}")
    for k in items:
        if k != "kind" and k not in _PROCESS_KEYS[kind]:
            raise ConfigError(f"process.{k}", f"unknown key for kind {kind}")
    try:
        if kind == "iid":
            return IID(law)
        jmin = _parse("int", items.get("jmin", "0"), "process.jmin")
        if kind == "ma":
            if "coeffs" not in items:
                raise ConfigError("process.coeffs", "required key missing")
            return MovingAverage(_parse("floats", items["coeffs"], "process.coeffs"), law, jmin)
        if kind == "rcma":
            if "vectors" not in items:
                raise ConfigError("process.vectors", "required key missing")
            rows = [r for r in items["vectors"].split("|") if r.strip()]
            vecs = tuple(_parse("floats", r, "process.vectors") for r in rows)
            probs = _parse("floats", items["probs"], "process.probs") if "probs" in items else None
            return RandomCoefMA(VectorLaw(vecs, probs, jmin), law)
        base = SRE(_discrete(items, "y_values", "y_probs"), law)
        if kind == "sre":
            return base
        return StochVol(base, _discrete(items, "v_values", "v_probs"))
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError("process", str(exc)) from None


def _spec_items(spec: ProcessSpec) -> dict:
    if isinstance(spec, IID):
        return {"kind": "iid"}
    if isinstance(spec, MovingAverage):
        return {"kind": "ma", "coeffs": _fmt(spec.coeffs), "jmin": str(spec.jmin)}
    if isinstance(spec, RandomCoefMA):
        cl = spec.coeff_law
        return {
            "kind": "rcma",
            "vectors": " | ".join(_fmt(v) for v in cl.vectors),
            "probs": _fmt(cl.probs),
            "jmin": str(cl.jmin),
        }
    base = spec.base if isinstance(spec, StochVol) else spec
    out = {"kind": "sre", "y_values": _fmt(base.y_law.values), "y_probs": _fmt(base.y_law.probs)}
    if isinstance(spec, StochVol):
        out.update(kind="sv", v_values=_fmt(spec.v_law.values), v_probs=_fmt(spec.v_law.probs))
    return out


# ---------------------------------------------------------------- public API


def parse_config(text: str) -> ExperimentConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"), interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError("config", str(exc).splitlines()[0]) from None
    for s in cp.sections():
        if s not in ("noise", "process", "plan", "experiment", "run"):
            raise ConfigError(s, "unknown section")

    nz = _typed(
        _section(cp, "noise", ("alpha", "w", "u0", "centered")),
        {"alpha": ("float", ...), "w": ("float", 0.5), "u0": ("float", 1.0), "centered": ("bool", False)},
        "noise",
    )
    try:
        law = RegVarLaw(nz["alpha"], nz["w"], nz["u0"], nz["centered"])
    except LawError as exc:
        msg = str(exc)
        key = next((k for k in ("alpha", "w", "u0", "centered") if msg.startswith(k)), "alpha")
        raise ConfigError(f"noise.{key}", msg) from None

    if not cp.has_section("process"):
        raise ConfigError("process", "missing section")
    spec = _build_spec(dict(cp.items("process")), law)

    plan = _typed(_section(cp, "plan", ("n", "beta")), {"n": ("int", ...), "beta": ("float", 1.0)}, "plan")
    if plan["n"] < 1:
        raise ConfigError("plan.n", "must be >= 1")
    ok, why = process.gamma_admissible(law.alpha, plan["beta"])
    if not ok:
        raise ConfigError("plan.beta", why)

    ex_items = dict(cp.items("experiment")) if cp.has_section("experiment") else None
    if ex_items is None:
        raise ConfigError("experiment", "missing section")
    kind = ex_items.pop("kind", "").strip()
    if kind not in EXPERIMENTS:
        raise ConfigError("experiment.kind", f"must be one of {', '.join(EXPERIMENTS)}")
    table = _EXPERIMENT_KEYS[kind]
    for k in ex_items:
        if k not in table:
            raise ConfigError(f"experiment.{k}", f"unknown key for {kind}")
    params = _typed(ex_items, table, "experiment")

    run = _typed(_section(cp, "run", tuple(_RUN_KEYS)), _RUN_KEYS, "run")
    if run["reps"] < 1:
        raise ConfigError("run.reps", "must be >= 1")
    if run["workers"] < 1:
        raise ConfigError("run.workers", "must be >= 1")
    if run["seed"] is not None and run["seed"] < 0:
        raise ConfigError("run.seed", "must be >= 0")
    if run["tilt_scheme"] not in ("single", "product"):
        raise ConfigError("run.tilt_scheme", "must be single or product")
    if run["tilt_alpha"] is not None and not 0 < run["tilt_alpha"] <= law.alpha:
        raise ConfigError("run.tilt_alpha", "must lie in (0, alpha]")

    return ExperimentConfig(
        spec=spec,
        n=plan["n"],
        beta=plan["beta"],
        experiment=kind,
        params=params,
        reps=run["reps"],
        seed=run["seed"],
        workers=run["workers"],
        output=run["output"],
        tilt_alpha=run["tilt_alpha"],
        tilt_scheme=run["tilt_scheme"],
    )


def load_config(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def dump_config(cfg: ExperimentConfig) -> str:
    """Canonical text form; ``parse_config(dump_config(c)) == c``."""
    law = cfg.noise
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    cp["noise"] = {"alpha": _fmt(law.alpha), "w": _fmt(law.w), "u0": _fmt(law.u0), "centered": _fmt(law.centered)}
    cp["process"] = _spec_items(cfg.spec)
    cp["plan"] = {"n": str(cfg.n), "beta": _fmt(cfg.beta)}
    ex = {"kind": cfg.experiment}
    ex.update({k: _fmt(v) for k, v in cfg.params.items() if v is not None})
    cp["experiment"] = ex
    run = {"reps": str(cfg.reps), "workers": str(cfg.workers), "output": cfg.output, "tilt_scheme": cfg.tilt_scheme}
    if cfg.seed is not None:
        run["seed"] = str(cfg.seed)
    if cfg.tilt_alpha is not None:
        run["tilt_alpha"] = _fmt(cfg.tilt_alpha)
    cp["run"] = run
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()
