import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ldpoint import cli, noise, verify
from ldpoint.config import ConfigError, dump_config, load_config, parse_config

CONFIGS = sorted((Path(__file__).resolve().parent.parent / "configs").glob("*.ini"))

IID_RUIN = """
[noise]
alpha = 1.5
[process]
kind = iid
[plan]
n = 1000
[experiment]
kind = ruin
u = 200
c = 1
M = 5
[run]
reps = 4000
seed = 3
"""


def _write(tmp_path, text, name="exp.ini"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


# ---------------------------------------------------------------- config


@pytest.mark.parametrize("path", CONFIGS, ids=lambda p: p.stem)
def test_shipped_configs_round_trip(path):
    cfg = load_config(path)
    text = dump_config(cfg)
    again = parse_config(text)
    assert again == cfg
    assert dump_config(again) == text


@given(
    alpha=st.floats(0.3, 1.95),
    beta_pad=st.floats(0.01, 1.0),
    coeffs=st.lists(st.floats(0.0, 2.0).map(lambda c: round(c, 6)), min_size=1, max_size=4),
    n=st.integers(1, 10**6),
    reps=st.integers(1, 10**6),
    rho=st.floats(0.05, 10.0),
)
def test_round_trip_property(alpha, beta_pad, coeffs, n, reps, rho):
    beta = max(1.0, 1.0 / alpha) + beta_pad
    text = f"""
[noise]
alpha = {alpha!r}
[process]
kind = ma
coeffs = {", ".join(repr(c) for c in coeffs)}
[plan]
n = {n}
beta = {beta!r}
[experiment]
kind = partial_sum
rho = {rho!r}
[run]
reps = {reps}
"""
    cfg = parse_config(text)
    dumped = dump_config(cfg)
    assert parse_config(dumped) == cfg
    assert dump_config(parse_config(dumped)) == dumped


def test_unknown_key_is_rejected():
    with pytest.raises(ConfigError) as exc:
        parse_config(IID_RUIN.replace("c = 1", "c = 1\ndrift = 2"))
    assert exc.value.key == "experiment.drift"
    with pytest.raises(ConfigError) as exc:
        parse_config(IID_RUIN.replace("[process]", "[extra]\nx = 1\n[process]"))
    assert exc.value.key == "extra"


@pytest.mark.parametrize(
    "old, new, key",
    [
        ("alpha = 1.5", "alpha = 0", "noise.alpha"),
        ("alpha = 1.5", "alpha = -1", "noise.alpha"),
        ("n = 1000", "n = 0", "plan.n"),
        ("reps = 4000", "reps = 0", "run.reps"),
        ("kind = ruin", "kind = bogus", "experiment.kind"),
    ],
)
def test_invalid_values_name_the_key(old, new, key):
    with pytest.raises(ConfigError) as exc:
        parse_config(IID_RUIN.replace(old, new))
    assert exc.value.key == key


# ---------------------------------------------------------------- cli


def test_run_nonpositive_alpha_exits_2(tmp_path, capsys):
    path = _write(tmp_path, IID_RUIN.replace("alpha = 1.5", "alpha = 0"))
    assert cli.main(["run", path, "--output", str(tmp_path / "out")]) == cli.EXIT_INVALID
    assert "noise.alpha" in capsys.readouterr().err
    assert not (tmp_path / "out" / "report.json").exists()


def test_run_inadmissible_beta_exits_2(tmp_path, capsys):
    text = IID_RUIN.replace("alpha = 1.5", "alpha = 0.8").replace("n = 1000", "n = 1000\nbeta = 1")
    text = text.replace("kind = ruin\nu = 200\nc = 1\nM = 5", "kind = partial_sum\nrho = 1")
    assert cli.main(["run", _write(tmp_path, text), "--output", str(tmp_path / "o")]) == cli.EXIT_INVALID
    assert "plan.beta" in capsys.readouterr().err


def test_iid_ruin_report(tmp_path, capsys):
    out = tmp_path / "out"
    assert cli.main(["run", _write(tmp_path, IID_RUIN), "--output", str(out)]) == cli.EXIT_OK
    doc = json.loads((out / "report.json").read_text())
    # w (max(A,0))^alpha / (c (alpha - 1)) = 0.5 / 0.5
    assert doc["theory"] == 1.0
    assert doc["experiment"] == "ruin"
    assert doc["seed"] == 3
    assert doc["reps"] == 4000
    lo, hi = doc["ci95"]
    assert lo <= doc["estimate"] <= hi
    assert np.isfinite(doc["z"])
    assert doc["conditions"]["H"]["status"] == "holds"
    assert doc["build"].startswith("ldpoint-")
    assert parse_config(doc["config"]) == parse_config(IID_RUIN)
    assert "theory 1" in capsys.readouterr().out


def test_reports_are_byte_identical(tmp_path):
    path = _write(tmp_path, IID_RUIN)
    a, b, c = tmp_path / "a", tmp_path / "b", tmp_path / "c"
    assert cli.main(["run", path, "--output", str(a)]) == 0
    assert cli.main(["run", path, "--output", str(b)]) == 0
    assert (a / "report.json").read_bytes() == (b / "report.json").read_bytes()
    # the worker count only shows up in the echoed config
    assert cli.main(["run", path, "--output", str(c), "--workers", "3"]) == 0
    ra, rc = (json.loads((d / "report.json").read_text()) for d in (a, c))
    for key in ("theory", "estimate", "stderr", "ci95", "z", "estimates", "constants"):
        assert ra[key] == rc[key]


def test_seed_from_environment(tmp_path, monkeypatch):
    path = _write(tmp_path, IID_RUIN.replace("seed = 3\n", ""))
    monkeypatch.setenv(cli.SEED_ENV, "41")
    assert cli.main(["run", path, "--output", str(tmp_path / "e")]) == 0
    assert json.loads((tmp_path / "e" / "report.json").read_text())["seed"] == 41
    # the flag beats the environment
    assert cli.main(["run", path, "--output", str(tmp_path / "f"), "--seed", "5"]) == 0
    assert json.loads((tmp_path / "f" / "report.json").read_text())["seed"] == 5
    monkeypatch.delenv(cli.SEED_ENV)
    assert cli.resolve_seed(None, parse_config(IID_RUIN.replace("seed = 3\n", ""))) == 0


def test_degenerate_run_exits_3(tmp_path, capsys):
    text = IID_RUIN.replace("kind = ruin\nu = 200\nc = 1\nM = 5", "kind = order_stats\nu = 1e12")
    text = text.replace("reps = 4000", "reps = 200")
    out = tmp_path / "d"
    assert cli.main(["run", _write(tmp_path, text), "--output", str(out)]) == cli.EXIT_DEGENERATE
    assert json.loads((out / "report.json").read_text())["degenerate"] is True
    assert "degenerate" in capsys.readouterr().err


def test_limits_command(tmp_path, capsys):
    out = tmp_path / "lim"
    assert cli.main(["limits", _write(tmp_path, IID_RUIN), "--output", str(out)]) == 0
    printed = json.loads(capsys.readouterr().out)
    assert printed == json.loads((out / "limits.json").read_text())
    assert printed["constants"]["ruin"]["value"] == 1.0


def test_simulate_command(tmp_path):
    out = tmp_path / "sim"
    assert cli.main(["simulate", _write(tmp_path, IID_RUIN), "--n", "50", "--output", str(out)]) == 0
    lines = (out / "series.csv").read_text().splitlines()
    assert lines[0] == "k,x"
    assert len(lines) == 51
    x = np.array([float(r.split(",")[1]) for r in lines[1:]])
    assert np.all(np.abs(x) >= 1.0)


def test_verify_subset(tmp_path, capsys):
    out = tmp_path / "v.json"
    assert cli.main(["verify", "quick", "--criteria", "1,8", "--json", str(out)]) == cli.EXIT_OK
    text = capsys.readouterr().out
    assert "2/2 criteria passed" in text
    doc = json.loads(out.read_text())
    assert [r["id"] for r in doc["results"]] == [1, 8]


def test_verify_unknown_criterion_exits_2(capsys):
    assert cli.main(["verify", "quick", "--criteria", "12"]) == cli.EXIT_INVALID


def test_entry_point_help():
    proc = subprocess.run([sys.executable, "-m", "ldpoint", "--help"], capture_output=True, text=True, check=True)
    for name in ("run", "verify", "limits", "simulate"):
        assert name in proc.stdout


# ---------------------------------------------------------------- mutation


def test_wrong_sign_weight_is_caught(monkeypatch):
    """A sign rule that puts mass 0.1 on the positive side must fail the order-statistic check."""

    def bad_sign(z, u_sign, law):
        np.copysign(z, 0.1 - u_sign, out=z)

    monkeypatch.setattr(noise, "apply_sign", bad_sign)
    battery = verify.Battery("quick")
    battery.scale = dict(battery.scale, c456_reps=20_000)
    res = battery.run([4])[0]
    assert not res.passed
    assert all(abs(c.z) > 4 for c in res.checks)
