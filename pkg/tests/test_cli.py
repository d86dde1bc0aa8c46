import csv
import functools
import json
from pathlib import Path

import numpy as np
import pytest

from ultrarel import cli, glimm, riemann, wavecurves
from ultrarel.eos import EosParams
from ultrarel.wavecurves import NumericalError

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def write_cfg(tmp_path, cfg, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg) if not isinstance(cfg, str) else cfg)
    return path


def small_glimm(**over):
    cfg = {"problem": {"type": "riemann", "left": {"rho": 1.0, "v": 0.0, "S": 1.0},
                       "right": {"rho": 0.1, "v": 0.0, "S": 1.0}},
           "grid": {"domain": [-1.0, 1.0], "n_cells": 40, "t_end": 0.2}}
    cfg.update(over)
    return cfg


def read_rows(path):
    with open(path) as fh:
        return list(csv.reader(fh))


def test_riemann_command(tmp_path):
    out = tmp_path / "out"
    assert cli.main(["riemann", "--config", str(CONFIGS / "shock_tube_riemann.json"),
                     "--out", str(out)]) == 0
    fan = json.loads((out / "fan.json").read_text())
    assert fan["region"] == "IV" and fan["wave3"]["type"] == "shock"
    assert fan["intersection_residual"] <= 1e-11
    rows = read_rows(out / "profile.csv")
    assert ",".join(rows[0]) == cli.PROFILE_HEADER
    assert len(rows) == 201


def test_glimm_command(tmp_path):
    out = tmp_path / "out"
    cfg = write_cfg(tmp_path, small_glimm(output={"stride": 5}))
    assert cli.main(["glimm", "--config", str(cfg), "--out", str(out)]) == 0
    rows = read_rows(out / "diagnostics.csv")
    assert ",".join(rows[0]) == cli.DIAG_HEADER
    summary = json.loads((out / "summary.json").read_text())
    assert summary["status"] == "ok" and summary["grid"]["n_cells"] == 40
    assert len(rows) == summary["grid"]["n_steps"] + 2
    profiles = sorted(out.glob("profile_*.csv"))
    assert profiles and ",".join(read_rows(profiles[0])[0]) == cli.PROFILE_HEADER
    assert not (out / "failure.json").exists()


def test_glimm_seed_override(tmp_path):
    cfg = write_cfg(tmp_path, small_glimm(sampling={"kind": "pseudorandom", "seed": 1}))
    for seed, d in ((None, "a"), (1, "b"), (2, "c")):
        argv = ["glimm", "--config", str(cfg), "--out", str(tmp_path / d)]
        assert cli.main(argv + (["--seed", str(seed)] if seed is not None else [])) == 0
    a, b, c = ((tmp_path / d / "diagnostics.csv").read_bytes() for d in "abc")
    assert a == b and a != c


def test_curves_command(tmp_path, p43):
    out = tmp_path / "out"
    assert cli.main(["curves", "--config", str(CONFIGS / "curves.json"), "--out", str(out)]) == 0
    one = np.loadtxt(out / "shock_1.csv", delimiter=",", skiprows=1)
    three = np.loadtxt(out / "shock_3.csv", delimiter=",", skiprows=1)
    assert np.all(one[0, 4:7] == 0.0) and np.all(three[0, 4:7] == 0.0)
    # the 3-curve mirrors the 1-curve: dr <-> ds, dSigma -> -dSigma
    assert np.array_equal(one[:, 4], three[:, 5]) and np.array_equal(one[:, 6], -three[:, 6])
    delta = np.loadtxt(out / "delta.csv", delimiter=",", skiprows=1)
    assert np.allclose(delta[:, 2], wavecurves.sigma_jump(delta[:, 0], p43), rtol=1e-15, atol=0)
    for fam in (1, 3):
        rare = np.loadtxt(out / f"rarefaction_{fam}.csv", delimiter=",", skiprows=1)
        assert np.allclose(rare[:, 6], 0.0, atol=1e-14)


def test_interactions_command(tmp_path):
    out = tmp_path / "out"
    cfg = write_cfg(tmp_path, {"sweep": {"count": 300, "seed": 4},
                               "output": {"per_sample_csv": True}})
    assert cli.main(["interactions", "--config", str(cfg), "--out", str(out)]) == 0
    stats = json.loads((out / "stats.json").read_text())
    assert stats["sweep"]["count"] == 300 and stats["suite"]["violations"] == 0
    assert len(read_rows(out / "samples.csv")) == 301


@pytest.mark.parametrize("cfg, needle", [
    ('{"problem": ', "line 1"),
    (small_glimm(bogus=1), "bogus"),
    (small_glimm(problem={"type": "riemann", "left": {"rho": -1.0, "v": 0.0, "S": 1.0},
                          "right": {"rho": 0.1, "v": 0.0, "S": 1.0}}), "problem.left"),
    (small_glimm(grid={"domain": [-1.0, 1.0], "t_end": 0.2}), "n_cells"),
    (small_glimm(eos={"gamma": 2.5}), "eos.gamma"),
])
def test_config_errors(tmp_path, capsys, cfg, needle):
    out = tmp_path / "out"
    path = write_cfg(tmp_path, cfg)
    assert cli.main(["glimm", "--config", str(path), "--out", str(out)]) == cli.EXIT_CONFIG
    assert needle in capsys.readouterr().err
    assert not out.exists()


def test_seed_with_van_der_corput_is_config_error(tmp_path):
    path = write_cfg(tmp_path, small_glimm())
    argv = ["glimm", "--config", str(path), "--out", str(tmp_path / "o"), "--seed", "3"]
    assert cli.main(argv) == cli.EXIT_CONFIG


def test_missing_config_and_bad_arguments(tmp_path):
    assert cli.main(["riemann", "--config", str(tmp_path / "nope.json"),
                     "--out", str(tmp_path)]) == cli.EXIT_CONFIG
    assert cli.main(["riemann"]) == cli.EXIT_CONFIG
    assert cli.main(["frobnicate"]) == cli.EXIT_CONFIG


def test_monitor_violation_exit(tmp_path, monkeypatch):
    monkeypatch.setattr(glimm, "run", functools.partial(glimm.run, slack_rel=-1.0))
    out = tmp_path / "out"
    path = write_cfg(tmp_path, small_glimm())
    assert cli.main(["glimm", "--config", str(path), "--out", str(out)]) == cli.EXIT_VIOLATION
    assert json.loads((out / "summary.json").read_text())["status"] == "monitor_violation"
    assert (out / "failure.json").exists()


def test_numerical_failure_exit(tmp_path, monkeypatch):
    def boom(*args, **kwargs):
        raise NumericalError("no convergence")
    monkeypatch.setattr(riemann, "solve", boom)
    path = CONFIGS / "shock_tube_riemann.json"
    assert cli.main(["riemann", "--config", str(path),
                     "--out", str(tmp_path / "o")]) == cli.EXIT_NUMERICAL


def test_outputs_deterministic(tmp_path):
    for cmd, cfg in (("riemann", CONFIGS / "shock_tube_riemann.json"),
                     ("curves", CONFIGS / "curves.json")):
        for d in ("a", "b"):
            assert cli.main([cmd, "--config", str(cfg), "--out", str(tmp_path / cmd / d)]) == 0
        a, b = tmp_path / cmd / "a", tmp_path / cmd / "b"
        for f in a.iterdir():
            assert f.read_bytes() == (b / f.name).read_bytes()


def test_fmt_and_dumps():
    assert cli.fmt(0.1) == "0.10000000000000001"
    assert cli.fmt(-0.0) == "0" and cli.fmt(3) == "3" and cli.fmt(True) == "true"
    assert cli.dumps17({"x": [1.5, float("nan")], "y": {}}) == \
        '{\n  "x": [\n    1.5,\n    null\n  ],\n  "y": {}\n}'
    assert float(cli.fmt(EosParams(4 / 3).a)) == EosParams(4 / 3).a
