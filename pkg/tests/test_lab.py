from __future__ import annotations

import json
import math
import os
from pathlib import Path

import numpy as np
import pytest

from dispersive_lab.dynamics import EquationSpec, linear_trajectory
from dispersive_lab.errors import ConfigurationError, OutputError
from dispersive_lab.lab import build_config, load_config, run_scenario
from dispersive_lab.lab.cli import main
from dispersive_lab.lab.emit import (
    NORM_COLUMNS,
    norm_rows,
    read_table,
    sha256,
    verify_manifest,
    write_norms,
    write_table,
)
from dispersive_lab.spectral import Field, make_grid

# --- configuration --------------------------------------------------------------------


def test_minimal_file_gets_defaults(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text("scenario: linear_decay_kdv\n")
    cfg = load_config(path)
    assert cfg.n == 8192 and cfg.L == pytest.approx(400 * math.pi)
    assert cfg.window == [5.0, 50.0]
    assert cfg.tolerances["Linf"] == 0.03


def test_json_accepted(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"scenario": "kato_identity", "x_star": [0.0, 2.0]}))
    assert load_config(path).x_star == [0.0, 2.0]


def test_unknown_key_named(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text("scenario: linear_decay_kdv\ndt_rulee: 3\n")
    with pytest.raises(ConfigurationError, match="dt_rulee"):
        load_config(path)


def test_power_must_be_positive():
    with pytest.raises(ConfigurationError, match="k"):
        build_config({"scenario": "nonlinear_decay_gkdv", "k": 0})


def test_parse_error_reports_line(tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text("scenario: kato_identity\nx_star: [0.0, 1.0\nT: 3\n")
    with pytest.raises(ConfigurationError, match=r"bad\.yaml:\d+"):
        load_config(path)


def test_missing_file_and_scenario(tmp_path):
    with pytest.raises(ConfigurationError):
        load_config(tmp_path / "absent.yaml")
    with pytest.raises(ConfigurationError, match="scenario"):
        build_config({"n": 64})
    with pytest.raises(ConfigurationError, match="unknown scenario"):
        build_config({"scenario": "nope"})


def test_zero_amplitude_is_degenerate():
    with pytest.raises(ConfigurationError, match="degenerate"):
        build_config({"scenario": "linear_decay_kdv", "data": {"epsilon": 0.0}})


def test_inadmissible_exponent():
    with pytest.raises(ConfigurationError, match="r >= 2"):
        build_config({"scenario": "linear_decay_kdv", "r_values": [1.5]})


# --- emission ---------------------------------------------------------------------


@pytest.fixture
def small_traj():
    g = make_grid(1, 256, 60.0)
    u0 = Field.from_function(g, lambda x: np.exp(-0.5 * x * x))
    return linear_trajectory(u0, EquationSpec("airy", 1, 4), np.linspace(0, 2, 9), r_values=[4.0])


def test_norms_round_trip(tmp_path, small_traj):
    path = write_norms(tmp_path, small_traj, "L4")
    table = read_table(path)
    assert tuple(table) == NORM_COLUMNS
    for name, col in zip(NORM_COLUMNS, zip(*norm_rows(small_traj, "L4"))):
        assert np.array_equal(table[name], np.array(col, dtype=float), equal_nan=True)


def test_empty_table_is_header_only(tmp_path):
    path = write_table(tmp_path, "empty.csv", NORM_COLUMNS, [])
    assert path.read_text().strip() == ",".join(NORM_COLUMNS)


def test_no_writes_outside_outdir(tmp_path):
    with pytest.raises(OutputError):
        write_table(tmp_path / "run", "../escape.csv", ("a",), [])
    assert not (tmp_path / "escape.csv").exists()


def test_unwritable_path_is_named(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OutputError, match="file"):
        write_table(blocker, "t.csv", ("a",), [])


# --- scenarios --------------------------------------------------------------------


@pytest.fixture(scope="module")
def kdv_runs(tmp_path_factory):
    base = tmp_path_factory.mktemp("kdv")
    cfg = build_config({"scenario": "linear_decay_kdv"})
    return run_scenario(cfg, base / "a"), run_scenario(cfg, base / "b")


def test_linear_kdv_passes(kdv_runs):
    m, _ = kdv_runs
    assert m.passed and m.exit_code == 0
    fits = {f["norm"]: f for f in m.summary["fits"]}
    assert abs(fits["Linf"]["exponent"] + 1 / 3) < 0.03


def test_replay_is_byte_identical(kdv_runs):
    a, b = kdv_runs
    for name in ("norms.csv", "series.csv", "fit.json"):
        assert (Path(a.outdir) / name).read_bytes() == (Path(b.outdir) / name).read_bytes()


def test_manifest_hashes(kdv_runs):
    m, _ = kdv_runs
    data = json.loads((Path(m.outdir) / "manifest.json").read_text())
    assert data["pass"] is True
    for name, digest in data["files"].items():
        assert sha256(Path(m.outdir) / name) == digest
    assert verify_manifest(Path(m.outdir)) == []


def test_tampered_file_detected(tmp_path):
    m = run_scenario(build_config({"scenario": "kato_identity"}), tmp_path / "k")
    assert m.passed
    with open(Path(m.outdir) / "kato.csv", "a") as fh:
        fh.write("0,0\n")
    assert verify_manifest(Path(m.outdir)) == ["kato.csv"]


def test_only_outdir_touched(tmp_path):
    before = set(os.listdir(tmp_path))
    run_scenario(build_config({"scenario": "kato_identity"}), tmp_path / "only")
    assert set(os.listdir(tmp_path)) - before == {"only"}


BLOWUP = {
    "scenario": "nonlinear_decay_gkdv", "n": 256, "L": 40.0, "sign": "focusing", "T": 5.0, "dt": 0.05,
    "window": [0.5, None], "data": {"kind": "gaussian", "calibrate": "none", "epsilon": 6.0, "center": 0.0},
}


def test_blowup_recorded_not_raised(tmp_path):
    m = run_scenario(build_config(BLOWUP), tmp_path / "b")
    assert not m.passed and m.numeric_failure and m.exit_code == 3
    assert any("blow-up" in f for f in m.failures)
    assert (Path(m.outdir) / "manifest.json").exists()


# --- command line -----------------------------------------------------------------


def test_cli_exit_codes(tmp_path, capsys):
    assert main(["kato", "--out", str(tmp_path / "k")]) == 0
    assert main(["report", str(tmp_path / "k")]) == 0
    assert main(["kato", "--set", "dt_rulee=3", "--out", str(tmp_path / "x")]) == 2
    assert "dt_rulee" in capsys.readouterr().err
    assert main(["nonlinear-decay", "--k", "0", "--dry-run"]) == 2
    assert main(["linear-decay", "--scenario", "anisotropic_zk4d", "--dry-run"]) == 2


def test_cli_dry_run_and_config(tmp_path, capsys):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("scenario: linear_decay_zk3d\n")
    assert main(["linear-decay", "--config", str(cfg), "--dry-run"]) == 0
    plan = json.loads(capsys.readouterr().out)
    assert plan["scenario"] == "linear_decay_zk3d"
    assert not (tmp_path / "runs").exists()


def test_cli_numeric_failure(tmp_path):
    cfg = tmp_path / "b.json"
    cfg.write_text(json.dumps(BLOWUP))
    assert main(["nonlinear-decay", "--config", str(cfg), "--out", str(tmp_path / "b")]) == 3
    assert main(["report", str(tmp_path / "b")]) == 3
