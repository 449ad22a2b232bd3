import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from taunav.cli import main

CONFIG_DIR = Path(__file__).resolve().parents[1] / "configs"


@pytest.fixture
def runner():
    return CliRunner()


def invoke(runner, *args):
    return runner.invoke(main, list(args), catch_exceptions=False)


def test_simulate_writes_outputs(runner, tmp_path):
    result = invoke(runner, "simulate",
                    "--config", str(CONFIG_DIR / "straight_corridor.json"),
                    "--out", str(tmp_path))
    assert result.exit_code == 0, result.output
    csv = (tmp_path / "episode.csv").read_text()
    assert csv.splitlines()[0].startswith("t,x,y,theta,v,u,phase,mode")
    sidecar = json.loads((tmp_path / "episode.json").read_text())
    assert "metrics" in sidecar and "events" in sidecar
    assert sidecar["metrics"]["collision"] is False


def test_simulate_reproducible(runner, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        result = invoke(runner, "simulate",
                        "--config", str(CONFIG_DIR / "straight_corridor.json"),
                        "--out", str(out))
        assert result.exit_code == 0
    assert (a / "episode.csv").read_bytes() == (b / "episode.csv").read_bytes()
    assert (a / "episode.json").read_bytes() == (b / "episode.json").read_bytes()


def test_simulate_seed_override_changes_output(runner, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    invoke(runner, "simulate", "--config", str(CONFIG_DIR / "straight_corridor.json"),
           "--out", str(a), "--seed", "100")
    invoke(runner, "simulate", "--config", str(CONFIG_DIR / "straight_corridor.json"),
           "--out", str(b), "--seed", "101")
    assert (a / "episode.csv").read_text() != (b / "episode.csv").read_text()


def test_simulate_config_error_names_field(runner, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"world": "fixture:straight_corridor",
                               "duration": 5.0, "gains": {"k_f": -2.0}}))
    result = runner.invoke(main, ["simulate", "--config", str(bad),
                                  "--out", str(tmp_path)])
    assert result.exit_code == 1
    assert "k_f" in result.output


def test_simulate_missing_config(runner, tmp_path):
    result = runner.invoke(main, ["simulate", "--config", str(tmp_path / "no.json")])
    assert result.exit_code == 1
    assert "not found" in result.output


def test_simulate_collision_exit_code(runner, tmp_path):
    result = runner.invoke(main, ["simulate",
                                  "--config", str(CONFIG_DIR / "collision_probe.json"),
                                  "--out", str(tmp_path)])
    assert result.exit_code == 2
    assert "collision" in result.output
    # outputs still written for inspection
    assert (tmp_path / "episode.csv").exists()


def test_world_override(runner, tmp_path):
    result = invoke(runner, "simulate",
                    "--config", str(CONFIG_DIR / "straight_corridor.json"),
                    "--world", "fixture:straight_corridor_long",
                    "--out", str(tmp_path))
    assert result.exit_code == 0


def test_stability_table(runner, tmp_path):
    result = invoke(runner, "stability",
                    "--config", str(CONFIG_DIR / "stability_grid.json"),
                    "--out", str(tmp_path))
    assert result.exit_code == 0
    lines = (tmp_path / "stability.csv").read_text().splitlines()
    header = lines[0].split(",")
    assert header == ["law", "k_f", "k_m", "k", "f_f", "f_m", "f", "c", "R",
                      "re1", "im1", "re2", "im2", "hurwitz", "real_eigs",
                      "analytic_condition", "oracle_agrees"]
    single = [l for l in lines[1:] if l.startswith("single_wall")]
    # k=1, f=1, c=3 row matches the hand quadratic
    target = [l for l in single if l.split(",")[3] == "1.0"
              and l.split(",")[6] == "1.0" and l.split(",")[7] == "3.0"]
    assert target, "expected grid point missing"
    cells = dict(zip(header, target[0].split(",")))
    assert float(cells["re1"]) == pytest.approx(-2.618034, abs=1e-6)
    assert float(cells["re2"]) == pytest.approx(-0.381966, abs=1e-6)
    assert cells["im1"] == "0.0" and cells["hurwitz"] == "true"


def test_stability_flags_oscillatory_and_diagnostic_rows(runner, tmp_path):
    grid = tmp_path / "grid.json"
    grid.write_text(json.dumps({
        "single_wall": {"k": [0.5], "f": [1.0], "c": [2.0]},
        "tau_balance": {"k_f": [1.0], "k_m": [1.0], "f_f": [1.0],
                        "f_m": [0.5], "R": [1.0]},
    }))
    invoke(runner, "stability", "--config", str(grid), "--out", str(tmp_path))
    lines = (tmp_path / "stability.csv").read_text().splitlines()
    header = lines[0].split(",")
    rows = [dict(zip(header, l.split(","))) for l in lines[1:]]
    sw = next(r for r in rows if r["law"] == "single_wall")
    assert sw["real_eigs"] == "false" and float(sw["im1"]) != 0.0
    tb = next(r for r in rows if r["law"] == "tau_balance")
    assert tb["oracle_agrees"] == "false"  # diagnostic closed form flagged


def test_stability_malformed_grid(runner, tmp_path):
    grid = tmp_path / "grid.json"
    grid.write_text(json.dumps({"single_wall": {"k": [1.0]}}))
    result = runner.invoke(main, ["stability", "--config", str(grid),
                                  "--out", str(tmp_path)])
    assert result.exit_code == 1


def test_tau_trace_outputs(runner, tmp_path):
    result = invoke(runner, "tau-trace",
                    "--config", str(CONFIG_DIR / "tau_trace.json"),
                    "--out", str(tmp_path))
    assert result.exit_code == 0
    csv_lines = (tmp_path / "tau_trace.csv").read_text().splitlines()
    assert csv_lines[0] == "t,tau_geom,tau_per,phase,variant,maneuver"
    series = {tuple(line.split(",")[4:6]) for line in csv_lines[1:]}
    assert len(series) == 6
    summary = json.loads((tmp_path / "tau_trace_summary.json").read_text())
    assert len(summary["series"]) == 6
    assert all(r["rms"] is not None for r in summary["series"])
    # the sense-act variant beats continuous on both turning maneuvers
    for maneuver in ("turn_away", "turn_toward"):
        assert summary["rms_ratio"][maneuver] < 1.0


def test_sweep_outputs(runner, tmp_path):
    result = invoke(runner, "sweep",
                    "--config", str(CONFIG_DIR / "sweep_small.json"),
                    "--out", str(tmp_path))
    assert result.exit_code == 0
    lines = (tmp_path / "sweep.csv").read_text().splitlines()
    assert len(lines) == 1 + 12  # 2x2 grid x 3 seeds
    assert "12/12" in result.output


def test_sweep_empty_grid_fails(runner, tmp_path):
    manifest = tmp_path / "sweep.json"
    manifest.write_text(json.dumps({
        "config": {"world": "fixture:straight_corridor", "duration": 2.0},
        "grid": {},
        "seeds": [0],
    }))
    result = runner.invoke(main, ["sweep", "--config", str(manifest),
                                  "--out", str(tmp_path)])
    assert result.exit_code == 1
