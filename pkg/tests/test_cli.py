"""End-to-end tests for the command-line surface (interfaces/cli/main.py)."""

from __future__ import annotations

import csv
import json
import logging
import math
from pathlib import Path

import pytest

from interfaces.cli.main import EXIT_FAILED, EXIT_OK, build_parser, run

CONFIG_DIR = Path(__file__).resolve().parents[1] / "configs"
CONSTANT = str(CONFIG_DIR / "constant.cfg")
DETERMINISTIC = str(CONFIG_DIR / "deterministic.cfg")


def _run(command: str, out: Path, *extra: str, config: str = CONSTANT) -> int:
    return run([command, "--config", config, "--out", str(out), *extra])


def _rows(path: Path) -> list[dict[str, str]]:
    with path.open(encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


def _manifest(out: Path) -> dict:
    return json.loads((out / "manifest.json").read_text(encoding="utf-8"))


# ---------------------------------------------------------------------------
# Reports printed to stdout
# ---------------------------------------------------------------------------


def test_stability_prints_both_limits(tmp_path, capsys):
    assert _run("stability", tmp_path, config=DETERMINISTIC) == EXIT_OK
    printed = capsys.readouterr().out
    assert "FF k-limit (M=50, d2=1): 1.5949e-03" in printed
    assert "FT k-limit (M=50, d2=1, eps=0.5): 8.9543e-04" in printed
    rows = _rows(tmp_path / "stability.csv")
    assert [row["method"] for row in rows] == ["FF", "FT"]
    assert int(rows[1]["N_auto"]) == math.ceil(50.0 / (0.9 * float(rows[1]["k_limit"])))


def test_rstar_prints_guarantee(tmp_path, capsys):
    assert _run("rstar", tmp_path) == EXIT_OK
    assert "guaranteed: true, R*_max = 2.6344" in capsys.readouterr().out
    rows = _rows(tmp_path / "rstar.csv")
    assert [row["bound"] for row in rows] == ["d1", "d2"]
    assert float(rows[0]["r_star"]) < float(rows[1]["r_star"])


def test_histogram_counts_every_sample(tmp_path, capsys):
    assert _run("histogram", tmp_path, "--K", "50") == EXIT_OK
    assert "H0 >= R* for 100.0% of 50 samples" in capsys.readouterr().out
    for name in ("histogram_D.csv", "histogram_eta.csv", "histogram_rstar.csv"):
        rows = _rows(tmp_path / name)
        assert len(rows) == 20
        assert sum(int(row["count"]) for row in rows) == 50
    assert len(_rows(tmp_path / "samples.csv")) == 50


# ---------------------------------------------------------------------------
# Solves and ensembles
# ---------------------------------------------------------------------------


def test_solve_ff_zero_horizon_writes_initial_condition(tmp_path):
    assert _run("solve-ff", tmp_path, "--T", "0", "--N", "auto") == EXIT_OK
    rows = _rows(tmp_path / "ff_M50_profile.csv")
    assert len(rows) == 51
    assert float(rows[0]["value"]) == 1.0
    assert float(rows[25]["value"]) == pytest.approx(math.cos(math.pi / 4.0))
    assert float(rows[-1]["value"]) == 0.0
    assert float(rows[-1]["radius"]) == 3.0
    assert len(_rows(tmp_path / "ff_M50_trajectory.csv")) == 1

    manifest = _manifest(tmp_path)
    assert manifest["command"] == "solve-ff"
    assert manifest["files"] == ["config.cfg", "ff_M50_profile.csv", "ff_M50_trajectory.csv"]
    assert manifest["details"]["ff_M50"]["outcome"] == "undetermined"


def test_solve_ft_accepts_several_grids(tmp_path):
    assert _run("solve-ft", tmp_path, "--M", "10,20", "--T", "0.05") == EXIT_OK
    for M in (10, 20):
        rows = _rows(tmp_path / f"ft_M{M}_profile.csv")
        assert float(rows[-1]["value"]) == 0.0
        assert float(rows[-1]["radius"]) > 3.0
    assert set(_manifest(tmp_path)["details"]) == {"ft_M10", "ft_M20"}


def test_ensemble_writes_moments_and_outcomes(tmp_path, capsys):
    assert _run("ensemble", tmp_path, "--K", "4", "--M", "10", "--T", "0.05") == EXIT_OK
    assert "FF ensemble K=4" in capsys.readouterr().out
    field_rows = _rows(tmp_path / "ff_ensemble_field.csv")
    assert len(field_rows) == 11
    assert float(field_rows[-1]["mean"]) == 0.0
    radius_rows = _rows(tmp_path / "ff_ensemble_mean_radius.csv")
    assert float(radius_rows[-1]["mean"]) == 0.0
    manifest = _manifest(tmp_path)
    assert sum(manifest["outcomes"].values()) == 4
    assert manifest["details"]["K_effective"] == 4


def test_ft_ensemble(tmp_path):
    assert _run("ensemble", tmp_path, "--method", "ft", "--K", "4", "--M", "10", "--T", "0.05") == EXIT_OK
    assert (tmp_path / "ft_ensemble_field.csv").is_file()
    assert not (tmp_path / "ft_ensemble_mean_radius.csv").exists()


def test_compare_reports_three_metrics(tmp_path, capsys):
    assert _run("compare", tmp_path, "--K", "3", "--M", "20", "--T", "0.05") == EXIT_OK
    rows = _rows(tmp_path / "compare_errors.csv")
    assert [row["metric"] for row in rows] == ["RelErr", "AbsDev:mean[H]", "AbsDev:std[H]"]
    assert all(float(row["value"]) >= 0 for row in rows)
    assert "RelErr (K=3, T=0.05)" in capsys.readouterr().out


def test_convergence_k_ladder(tmp_path):
    code = _run("convergence", tmp_path, "--ladder", "K", "--values", "2,4", "--M", "10", "--T", "0.05")
    assert code == EXIT_OK
    rows = _rows(tmp_path / "convergence_K.csv")
    assert len(rows) == 4
    assert {row["pair"] for row in rows} == {"2-4"}
    assert {row["case"] for row in rows} == {"constant"}


# ---------------------------------------------------------------------------
# Failures and re-runs
# ---------------------------------------------------------------------------


def test_invalid_eps_fails_in_config_stage(tmp_path, caplog):
    with caplog.at_level(logging.ERROR):
        assert _run("ensemble", tmp_path, "--eps", "1.5") == EXIT_FAILED
    assert "Stage config failed" in caplog.text
    assert "eps must lie in (0,1)" in caplog.text
    assert not (tmp_path / "manifest.json").exists()


def test_missing_config_fails(tmp_path, caplog):
    with caplog.at_level(logging.ERROR):
        assert _run("rstar", tmp_path, config=str(tmp_path / "absent.cfg")) == EXIT_FAILED
    assert "not found" in caplog.text


def test_grid_list_only_for_single_solves(tmp_path, caplog):
    with caplog.at_level(logging.ERROR):
        assert _run("ensemble", tmp_path, "--M", "10,20") == EXIT_FAILED
    assert "single value" in caplog.text


def test_unknown_command_rejected():
    with pytest.raises(SystemExit):
        build_parser().parse_args(["integrate", "--config", CONSTANT])


@pytest.mark.parametrize(
    "command, extra, table",
    [
        ("solve-ft", ("--M", "10", "--T", "0.05"), "ft_M10_profile.csv"),
        ("ensemble", ("--K", "4", "--M", "10", "--T", "0.05", "--seed", "7"), "ff_ensemble_field.csv"),
    ],
)
def test_rerun_from_manifest_reproduces_tables(tmp_path, command, extra, table):
    first, second = tmp_path / "first", tmp_path / "second"
    assert _run(command, first, *extra) == EXIT_OK
    rerun = _manifest(first)["rerun"]
    assert rerun[1] == command
    assert run([*rerun[1:], "--out", str(second)]) == EXIT_OK
    assert (first / table).read_bytes() == (second / table).read_bytes()
    assert (first / "config.cfg").read_text() == (second / "config.cfg").read_text()
