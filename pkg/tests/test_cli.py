"""End-to-end tests for the covertsim command line (run as subprocesses)."""

from __future__ import annotations

import csv
import io
import subprocess
import sys
from pathlib import Path

import pytest


def _run(env, cwd, *args: str) -> subprocess.CompletedProcess:
    return subprocess.run(
        [sys.executable, "-m", "covertsim", *args],
        capture_output=True,
        text=True,
        env=env,
        cwd=cwd,
        timeout=600,
    )


def _rows(stdout: str) -> list[dict[str, str]]:
    return list(csv.DictReader(io.StringIO(stdout)))


@pytest.fixture
def run(cli_env, tmp_path):
    def runner(*args: str) -> subprocess.CompletedProcess:
        return _run(cli_env, tmp_path, *args)

    return runner


class TestHelp:
    def test_help(self, run):
        result = run("--help")
        assert result.returncode == 0
        for name in ("threshold", "avg-error", "region", "baseline", "mc-validate", "config"):
            assert name in result.stdout

    def test_version(self, run):
        result = run("--version")
        assert result.returncode == 0
        assert result.stdout.startswith("covertsim ")

    def test_subcommand_help(self, run):
        result = run("region", "--help")
        assert result.returncode == 0
        assert "--grid-size" in result.stdout


class TestAnalysisCommands:
    def test_threshold(self, run):
        result = run("threshold", "--p-ac", "10", "--p-ab", "10", "--grid", "lin:0:1:11")
        assert result.returncode == 0, result.stderr
        rows = _rows(result.stdout)
        assert list(rows[0]) == ["g_hat", "lambda_star", "branch", "error_sum"]
        assert len(rows) == 11
        assert rows[0]["branch"] == "dagger"
        assert rows[-1]["branch"] == "clamp"
        assert float(rows[0]["lambda_star"]) == pytest.approx(1.0221807, abs=1e-7)

    def test_avg_error_default_sweep(self, run):
        result = run("avg-error")
        assert result.returncode == 0, result.stderr
        rows = _rows(result.stdout)
        assert len(rows) == 101
        values = [float(r["avg_error"]) for r in rows]
        assert values[0] == 1.0
        assert all(b <= a for a, b in zip(values, values[1:]))

    def test_outage_to_file(self, run, tmp_path):
        result = run("outage", "--receiver", "bob", "--grid", "lin:0:0.2:5", "--out", "out/bob.csv")
        assert result.returncode == 0, result.stderr
        assert result.stdout == ""
        rows = _rows((tmp_path / "out" / "bob.csv").read_text())
        assert [r["rate"] for r in rows][0] == "0"
        assert float(rows[0]["delta"]) == 0.0

    def test_error_curve(self, run):
        result = run("error-curve", "--g-hat", "0.05")
        assert result.returncode == 0, result.stderr
        rows = _rows(result.stdout)
        assert len(rows) == 201
        for row in rows:
            assert float(row["error_sum"]) == pytest.approx(float(row["p_fa"]) + float(row["p_md"]), abs=1e-15)

    def test_sweep_column(self, run):
        result = run("outage", "--sweep", "p_ab:lin:50:150:3", "--grid", "lin:0.5:1:2")
        assert result.returncode == 0, result.stderr
        rows = _rows(result.stdout)
        assert list(rows[0]) == ["p_ab", "rate", "delta"]
        assert len(rows) == 6


class TestRegionCommands:
    def test_region(self, run):
        result = run("region", "--grid-size", "4")
        assert result.returncode == 0, result.stderr
        assert result.stdout.splitlines()[0] == "p_ac,p_ab,r_c,r_b,covert_margin"
        rows = _rows(result.stdout)
        assert len(rows) == 4
        assert all(float(r["covert_margin"]) >= -1e-9 for r in rows)

    def test_region_sweep_alias(self, run):
        result = run("region", "--sweep", "eps:lin:0.1:0.3:3", "--grid-size", "2")
        assert result.returncode == 0, result.stderr
        rows = _rows(result.stdout)
        assert list(rows[0])[0] == "epsilon"
        assert len(rows) == 6

    def test_baseline(self, run):
        result = run("baseline", "--grid-size", "3")
        assert result.returncode == 0, result.stderr
        for row in _rows(result.stdout):
            assert float(row["p_ac"]) + float(row["p_ab"]) == pytest.approx(1000.0)


class TestValidateCommand:
    def test_deterministic_across_runs_and_workers(self, run):
        args = ("mc-validate", "--trials", "70000", "--seed", "7")
        first = run(*args)
        second = run(*args)
        pooled = run(*args, "--workers", "4")
        assert first.returncode == 0, first.stderr
        assert first.stdout == second.stdout == pooled.stdout
        rows = _rows(first.stdout)
        assert [r["quantity"] for r in rows] == [
            "p_fa_at_lambda_dagger",
            "p_md_at_lambda_dagger",
            "error_sum_optimal_willie",
            "avg_detection_error",
            "outage_carol_h1",
            "outage_carol_h0",
            "outage_bob_h1",
        ]

    def test_finite_block_row(self, run):
        result = run("mc-validate", "--trials", "2000", "--n-uses", "50")
        assert result.returncode == 0, result.stderr
        assert _rows(result.stdout)[-1]["quantity"] == "error_sum_n50_vs_asymptotic"


class TestErrors:
    def test_invalid_beta(self, run):
        result = run("region", "--beta", "1.5", "--grid-size", "2")
        assert result.returncode == 2
        assert "beta_c" in result.stderr
        assert result.stdout == ""

    def test_bad_grid(self, run):
        assert run("outage", "--grid", "lin:0:1").returncode == 2

    def test_silent_bob_is_degenerate(self, run):
        result = run("threshold", "--p-ab", "0")
        assert result.returncode == 2
        assert "degenerate" in result.stderr

    def test_budget_exceeded(self, run):
        result = run("avg-error", "--p-ac", "900", "--p-ab", "200", "--sweep", "p_ab:lin:150:200:2")
        assert result.returncode == 2
        assert "p_total" in result.stderr


class TestConfigCommand:
    def test_write_and_reuse(self, run, tmp_path):
        result = run("config", "run.toml", "--beta", "0.3", "--p-ac", "10", "--p-ab", "10")
        assert result.returncode == 0, result.stderr
        text = (tmp_path / "run.toml").read_text()
        assert "beta = 0.3" in text
        reused = run("threshold", "--config", "run.toml", "--grid", "lin:0:0:1")
        assert reused.returncode == 0, reused.stderr
        expected = 1.0 + 0.16 * 0.3 * 0.6931471805599453
        assert float(_rows(reused.stdout)[0]["lambda_star"]) == pytest.approx(expected, rel=1e-12)

    def test_bare_name_goes_to_xdg(self, run, cli_env):
        result = run("config", "lab", "--eps", "0.1")
        assert result.returncode == 0, result.stderr
        assert (Path(cli_env["XDG_CONFIG_HOME"]) / "covertsim" / "lab.toml").exists()

    def test_invalid_settings_not_written(self, run, tmp_path):
        result = run("config", "bad.toml", "--alpha", "1.0")
        assert result.returncode == 2
        assert not (tmp_path / "bad.toml").exists()
