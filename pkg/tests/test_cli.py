import csv
import subprocess
import sys

import pytest

from hybell import verify
from hybell.cli import CSV_HEADER


def run_cli(*args):
    return subprocess.run(
        [sys.executable, "-m", "hybell", *args],
        capture_output=True,
        text=True,
        timeout=600,
    )


def read_rows(path):
    with open(path, encoding="utf-8") as handle:
        lines = [line for line in handle if not line.startswith("#")]
    return list(csv.DictReader(lines))


class TestSweep:
    def test_photocount_grid(self, tmp_path):
        out = tmp_path / "grid.csv"
        proc = run_cli(
            "sweep",
            "--scenario", "photocount",
            "--t-line", "0.9:1:0.05",
            "--eta", "0.9:1:0.05",
            "--out", str(out),
            "--jobs", "1",
        )
        assert proc.returncode == 0, proc.stderr
        text = out.read_text(encoding="utf-8")
        assert "\r" not in text
        header_line = [l for l in text.splitlines() if not l.startswith("#")][0]
        assert header_line == CSV_HEADER
        rows = read_rows(out)
        assert len(rows) == 9
        corner = [r for r in rows if r["t_line"] == "1" and r["eta_or_eta_a"] == "1"][0]
        assert abs(float(corner["s_max"]) - 2.324) < 5e-3
        assert abs(float(corner["alpha_opt"]) - 2.1) < 0.1
        # rows sorted by (t_line, second axis)
        keys = [(float(r["t_line"]), float(r["eta_or_eta_a"])) for r in rows]
        assert keys == sorted(keys)

    def test_byte_identical_across_job_counts(self, tmp_path):
        outputs = []
        for jobs, name in (("1", "a.csv"), ("3", "b.csv")):
            out = tmp_path / name
            proc = run_cli(
                "sweep",
                "--scenario", "two-homodyne",
                "--t-line", "0.8:1:0.1",
                "--out", str(out),
                "--jobs", jobs,
            )
            assert proc.returncode == 0, proc.stderr
            outputs.append(out.read_bytes())
        # the jobs flag is not recorded in the file, only the grid parameters
        assert outputs[0] == outputs[1]

    def test_two_homodyne_values(self, tmp_path):
        out = tmp_path / "h.csv"
        proc = run_cli(
            "sweep",
            "--scenario", "two-homodyne",
            "--t-line", "0.6:1:0.4",
            "--out", str(out),
            "--jobs", "1",
        )
        assert proc.returncode == 0, proc.stderr
        rows = {r["t_line"]: r for r in read_rows(out)}
        assert abs(float(rows["1"]["s_max"]) - 2.29) < 5e-3
        assert float(rows["0.6"]["s_max"]) <= 2.0

    def test_eta_sweep_requires_photocount(self, tmp_path):
        proc = run_cli(
            "sweep",
            "--scenario", "two-homodyne",
            "--t-line", "0.9:1:0.1",
            "--eta", "0.9:1:0.1",
            "--out", str(tmp_path / "x.csv"),
        )
        assert proc.returncode == 1
        assert proc.stderr.startswith("error: ")

    def test_bad_range_is_single_line_error(self, tmp_path):
        proc = run_cli(
            "sweep",
            "--scenario", "photocount",
            "--t-line", "0:2:0.5",
            "--out", str(tmp_path / "x.csv"),
        )
        assert proc.returncode == 1
        assert proc.stderr.startswith("error: ")
        assert len(proc.stderr.strip().splitlines()) == 1

    def test_unwritable_path_fails(self):
        proc = run_cli(
            "sweep",
            "--scenario", "photocount",
            "--t-line", "1:1:0.5",
            "--out", "/nonexistent-dir/x.csv",
            "--jobs", "1",
        )
        assert proc.returncode == 1
        assert proc.stderr.startswith("error: ")


class TestThreshold:
    def test_two_homodyne_transmission(self):
        proc = run_cli("threshold", "t-line", "--scenario", "two-homodyne", "--tol", "1e-3")
        assert proc.returncode == 0, proc.stderr
        value = float(proc.stdout.split("=")[1].split("(")[0])
        assert abs(value - 0.678) < 4e-3
        assert "t_line" in proc.stdout and "S(" in proc.stdout


class TestTheorem1:
    def test_default_table(self):
        proc = run_cli("theorem1")
        assert proc.returncode == 0, proc.stderr
        lines = proc.stdout.strip().splitlines()
        assert len(lines) == 5  # header plus four eta rows
        for line in lines[1:]:
            s_value = float(line.split()[2])
            assert s_value > 2.0

    def test_explicit_etas(self):
        proc = run_cli("theorem1", "1", "0.1")
        assert proc.returncode == 0, proc.stderr
        assert len(proc.stdout.strip().splitlines()) == 3

    def test_unfindable_witness_fails(self):
        proc = run_cli("theorem1", "0.001", "--alpha-max", "20")
        assert proc.returncode == 1
        assert proc.stderr.startswith("error: ")


class TestCat:
    def test_balanced_two_mode_report(self):
        proc = run_cli("cat", "--alpha", "4", "--modes", "2")
        assert proc.returncode == 0, proc.stderr
        amps_line = [l for l in proc.stdout.splitlines() if l.startswith("per-mode")][0]
        values = [float(v) for v in amps_line.split("=")[1].split(",")]
        assert all(abs(v - 2.0 / 2 ** 0.5) < 1e-8 for v in values)

    def test_degenerate_cat(self):
        proc = run_cli("cat", "--alpha", "0", "--modes", "2")
        assert proc.returncode == 0, proc.stderr
        norm_line = [l for l in proc.stdout.splitlines() if "normalization" in l][0]
        assert abs(float(norm_line.split("=")[1]) - 0.5 ** 0.5) < 1e-8

    def test_four_equal_modes(self):
        proc = run_cli("cat", "--alpha", "3", "--modes", "4")
        assert proc.returncode == 0, proc.stderr
        amps_line = [l for l in proc.stdout.splitlines() if l.startswith("per-mode")][0]
        values = [float(v) for v in amps_line.split("=")[1].split(",")]
        assert len(values) == 4
        assert max(values) - min(values) < 1e-10
        energy_line = [l for l in proc.stdout.splitlines() if "energy" in l][0]
        assert "= 1 " in energy_line

    def test_invalid_nu_fails(self):
        proc = run_cli("cat", "--alpha", "2", "--nu", "-0.3")
        assert proc.returncode == 1
        assert proc.stderr.startswith("error: ")


class TestVerify:
    def test_passes_and_is_deterministic(self):
        first = run_cli("verify", "--seed", "7", "--samples", "6")
        second = run_cli("verify", "--seed", "7", "--samples", "6")
        assert first.returncode == 0, first.stdout + first.stderr
        assert "verify: PASS" in first.stdout
        assert first.stdout == second.stdout

    def test_corrupted_tolerance_fails(self):
        proc = run_cli("verify", "--seed", "7", "--samples", "4", "--tol-scale", "1e-12")
        assert proc.returncode == 1
        assert "FAIL" in proc.stdout
        assert proc.stderr.startswith("error: ")


class TestArgumentErrors:
    def test_unknown_scenario(self, tmp_path):
        proc = run_cli(
            "sweep", "--scenario", "bogus", "--t-line", "1:1:0.1",
            "--out", str(tmp_path / "x.csv"),
        )
        assert proc.returncode == 2
        assert proc.stderr.startswith("error: ")

    def test_missing_subcommand(self):
        proc = run_cli()
        assert proc.returncode == 2
        assert proc.stderr.startswith("error: ")


def test_run_suites_api_returns_all_four():
    results = verify.run_suites(seed=3, samples=4)
    assert [suite.name for suite in results] == [
        "coefficients", "chsh-opt", "fock-oracle", "catstates",
    ]
    for suite in results:
        assert suite.passed(), (suite.name, suite.worst())
