"""Tests for the command-line entry point."""

import logging

import numpy as np
import pytest

from hetnoise.main import (
    EXIT_EXPECTATION_FAILED,
    EXIT_PARSE_ERROR,
    EXIT_RUNTIME_ERROR,
    EXIT_SUCCESS,
    EXIT_VALIDATION_ERROR,
    main,
)
from hetnoise.models import PhotocurrentTrace, RunReport
from hetnoise.persistence import ArtifactStore
from hetnoise.spectral.fringe import synthesize_fringe_scan


@pytest.fixture(autouse=True)
def restore_root_logging():
    """main() installs its own root handler; put pytest's back afterwards."""
    root = logging.getLogger()
    handlers, level = root.handlers[:], root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)


@pytest.fixture
def scenario_file(tmp_path, minimal_scenario_text):
    def write(extra: str = "") -> str:
        path = tmp_path / "scenario.yaml"
        path.write_text(minimal_scenario_text + extra)
        return str(path)

    return write


def run(*args: str) -> int:
    return main([*args, "--no-color"])


class TestScenarioCommands:
    """Tests for scenario list and run."""

    def test_list(self, capsys):
        """Test bundled scenarios are listed with descriptions."""
        assert run("scenario", "list") == EXIT_SUCCESS
        out = capsys.readouterr().out
        assert "lo_doubling" in out
        assert "imageband_prediction" in out

    def test_run_passes(self, capsys, out_dir):
        """Test a passing scenario exits 0 and writes its report."""
        code = run("scenario", "run", "imageband_prediction", "--out-dir", str(out_dir))
        assert code == EXIT_SUCCESS
        assert "falsified by measured data" in capsys.readouterr().out
        assert (out_dir / "imageband_prediction_report.tsv").is_file()

    def test_expectation_failure(self, scenario_file, out_dir):
        """Test a missed expectation exits 1."""
        path = scenario_file(
            "expectations:\n  - metric: floor_difference_db\n    target: 1.0\n    tolerance: 0.1\n"
        )
        assert run("analytic", path, "--out-dir", str(out_dir)) == EXIT_EXPECTATION_FAILED

    def test_columnar_output(self, capsys, scenario_file, out_dir):
        """Test the columnar report on stdout parses back."""
        path = scenario_file()
        assert run("analytic", path, "--format", "columnar", "--out-dir", str(out_dir)) == 0
        report = RunReport.from_columnar(capsys.readouterr().out)
        assert report.scenario_name == "minimal"
        assert "analytic_floor_db" in report.metrics

    def test_overrides(self, capsys, scenario_file, out_dir):
        """Test --seed and --trials reach the report."""
        path = scenario_file("simulation:\n  duration_ms: 0.65536\n")
        code = run(
            "simulate", path, "--seed", "5", "--trials", "1",
            "--format", "columnar", "--out-dir", str(out_dir),
        )
        assert code == EXIT_SUCCESS
        report = RunReport.from_columnar(capsys.readouterr().out)
        assert report.master_seed == 5
        assert report.trials == 1
        assert "mc_floor_db" in report.metrics


class TestExitCodes:
    """Tests for error exit codes."""

    def test_unknown_scenario(self):
        """Test an unknown scenario is a parse error."""
        assert run("scenario", "run", "nonexistent") == EXIT_PARSE_ERROR

    def test_bad_option(self):
        """Test an unknown option is a parse error."""
        assert run("analytic", "lo_doubling", "--bogus") == EXIT_PARSE_ERROR

    def test_help(self, capsys):
        """Test --help exits 0."""
        assert main(["--help"]) == EXIT_SUCCESS
        assert "Exit codes" in capsys.readouterr().out

    def test_yaml_syntax(self, tmp_path):
        """Test broken YAML is a parse error."""
        path = tmp_path / "broken.yaml"
        path.write_text("name: x\n\tbad: 1\n")
        assert run("analytic", str(path)) == EXIT_PARSE_ERROR

    def test_validation(self, scenario_file):
        """Test an invalid field is a validation error."""
        assert run("analytic", scenario_file("spectrum:\n  rbw_khz: 0\n")) == EXIT_VALIDATION_ERROR

    def test_runtime(self, scenario_file, out_dir):
        """Test a trace too short for its RBW is a runtime error."""
        path = scenario_file("simulation:\n  duration_ms: 0.01\n")
        assert run("simulate", path, "--trials", "1", "--out-dir", str(out_dir)) == (
            EXIT_RUNTIME_ERROR
        )


class TestArtifactCommands:
    """Tests for the spectrum and fringe commands."""

    @pytest.fixture
    def trace_path(self, tmp_path):
        rng = np.random.default_rng(4)
        j1 = rng.normal(0.0, 1e-7, size=2**16)
        j2 = rng.normal(0.0, 1e-7, size=2**16)
        trace = PhotocurrentTrace.from_ports(j1, j2, sample_rate=100e6, seed_used=4)
        return ArtifactStore(tmp_path / "traces").write_trace("noise", trace, {})

    def test_spectrum(self, capsys, trace_path, out_dir):
        """Test the floor of white noise and the written spectrum."""
        code = run(
            "spectrum", str(trace_path), "--rbw-khz", "100", "--span-mhz", "0.5", "10",
            "--format", "columnar", "--out-dir", str(out_dir),
        )
        assert code == EXIT_SUCCESS
        rows = dict(
            line.split("\t")[1:] for line in capsys.readouterr().out.splitlines()
            if line.startswith("metric\t")
        )
        # J- variance 2e-14 A^2 spread over 50 MHz, read in a 100 kHz bin.
        expected = 10 * np.log10(2 * 2e-14 / 100e6 * 100e3)
        assert float(rows["floor_db"]) == pytest.approx(expected, abs=0.1)
        assert float(rows["rbw_hz"]) == pytest.approx(100e3, rel=1e-3)
        assert (out_dir / "noise_measured_spectrum.tsv").is_file()

    def test_spectrum_too_short(self, tmp_path, out_dir):
        """Test a trace shorter than two windows is a runtime error."""
        trace = PhotocurrentTrace.from_ports(
            np.zeros(100), np.zeros(100), sample_rate=100e6, seed_used=0
        )
        path = ArtifactStore(tmp_path).write_trace("short", trace, {})
        assert run("spectrum", str(path), "--out-dir", str(out_dir)) == EXIT_RUNTIME_ERROR

    def test_fringe(self, capsys, tmp_path):
        """Test visibilities of a scan file."""
        rng = np.random.default_rng(6)
        scan = synthesize_fringe_scan([0.985, 0.99], noise_fraction=0.01, rng=rng)
        path = ArtifactStore(tmp_path).write_scan("lab", scan, {})
        assert run("fringe", str(path)) == EXIT_SUCCESS
        out = capsys.readouterr().out
        assert "visibility_1" in out
        assert "visibility_2" in out
