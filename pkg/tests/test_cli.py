"""Tests for the command line."""

import csv
import json
import tempfile
import unittest
from pathlib import Path
from unittest.mock import patch

from typer.testing import CliRunner

from twistleaf.cli import app
from twistleaf.exceptions import RangeError
from twistleaf.reports import CheckReport, RunReport


def _run_report(passed: bool) -> RunReport:
    check = CheckReport.from_residual("cybe", 0.0 if passed else 1.0, 0.0, n=3)
    return RunReport.collect({"command": "cybe", "n": 3}, [check])


class TestVerifyCommands(unittest.TestCase):
    """Test exit codes and report files of verify commands."""

    def setUp(self):
        self.runner = CliRunner()
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.output = Path(self.tmp.name) / "report.json"

    @patch("twistleaf.cli.suites.run")
    def test_passing_run(self, mock_run):
        """Test exit code 0 and the written JSON report."""
        mock_run.return_value = _run_report(True)
        result = self.runner.invoke(
            app, ["verify", "cybe", "--n", "3", "-o", str(self.output)]
        )
        assert result.exit_code == 0, result.output
        data = json.loads(self.output.read_text(encoding="utf-8"))
        assert data["summary"]["passed"] == 1
        config = mock_run.call_args.args[0]
        assert config.command == "cybe"
        assert config.n == 3

    @patch("twistleaf.cli.suites.run")
    def test_failing_run(self, mock_run):
        """Test exit code 1 when a claim fails."""
        mock_run.return_value = _run_report(False)
        result = self.runner.invoke(
            app, ["verify", "cybe", "--n", "3", "-o", str(self.output)]
        )
        assert result.exit_code == 1
        assert "FAIL" in result.output

    @patch("twistleaf.cli.suites.run")
    def test_markdown_output(self, mock_run):
        """Test the Markdown report format."""
        mock_run.return_value = _run_report(True)
        output = Path(self.tmp.name) / "report.md"
        result = self.runner.invoke(
            app,
            ["verify", "cybe", "--n", "3", "--format", "markdown", "-o", str(output)],
        )
        assert result.exit_code == 0
        assert output.read_text(encoding="utf-8").startswith("# twistleaf report")

    @patch("twistleaf.cli.suites.run")
    def test_usage_errors(self, mock_run):
        """Test exit code 2 for n out of range and a decimal c."""
        for args in (["--n", "1"], ["--n", "3", "--c", "0.5"]):
            result = self.runner.invoke(
                app, ["verify", "proposition", *args, "-o", str(self.output)]
            )
            assert result.exit_code == 2, args
        mock_run.assert_not_called()

    @patch("twistleaf.cli.suites.run")
    def test_range_error_from_suite(self, mock_run):
        """Test that package errors raised while running map to exit code 2."""
        mock_run.side_effect = RangeError("m must satisfy 1 <= m <= 1, got 2")
        result = self.runner.invoke(
            app, ["verify", "lagrangian", "--n", "3", "--m", "2"]
        )
        assert result.exit_code == 2
        assert "m must satisfy" in result.output

    @patch("twistleaf.cli.suites.run_grid")
    def test_all(self, mock_grid):
        """Test the all command with a seed override."""
        mock_grid.return_value = _run_report(True)
        result = self.runner.invoke(
            app, ["verify", "all", "--seed", "5", "-o", str(self.output)]
        )
        assert result.exit_code == 0
        assert mock_grid.call_args.args[1] == 5

    @patch("twistleaf.cli.suites.run")
    def test_tolerance_options(self, mock_run):
        """Test that tolerance and scenario flags land in the run config."""
        mock_run.return_value = _run_report(True)
        args = ["verify", "theorem3", "--n", "4", "--scenarios", "7"]
        args += ["--group-tolerance", "1e-6", "-o", str(self.output)]
        result = self.runner.invoke(app, args)
        assert result.exit_code == 0, result.output
        config = mock_run.call_args.args[0]
        assert config.scenarios == 7
        assert config.group_tolerance == 1e-6
        assert config.tolerance is None

    @patch("twistleaf.cli.suites.run_grid")
    def test_all_tolerance_options(self, mock_grid):
        """Test that the all command folds tolerance flags into its settings."""
        mock_grid.return_value = _run_report(True)
        args = ["verify", "all", "--tolerance", "1e-5", "--scenarios", "3"]
        result = self.runner.invoke(app, [*args, "-o", str(self.output)])
        assert result.exit_code == 0, result.output
        settings = mock_grid.call_args.args[2]
        assert settings.algebra_tolerance == 1e-5
        assert mock_grid.call_args.kwargs["scenarios"] == 3


class TestSurveyCommands(unittest.TestCase):
    """Test the survey commands on small instances."""

    def setUp(self):
        self.runner = CliRunner()

    def test_schubert(self):
        """Test the Bruhat poset table and its verdict."""
        result = self.runner.invoke(
            app, ["survey", "schubert", "--n", "4", "--k", "2", "--samples", "2"]
        )
        assert result.exit_code == 0, result.output
        assert "[0,0]" in result.output
        assert "monotone" in result.output

    def test_leaves(self):
        """Test that the leaf survey writes one CSV row per sample."""
        with tempfile.TemporaryDirectory() as tmp:
            output = Path(tmp) / "leaves.csv"
            result = self.runner.invoke(
                app,
                ["survey", "leaves", "--n", "3", "--samples", "3", "-o", str(output)],
            )
            assert result.exit_code == 0, result.output
            with output.open(encoding="utf-8") as handle:
                assert len(list(csv.DictReader(handle))) == 3

    def test_leaves_bad_c(self):
        """Test exit code 2 for a malformed c."""
        result = self.runner.invoke(app, ["survey", "leaves", "--n", "3", "--c", "abc"])
        assert result.exit_code == 2


if __name__ == "__main__":
    unittest.main()
