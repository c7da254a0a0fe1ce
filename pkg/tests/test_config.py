"""Tests for run settings and command configuration."""

import unittest
from fractions import Fraction

from pydantic import ValidationError

from twistleaf.config import DEFAULT_SEED, RunConfig, Settings, Tolerances


class TestSettings(unittest.TestCase):
    """Test environment overrides."""

    def test_defaults(self):
        """Test the default tolerances and seed."""
        settings = Settings.from_env({})
        assert settings.exact_tolerance == 0.0
        assert settings.algebra_tolerance == 1e-9
        assert settings.group_tolerance == 1e-8
        assert settings.tolerances() == Tolerances()
        assert settings.seed == DEFAULT_SEED
        assert settings.workers >= 1
        assert settings.log_level == "WARNING"

    def test_environment_overrides(self):
        """Test that TWISTLEAF_* variables are applied and coerced."""
        settings = Settings.from_env(
            {
                "TWISTLEAF_TOLERANCE": "1e-6",
                "TWISTLEAF_GROUP_TOLERANCE": "1e-5",
                "TWISTLEAF_RANK_TOLERANCE": "1e-4",
                "TWISTLEAF_POINT_TOLERANCE": "1e-3",
                "TWISTLEAF_WORKERS": "2",
                "TWISTLEAF_SEED": "7",
                "TWISTLEAF_LOG_LEVEL": "debug",
                "UNRELATED": "x",
            }
        )
        assert settings.algebra_tolerance == 1e-6
        assert settings.group_tolerance == 1e-5
        assert settings.tolerances() == Tolerances(
            algebra=1e-6, group=1e-5, rank=1e-4, point=1e-3
        )
        assert settings.workers == 2
        assert settings.seed == 7
        assert settings.log_level == "DEBUG"

    def test_empty_values_are_ignored(self):
        """Test that an empty variable keeps the default."""
        assert Settings.from_env({"TWISTLEAF_SEED": ""}).seed == DEFAULT_SEED

    def test_invalid_values(self):
        """Test that a bad log level or worker count is rejected."""
        with self.assertRaises(ValidationError):
            Settings.from_env({"TWISTLEAF_LOG_LEVEL": "loud"})
        with self.assertRaises(ValidationError):
            Settings.from_env({"TWISTLEAF_WORKERS": "0"})
        with self.assertRaises(ValidationError):
            Settings.from_env({"TWISTLEAF_TOLERANCE": "-1"})


class TestRunConfig(unittest.TestCase):
    """Test per-command validation."""

    def test_c_is_normalized(self):
        """Test that c is stored as a reduced fraction."""
        config = RunConfig(command="proposition", n=3, m_or_k=1, c="2/6")
        assert config.c == "1/3"
        assert config.rational_c == Fraction(1, 3)

    def test_n_range(self):
        """Test that n must lie in 2..8."""
        for n in (1, 9):
            with self.assertRaises(ValidationError):
                RunConfig(command="proposition", n=n)

    def test_decimal_c_rejected(self):
        """Test that decimal literals are not accepted for c."""
        with self.assertRaises(ValidationError):
            RunConfig(command="proposition", n=3, c="0.5")

    def test_m_must_be_positive(self):
        """Test that m or k must be at least one."""
        with self.assertRaises(ValidationError):
            RunConfig(command="proposition", n=3, m_or_k=0)

    def test_report_config_leaves_out_output(self):
        """Test that the output path does not change the run id input."""
        config = RunConfig(command="cybe", n=3, output="reports/cybe.json")
        data = config.report_config()
        assert "output" not in data
        assert data["mode"] == "exact"
        assert data["output_format"] == "json"

    def test_scenarios_and_overrides(self):
        """Test the scenario count default and the tolerance override bounds."""
        config = RunConfig(command="theorem3", n=4)
        assert config.scenarios == 50
        assert config.tolerances(Settings()) == Tolerances()
        with self.assertRaises(ValidationError):
            RunConfig(command="theorem3", n=4, scenarios=0)
        with self.assertRaises(ValidationError):
            RunConfig(command="theorem3", n=4, group_tolerance=0.0)


if __name__ == "__main__":
    unittest.main()
