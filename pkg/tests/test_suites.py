"""Tests for suite task lists and the task runner."""

import unittest
from unittest.mock import patch

import pytest

from twistleaf import homogeneous, suites
from twistleaf.config import RunConfig, Settings, Tolerances
from twistleaf.enums import Algebra, Mode
from twistleaf.exceptions import RangeError
from twistleaf.wedge import build_r, check_cybe


class TestBuildTasks(unittest.TestCase):
    """Test the tasks each command expands to."""

    def test_every_command_has_tasks(self):
        """Test that each suite produces at least one task for n = 3."""
        for command in suites.SUITES:
            tasks = suites.build_tasks(RunConfig(command=command, n=3))
            assert tasks, command
            for check, kwargs in tasks:
                assert callable(check)
                assert isinstance(kwargs, dict)

    def test_proposition_tasks(self):
        """Test both algebras plus the three part-wise checks per m."""
        tasks = suites.build_tasks(RunConfig(command="proposition", n=4))
        assert len(tasks) == 2 * 5
        algebras = {kwargs["algebra"] for _, kwargs in tasks if "algebra" in kwargs}
        assert algebras == {Algebra.U, Algebra.SU}

    def test_fixed_m(self):
        """Test that --m restricts the instances."""
        tasks = suites.build_tasks(RunConfig(command="theorem3", n=5, m_or_k=2))
        assert {kwargs["m"] for _, kwargs in tasks} == {2}
        assert sum(1 for _, kwargs in tasks if kwargs["sigma_seed"] is None) == 1

    def test_double_limited_by_n(self):
        """Test that exact double checks are skipped for large n unless m is given."""
        assert suites.build_tasks(RunConfig(command="lagrangian", n=5)) == []
        assert len(suites.build_tasks(RunConfig(command="hperp", n=5, m_or_k=1))) == 1

    def test_unknown_command(self):
        """Test that an unknown command is a range error."""
        with self.assertRaises(RangeError):
            suites.build_tasks(RunConfig(command="nonsense", n=3))


class TestGrid(unittest.TestCase):
    """Test the default grid of the all command."""

    def test_grid_size(self):
        """Test one config per command, n and c, with cybe run once per n."""
        configs = suites.grid_configs(5, 1, ns=(3, 4))
        per_n = (len(suites.SUITES) - 1) * len(suites.DEFAULT_CS) + 1
        assert len(configs) == 2 * per_n
        assert all(config.samples == 5 and config.seed == 1 for config in configs)


class TestRunner(unittest.TestCase):
    """Test running tasks and merging reports."""

    def test_run_tasks_in_process(self):
        """Test that single reports and report lists are flattened in order."""
        tasks = [
            (check_cybe, {"n": 2, "algebra": Algebra.SU}),
            (suites.affine_identities, {"n": 2, "c": "1/3", "samples": 3, "seed": 0}),
        ]
        reports = suites.run_tasks(tasks, workers=1)
        assert len(reports) == 1 + 7
        assert reports[0].claim == "cybe"
        assert all(report.c == "1/3" for report in reports[1:])
        failing = [report.claim for report in reports if not report.passed]
        assert not failing, failing

    def test_run(self):
        """Test a whole command end to end."""
        config = RunConfig(command="cybe", n=2)
        report = suites.run(config, Settings(workers=1))
        assert report.exit_code == 0
        assert len(report.claims) == 2
        assert report.config["command"] == "cybe"
        assert report.run_id == suites.run(config, Settings(workers=1)).run_id

    def test_cross_offset(self):
        """Test that the cross offset is the part of r touching index 1."""
        offset = suites.cross_offset(3)
        r = build_r(3)
        basis = r.basis
        assert offset.coefficient(basis.plus(1, 2), basis.minus(1, 2)) == 1
        assert offset.coefficient(basis.plus(2, 3), basis.minus(2, 3)) == 0
        assert (r - offset).coefficient(basis.plus(2, 3), basis.minus(2, 3)) == 1


class TestTolerances(unittest.TestCase):
    """Test that configured tolerances reach the float checks."""

    def test_tiny_tolerance_fails_float_claims(self):
        """Test that TWISTLEAF_TOLERANCE=1e-30 turns rounding noise into failures."""
        settings = Settings.from_env(
            {
                "TWISTLEAF_TOLERANCE": "1e-30",
                "TWISTLEAF_GROUP_TOLERANCE": "1e-30",
                "TWISTLEAF_WORKERS": "1",
            }
        )
        report = suites.run(RunConfig(command="affine", n=3, samples=3), settings)
        float_reports = [r for r in report.claims if r.mode == Mode.FLOAT]
        assert float_reports
        assert all(r.tolerance == 1e-30 for r in float_reports)
        assert not any(r.passed for r in float_reports)
        assert report.exit_code == 1
        assert report.config["tolerances"]["algebra"] == 1e-30

    def test_default_tolerance_passes(self):
        """Test that the same run passes with the default tolerances."""
        config = RunConfig(command="affine", n=3, samples=3)
        report = suites.run(config, Settings(workers=1))
        assert report.exit_code == 0
        float_reports = [r for r in report.claims if r.mode == Mode.FLOAT]
        assert all(r.tolerance == 1e-9 for r in float_reports)

    def test_run_config_overrides_settings(self):
        """Test that per-run overrides win over the settings."""
        config = RunConfig(command="leaves", n=3, tolerance=1e-3, rank_tolerance=1e-4)
        tolerances = config.tolerances(Settings(group_tolerance=1e-6))
        assert tolerances == Tolerances(algebra=1e-3, group=1e-6, rank=1e-4)

    def test_tolerances_reach_tasks(self):
        """Test that every sampled task of a suite carries its threshold."""
        tolerances = Tolerances(algebra=1e-5, group=1e-4, rank=1e-3, point=1e-2)
        leaves = suites.build_tasks(RunConfig(command="leaves", n=3), tolerances)
        for check, kwargs in leaves:
            if check is homogeneous.check_leaf_equation:
                assert kwargs["tolerance"] == 1e-2
            else:
                assert kwargs["rtol"] == 1e-3
        for command in ("theorem3", "diffeo", "covariance"):
            tasks = suites.build_tasks(RunConfig(command=command, n=3), tolerances)
            assert {kwargs["tolerance"] for _, kwargs in tasks} == {1e-4}, command
        schubert = suites.build_tasks(RunConfig(command="schubert", n=3), tolerances)
        assert {kwargs["rtol"] for _, kwargs in schubert} == {1e-3}


class TestScenarios(unittest.TestCase):
    """Test the number of seeded scenarios per run."""

    def test_theorem3_default_count(self):
        """Test one positive case plus random σ up to fifty scenarios."""
        tasks = suites.build_tasks(RunConfig(command="theorem3", n=4, m_or_k=1))
        assert len(tasks) == 50
        seeds = [kwargs["sigma_seed"] for _, kwargs in tasks]
        assert seeds.count(None) == 1
        assert len(set(seeds)) == 50

    def test_theorem3_reports(self):
        """Test that a short theorem3 run reports every scenario and passes."""
        config = RunConfig(command="theorem3", n=3, samples=3, scenarios=4)
        report = suites.run(config, Settings(workers=1))
        assert sum(1 for r in report.claims if r.claim == "theorem3") == 4
        assert report.exit_code == 0

    def test_coisotropy_default_count(self):
        """Test fifty random chain scenarios spread over the valid m."""
        tasks = suites.build_tasks(RunConfig(command="coisotropy", n=4))
        chains = [kw for check, kw in tasks if check is suites.random_chain_scenario]
        assert len(chains) == 50
        assert {kwargs["m"] for kwargs in chains} == {1, 2}

    def test_coisotropy_reports(self):
        """Test that the chain agrees on the fixed and the random scenarios."""
        config = RunConfig(command="coisotropy", n=3, samples=3, scenarios=6)
        report = suites.run(config, Settings(workers=1))
        chains = [r for r in report.claims if r.claim == "coisotropy-equivalence"]
        assert len(chains) == 1 + 6
        failing = [r.details for r in chains if not r.passed]
        assert not failing, failing
        fields = {r.details["field"] for r in chains if "field" in r.details}
        assert fields <= {"multiplicative", "translated", "affine"}


class TestDeterminism(unittest.TestCase):
    """Test that repeated runs give identical reports."""

    @pytest.mark.slow
    def test_grid_twice(self):
        """Test byte-identical JSON for two grid runs with one seed."""
        names = ("affine", "coisotropy", "cybe")
        subset = {name: suites.SUITES[name] for name in names}
        with patch.dict(suites.SUITES, subset, clear=True):
            first, second = (
                suites.run_grid(2, 11, Settings(workers=1), ns=(3,), scenarios=2)
                for _ in range(2)
            )
            assert first.to_json(drop_timing=True) == second.to_json(drop_timing=True)
        assert len(first.claims) > 10


if __name__ == "__main__":
    unittest.main()
