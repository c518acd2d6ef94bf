"""
Tests for selftest.py: the invariant suites and their runner.

Covers test matrix items:
- 43: exact suites pass and are reproducible for a fixed seed
- 44: a failing check is reported, never raised
- 45: the full run at 128 bits (slow)
"""
import random

import pytest

from torelli.errors import ConfigurationError, IdentityCheckError
from torelli.selftest import SUITES, run_check, run_selftest, run_suite, suite_names


class TestRegistry:
    def test_suite_names(self):
        assert suite_names() == ["polycore", "resultant", "ciani", "symplectic", "theta", "klein", "all"]

    def test_check_names_are_unique(self):
        names = [name for checks in SUITES.values() for name, _ in checks]
        assert len(names) == len(set(names))

    def test_unknown_suite(self):
        with pytest.raises(ConfigurationError, match="unknown suite"):
            run_suite("nope", 64, 0)


class TestRunCheck:
    def test_torelli_error_is_captured_with_code(self):
        def failing(rng, p, workers):
            raise IdentityCheckError("off by one")

        result = run_check("failing", failing, random.Random(0), 64)
        assert not result.passed
        assert result.detail == "[torelli.invariant] off by one"

    def test_unexpected_error_is_captured(self):
        def broken(rng, p, workers):
            return 1 / 0

        result = run_check("broken", broken, random.Random(0), 64)
        assert not result.passed
        assert result.detail.startswith("Unexpected: ZeroDivisionError")

    def test_detail_of_passing_check(self):
        result = run_check("ok", lambda rng, p, workers: "fine", random.Random(0), 64)
        assert result.passed and result.detail == "fine"


class TestExactSuites:
    @pytest.mark.parametrize("suite", ["polycore", "symplectic"])
    def test_passes(self, suite, capsys):
        report = run_selftest(suite, precision=64, seed=3)
        assert report.ok
        assert [s.name for s in report.suites] == [suite]
        assert f"[INFO] {suite}." in capsys.readouterr().err

    def test_seeded_runs_repeat(self):
        first = run_suite("ciani", 64, 11)
        second = run_suite("ciani", 64, 11)
        assert first == second
        assert first.failed == 0


@pytest.mark.slow
class TestFullRun:
    def test_all_suites_pass(self):
        report = run_selftest("all", precision=128, seed=0)
        failures = [f"{s.name}.{c.name}: {c.detail}" for s in report.suites for c in s.checks if not c.passed]
        assert report.ok, failures
        assert len(report.suites) == 6
