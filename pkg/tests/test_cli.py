"""
Tests for cli.py: exit codes, output routing, error messages.

Covers test matrix items:
- 46: exit code 0 and JSON on stdout for every exact command
- 47: exit code 1 on TorelliError, with "Error [<code>]: ..." on stderr
- 48: exit code 2 on usage and configuration errors
- 49: exit code 3 when the Igusa decision falls inside the guard band
"""
import json
import os
from unittest.mock import patch

import pytest
from mpmath import mp
from typer.testing import CliRunner

from torelli.cli import EXIT_DOMAIN_ERROR, EXIT_INDETERMINATE, EXIT_USAGE, app
from torelli.errors import DegenerateLatticeError, GenusOutOfRangeError
from torelli.schemas import CheckResult, SelftestReport, SuiteResult
from torelli.theta import IgusaLabel, IgusaResult
from tests.conftest import fixture_path

runner = CliRunner()


@pytest.fixture(autouse=True)
def quiet_env(monkeypatch):
    for key in ("TORELLI_PREC", "TORELLI_FORMAT", "TORELLI_WORKERS", "TORELLI_SEED"):
        monkeypatch.delenv(key, raising=False)
    monkeypatch.setenv("TORELLI_DEBUG", "0")


def _igusa_result(label: IgusaLabel, band_count: int = 0) -> IgusaResult:
    return IgusaResult(
        label=label,
        chi18=mp.mpf(1),
        sigma140=mp.mpf(1),
        magnitudes=(mp.mpf("1e-10"), mp.mpf("0.5"), mp.mpf(1)),
        zero_count=0,
        band_count=band_count,
    )


# ---------------------------------------------------------------------------
# Exact commands
# ---------------------------------------------------------------------------

class TestDisc:
    def test_fermat_text(self):
        result = runner.invoke(app, ["disc", "--form", "x^4+y^4+z^4"])
        assert result.exit_code == 0
        report = json.loads(result.output)
        assert report["discriminant"] == "18014398509481984"
        assert report["form"] == "x^4 + y^4 + z^4"

    def test_form_payload_file(self):
        result = runner.invoke(app, ["disc", "--form", fixture_path("fermat.json"), "--rule", "reverse"])
        assert result.exit_code == 0
        assert json.loads(result.output)["rule"] == "reverse"

    def test_bad_rule_is_usage_error(self):
        result = runner.invoke(app, ["disc", "--form", "x^4", "--rule", "sideways"])
        assert result.exit_code == EXIT_USAGE

    def test_syntax_error(self):
        result = runner.invoke(app, ["disc", "--form", "x^4 + w^4"])
        assert result.exit_code == EXIT_DOMAIN_ERROR
        assert "Error [polycore.syntax]" in result.output

    def test_text_format(self):
        result = runner.invoke(app, ["--format", "text", "disc", "--form", "x^4+y^4+z^4"])
        assert result.exit_code == 0
        assert "discriminant  18014398509481984" in result.output


class TestClassify:
    def test_identity(self):
        result = runner.invoke(app, ["classify", "--matrix", fixture_path("identity.json")])
        assert result.exit_code == 0
        report = json.loads(result.output)
        assert report["label"] == "NonHyperellipticJacobian"
        assert (report["T"], report["X"], report["D"]) == ("1", "1", "1")
        assert report["square"] is True

    def test_twist(self):
        result = runner.invoke(app, ["classify", "--matrix", fixture_path("twist.json")])
        report = json.loads(result.output)
        assert report["label"] == "QuadraticTwistObstruction"
        assert report["twist_d"] == "5"

    def test_hyperelliptic(self):
        result = runner.invoke(app, ["classify", "--matrix", fixture_path("hyperelliptic.json")])
        assert json.loads(result.output)["T"] == "0"

    def test_repaired_input_warns(self):
        result = runner.invoke(app, ["classify", "--matrix", fixture_path("identity_truncated.json")])
        assert result.exit_code == 0
        assert "[WARN]" in result.output

    def test_unreadable_input(self):
        result = runner.invoke(app, ["classify", "--matrix", "not a matrix"])
        assert result.exit_code == EXIT_DOMAIN_ERROR
        assert "Error [io.input_format]" in result.output


class TestIsotropicAndSymplectic:
    def test_enumerate_genus_two(self):
        result = runner.invoke(app, ["isotropic", "enumerate", "--g", "2"])
        assert result.exit_code == 0
        report = json.loads(result.output)
        assert report["count"] == 15 and len(report["subspaces"]) == 15

    def test_genus_four_is_domain_error(self):
        result = runner.invoke(app, ["isotropic", "enumerate", "--g", "4"])
        assert result.exit_code == EXIT_DOMAIN_ERROR
        assert "Error [" in result.output

    def test_levi_matrix(self):
        result = runner.invoke(app, ["symplectic", "check", "--matrix", fixture_path("levi_g2.json")])
        assert result.exit_code == 0
        report = json.loads(result.output)
        assert report["kappa_squared"] == 1
        assert report["membership"]["M(Z)"] is True
        assert report["membership"]["Gamma(2)"] is False

    def test_non_symplectic(self):
        result = runner.invoke(app, ["symplectic", "check", "--matrix", '{"matrix": [[1, 1], [1, 1]]}'])
        assert result.exit_code == EXIT_DOMAIN_ERROR


# ---------------------------------------------------------------------------
# Theta commands
# ---------------------------------------------------------------------------

class TestTheta:
    def test_theta_at_i(self):
        result = runner.invoke(app, ["theta", "null", "--char", "[0;0]", "--tau", "i", "--prec", "64"])
        assert result.exit_code == 0
        report = json.loads(result.output)
        assert report["value"]["re"].startswith("1.08643")
        assert report["parity"] == "even"

    def test_bad_characteristic(self):
        result = runner.invoke(app, ["theta", "null", "--char", "00", "--tau", "i"])
        assert result.exit_code == EXIT_USAGE

    def test_precision_too_low_for_theta(self):
        result = runner.invoke(app, ["theta", "null", "--char", "[0;0]", "--tau", "i", "--prec", "48"])
        assert result.exit_code == EXIT_USAGE
        assert "Error [config.invalid]" in result.output

    def test_chi_in_genus_two(self):
        result = runner.invoke(app, ["--prec", "64", "chi18", "--tau", "1.1i,1.2i"])
        assert result.exit_code == 0
        report = json.loads(result.output)
        assert (report["kind"], report["g"], report["weight"]) == ("chi_k", 2, 5)

    def test_sigma140_needs_genus_three(self):
        result = runner.invoke(app, ["sigma140", "--tau", "i", "--prec", "64"])
        assert result.exit_code == EXIT_DOMAIN_ERROR


class TestIgusa:
    def test_indeterminate_exit_code(self):
        with patch("torelli.cli.igusa_classify", return_value=_igusa_result(IgusaLabel.INDETERMINATE, band_count=1)):
            result = runner.invoke(app, ["igusa", "--tau", fixture_path("tau_g3_diagonal.json"), "--prec", "64"])
        assert result.exit_code == EXIT_INDETERMINATE
        assert "[WARN] 1 theta magnitude(s)" in result.output

    def test_decided_label(self):
        with patch("torelli.cli.igusa_classify", return_value=_igusa_result(IgusaLabel.NON_HYPERELLIPTIC)):
            result = runner.invoke(app, ["igusa", "--tau", fixture_path("tau_g3_diagonal.json"), "--prec", "64"])
        assert result.exit_code == 0
        assert '"label": "NonHyperellipticJacobian"' in result.output

    def test_domain_error(self):
        with patch("torelli.cli.igusa_classify", side_effect=GenusOutOfRangeError("g = 2")):
            result = runner.invoke(app, ["igusa", "--tau", "i,i", "--prec", "64"])
        assert result.exit_code == EXIT_DOMAIN_ERROR
        assert "g = 2" in result.output


# ---------------------------------------------------------------------------
# verify-klein and selftest
# ---------------------------------------------------------------------------

class TestVerifyKlein:
    def test_needs_tau_or_matrix(self):
        assert runner.invoke(app, ["verify-klein"]).exit_code == EXIT_USAGE
        assert runner.invoke(app, ["verify-klein", "--corollary"]).exit_code == EXIT_USAGE

    def test_wrong_tau_count(self):
        result = runner.invoke(app, ["verify-klein", "--tau", "0.8i,1.1i", "--prec", "64"])
        assert result.exit_code == EXIT_DOMAIN_ERROR
        assert "three tau values" in result.output

    def test_degenerate_lattice(self):
        with patch("torelli.cli._klein_report", side_effect=DegenerateLatticeError("theta[1;0] vanishes")):
            result = runner.invoke(app, ["verify-klein", "--tau", "0.8i,1.1i,100i", "--prec", "64"])
        assert result.exit_code == EXIT_DOMAIN_ERROR
        assert "theta[1;0] vanishes" in result.output

    @pytest.mark.slow
    def test_sample_point(self):
        result = runner.invoke(app, ["verify-klein", "--tau", "0.8i,1.1i,1.3i", "--prec", "128", "--timings"])
        assert result.exit_code == 0, result.output
        assert '"passed": true' in result.output
        assert '"timings"' in result.output


class TestSelftest:
    def test_text_summary(self):
        result = runner.invoke(app, ["--format", "text", "selftest", "--suite", "polycore", "--prec", "64"])
        assert result.exit_code == 0
        assert "Summary: 4/4 checks passed" in result.output

    def test_unknown_suite(self):
        result = runner.invoke(app, ["selftest", "--suite", "everything"])
        assert result.exit_code == EXIT_USAGE

    def test_failure_exit_code(self):
        failing = SelftestReport(
            precision=64,
            seed=0,
            suites=[SuiteResult(name="theta", checks=[CheckResult(name="x", passed=False, detail="bad")])],
        )
        with patch("torelli.cli.run_selftest", return_value=failing):
            result = runner.invoke(app, ["selftest", "--suite", "theta", "--prec", "64"])
        assert result.exit_code == EXIT_DOMAIN_ERROR
        assert '"ok": false' in result.output

    def test_invalid_workers(self):
        result = runner.invoke(app, ["--workers", "0", "selftest", "--suite", "polycore"])
        assert result.exit_code == EXIT_USAGE


class TestDebugFlag:
    def test_sets_environment(self):
        result = runner.invoke(app, ["--debug", "disc", "--form", "x^4"])
        assert result.exit_code == 0
        assert os.environ["TORELLI_DEBUG"] == "1"
