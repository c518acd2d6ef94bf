"""
Tests for config.py: precedence of flags over TORELLI_* variables over defaults.
"""
import pytest

from torelli.config import DEFAULT_PRECISION, RunConfig, debug_enabled, load_config
from torelli.errors import ConfigurationError

_ALL_KEYS = (
    "TORELLI_PREC",
    "TORELLI_WORKERS",
    "TORELLI_SEED",
    "TORELLI_FORMAT",
    "TORELLI_ZERO_FRACTION",
    "TORELLI_NONZERO_FRACTION",
    "TORELLI_DEBUG",
)


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for key in _ALL_KEYS:
        monkeypatch.delenv(key, raising=False)


class TestLoadConfig:
    def test_defaults(self):
        config = load_config()
        assert config.precision == DEFAULT_PRECISION
        assert config.output_format == "json"
        assert config.workers == 1 and not config.debug

    def test_environment(self, monkeypatch):
        monkeypatch.setenv("TORELLI_PREC", "128")
        monkeypatch.setenv("TORELLI_FORMAT", "TEXT")
        monkeypatch.setenv("TORELLI_DEBUG", "yes")
        config = load_config()
        assert (config.precision, config.output_format, config.debug) == (128, "text", True)

    def test_override_beats_environment(self, monkeypatch):
        monkeypatch.setenv("TORELLI_PREC", "128")
        assert load_config(precision=512).precision == 512

    def test_none_override_is_ignored(self, monkeypatch):
        monkeypatch.setenv("TORELLI_WORKERS", "4")
        assert load_config(workers=None).workers == 4

    def test_empty_variable_is_ignored(self, monkeypatch):
        monkeypatch.setenv("TORELLI_SEED", "")
        assert load_config().seed == RunConfig().seed

    def test_non_numeric_variable(self, monkeypatch):
        monkeypatch.setenv("TORELLI_PREC", "lots")
        with pytest.raises(ConfigurationError, match="TORELLI_PREC"):
            load_config()

    def test_unknown_override(self):
        with pytest.raises(ConfigurationError, match="unknown"):
            load_config(colour="blue")


class TestValidation:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"precision": 16},
            {"workers": 0},
            {"zero_fraction": 0.1, "nonzero_fraction": 0.2},
            {"output_format": "yaml"},
        ],
    )
    def test_rejected(self, kwargs):
        with pytest.raises(ConfigurationError):
            RunConfig(**kwargs)

    def test_theta_precision_floor(self):
        RunConfig(precision=64).require_theta_precision()
        with pytest.raises(ConfigurationError, match="theta"):
            RunConfig(precision=48).require_theta_precision()

    def test_debug_flag(self, monkeypatch):
        assert not debug_enabled()
        monkeypatch.setenv("TORELLI_DEBUG", "1")
        assert debug_enabled()
