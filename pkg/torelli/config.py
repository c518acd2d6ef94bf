"""
Run configuration.

Precedence: explicit overrides (CLI flags) > TORELLI_* environment variables
> defaults. The CLI loads a .env file before calling load_config().
"""
import os
from dataclasses import dataclass
from typing import Any, Literal

from torelli.errors import ConfigurationError

DEFAULT_PRECISION: int = 256
MIN_NUMERIC_PRECISION: int = 32
MIN_THETA_PRECISION: int = 64
DEFAULT_SEED: int = 20240229
DEFAULT_ZERO_FRACTION: float = 1 / 3
DEFAULT_NONZERO_FRACTION: float = 1 / 6

OutputFormat = Literal["json", "text"]

_ENV_KEYS: dict[str, str] = {
    "precision": "TORELLI_PREC",
    "workers": "TORELLI_WORKERS",
    "seed": "TORELLI_SEED",
    "output_format": "TORELLI_FORMAT",
    "zero_fraction": "TORELLI_ZERO_FRACTION",
    "nonzero_fraction": "TORELLI_NONZERO_FRACTION",
    "debug": "TORELLI_DEBUG",
}


@dataclass(frozen=True)
class RunConfig:
    precision: int = DEFAULT_PRECISION
    zero_fraction: float = DEFAULT_ZERO_FRACTION
    nonzero_fraction: float = DEFAULT_NONZERO_FRACTION
    output_format: OutputFormat = "json"
    seed: int = DEFAULT_SEED
    workers: int = 1
    debug: bool = False

    def __post_init__(self) -> None:
        if self.precision < MIN_NUMERIC_PRECISION:
            raise ConfigurationError(
                f"precision must be at least {MIN_NUMERIC_PRECISION} bits, got {self.precision}"
            )
        if self.workers < 1:
            raise ConfigurationError(f"workers must be >= 1, got {self.workers}")
        if not (0 < self.nonzero_fraction < self.zero_fraction < 1):
            raise ConfigurationError(
                "vanishing band needs 0 < nonzero_fraction < zero_fraction < 1, got "
                f"nonzero_fraction={self.nonzero_fraction}, zero_fraction={self.zero_fraction}"
            )
        if self.output_format not in ("json", "text"):
            raise ConfigurationError(
                f"output format must be 'json' or 'text', got {self.output_format!r}"
            )

    def require_theta_precision(self) -> None:
        """Theta-dependent commands need more headroom than exact-arithmetic ones."""
        if self.precision < MIN_THETA_PRECISION:
            raise ConfigurationError(
                f"theta evaluation needs at least {MIN_THETA_PRECISION} bits, got {self.precision}"
            )


def _coerce(name: str, raw: str) -> Any:
    try:
        if name in ("precision", "workers", "seed"):
            return int(raw)
        if name in ("zero_fraction", "nonzero_fraction"):
            return float(raw)
    except ValueError as exc:
        raise ConfigurationError(f"{_ENV_KEYS[name]}={raw!r} is not a number") from exc
    if name == "debug":
        return raw.strip().lower() in ("1", "true", "yes")
    return raw.strip().lower()


def load_config(**overrides: Any) -> RunConfig:
    """
    Build a RunConfig from the environment, then apply non-None overrides.

    Unknown override names raise ConfigurationError rather than being ignored.
    """
    unknown = set(overrides) - set(_ENV_KEYS)
    if unknown:
        raise ConfigurationError(f"unknown configuration keys: {sorted(unknown)}")

    values: dict[str, Any] = {}
    for name, env_key in _ENV_KEYS.items():
        raw = os.environ.get(env_key)
        if raw is not None and raw != "":
            values[name] = _coerce(name, raw)
    values.update({k: v for k, v in overrides.items() if v is not None})
    return RunConfig(**values)


def debug_enabled() -> bool:
    return os.environ.get("TORELLI_DEBUG", "").strip().lower() in ("1", "true", "yes")
