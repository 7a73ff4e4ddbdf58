"""
Run configuration: defaults < SPINORLAB_* environment < flat key=value file < CLI flags.
"""
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, Optional

from dotenv import dotenv_values
from pydantic import Field, ValidationError, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from app.constants import DomainVolumes
from app.errors import ConfigError

logger = logging.getLogger(__name__)

CONSTANTS_SOURCES = ("CODATA-2018", "CODATA-2014")


class RunConfig(BaseSettings):
    """Validated settings for one workbench run. Unknown keys are rejected."""

    model_config = SettingsConfigDict(env_prefix="SPINORLAB_", extra="forbid", frozen=True)

    n: int = 2
    n_max: int = Field(default=5, ge=1)
    trials: int = Field(default=100, gt=0)
    seed: int = Field(default=7, ge=0)
    tol: float = Field(default=1e-9, gt=0)
    identity_tol: float = Field(default=1e-12, gt=0)
    null_tol: float = Field(default=1e-9, gt=0)
    generic_tol: float = Field(default=1e-6, gt=0)
    field_tol: float = Field(default=1e-10, gt=0)
    grid: int = Field(default=128, ge=64)
    nystrom_grid: int = Field(default=20, ge=8)
    nystrom_terms: int = Field(default=3, ge=1, le=6)
    n_probe: int = Field(default=3, ge=1, le=6)
    mc_samples: int = Field(default=1_000_000, gt=0)
    constants_source: str = "CODATA-2018"
    reduced_mass: bool = True
    out_dir: Path = Path("reports")
    log_dir: Path = Path("logs")

    @field_validator("n")
    @classmethod
    def _supported_n(cls, value: int) -> int:
        if not 1 <= value <= 6:
            raise ValueError(f"n={value} out of supported range [1, 6]")
        return value

    @field_validator("constants_source")
    @classmethod
    def _known_source(cls, value: str) -> str:
        if value not in CONSTANTS_SOURCES:
            raise ValueError(f"constants_source must be one of {CONSTANTS_SOURCES}")
        return value

    def report_fields(self) -> Dict[str, Any]:
        """Config as plain JSON-ready values, for embedding in reports."""
        data = self.model_dump()
        data["out_dir"] = str(self.out_dir)
        data["log_dir"] = str(self.log_dir)
        return data


def read_config_file(path: Path) -> Dict[str, str]:
    """
    Read a flat key=value file. Keys are lower-cased field names; blank
    lines and # comments are ignored.
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    values = dotenv_values(path)
    parsed = {}
    for key, value in values.items():
        if value is None:
            raise ConfigError(f"config key '{key}' in {path} has no value")
        parsed[key.strip().lower()] = value.strip()
    logger.info(f"Loaded {len(parsed)} setting(s) from {path}")
    return parsed


def load_run_config(config_file: Optional[Path] = None, **flags: Any) -> RunConfig:
    """
    Merge config sources with precedence flags > file > environment > defaults.

    Flags that are None are treated as not given.

    Raises:
        ConfigError: on unknown keys or invalid values
    """
    merged: Dict[str, Any] = {}
    if config_file is not None:
        merged.update(read_config_file(config_file))
    merged.update({key: value for key, value in flags.items() if value is not None})
    try:
        return RunConfig(**merged)
    except ValidationError as exc:
        problems = "; ".join(
            f"{'.'.join(str(part) for part in err['loc']) or 'config'}: {err['msg']}" for err in exc.errors()
        )
        raise ConfigError(f"invalid configuration: {problems}") from exc


def parse_overrides(items: Optional[Iterable[str]]) -> Dict[str, float]:
    """Parse repeated NAME=VALUE volume overrides; names are V_S4, V_D5 or V_Q5 and values positive."""
    overrides: Dict[str, float] = {}
    for item in items or []:
        name, sep, raw = item.partition("=")
        if not sep or not name.strip():
            raise ConfigError(f"override '{item}' is not NAME=VALUE")
        try:
            value = float(raw)
        except ValueError:
            raise ConfigError(f"override '{item}' has a non-numeric value") from None
        if value <= 0:
            raise ConfigError(f"override '{item}' must be positive")
        key = name.strip().upper()
        if key not in DomainVolumes.OVERRIDE_KEYS:
            expected = sorted(DomainVolumes.OVERRIDE_KEYS)
            raise ConfigError(f"unknown override '{name.strip()}', expected one of {expected}")
        overrides[key] = value
    return overrides

