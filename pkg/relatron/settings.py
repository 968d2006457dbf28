"""Configuration management for Relatron - Using pydantic-settings."""

import json
import logging
from functools import cached_property
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from .util.paths import get_toy_path
from .util.system import get_project_root

__all__ = "SketchSettings", "WalkSettings", "HpoSettings", "RelatronConfig", "ConfigManager"

logger = logging.getLogger(__name__)


class SketchSettings(BaseModel):
    """Path sketch defaults."""

    model_config = {
        "extra": "forbid",
        "validate_assignment": True,
    }

    width: int = Field(default=64, ge=1, description="Sketch width d")
    horizon: int = Field(default=3, ge=1, description="Path horizon T")
    mode: Literal["dense", "tensor"] = Field(default="dense", description="Sketch realization")


class WalkSettings(BaseModel):
    """Random-walk feature defaults."""

    model_config = {
        "extra": "forbid",
        "validate_assignment": True,
    }

    walks: int = Field(default=20, ge=1, description="Walks per seed entity")
    length: int = Field(default=4, ge=1, description="Steps per walk")
    max_seeds: int = Field(default=2000, ge=1, description="Cap on seed entities (uniform subsample)")


class HpoSettings(BaseModel):
    """Replay search defaults."""

    model_config = {
        "extra": "forbid",
        "validate_assignment": True,
    }

    gamma: float = Field(default=0.25, gt=0, lt=1, description="Good-set quantile")
    n_candidates: int = Field(default=24, ge=1, description="Candidates drawn from the good density")
    startup: int = Field(default=5, ge=1, description="History size below which sampling is uniform")


class RelatronConfig(BaseSettings):
    """Main Relatron configuration."""

    model_config = SettingsConfigDict(
        env_prefix="RELATRON_",
        env_file=".env",
        env_nested_delimiter="__",
        extra="allow",
        validate_assignment=True,
        env_ignore_empty=True,
    )

    seed: int = Field(default=0, description="Global seed for every stochastic step (env: RELATRON_SEED)")
    threads: int = Field(default=1, ge=0, description="Worker threads; 0 means one per CPU (env: RELATRON_THREADS)")
    log_level: str | None = Field(
        default=None, description="Logging level for Relatron (default: INFO) (env: RELATRON_LOG_LEVEL)"
    )
    config_path: Path | None = Field(
        default=None, description="Explicit configuration file path (env: RELATRON_CONFIG_PATH)"
    )
    data_path: Path = Field(
        default_factory=get_toy_path, description="Default dataset directory (env: RELATRON_DATA_PATH)"
    )
    oracle_cap: int = Field(default=1_000_000, ge=1, description="Path-bag oracle enumeration cap")
    multi_hop: bool = Field(
        default=False, description="Also enumerate metapaths with two intermediate types (env: RELATRON_MULTI_HOP)"
    )
    sketch: SketchSettings = Field(default_factory=SketchSettings)
    walks: WalkSettings = Field(default_factory=WalkSettings)
    hpo: HpoSettings = Field(default_factory=HpoSettings)
    seed_exclusions: list[str] = Field(
        default_factory=lambda: ["seed"], description="Config keys ignored by bank config signatures"
    )
    category_slots: int = Field(default=32, ge=1, description="Hashed one-hot slots per categorical column")
    ridge_lambda: float = Field(default=1.0, gt=0, description="Ridge head regularization")

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str | None) -> str | None:
        if v is None:
            return v
        level = v.upper()
        if level not in logging.getLevelNamesMapping():
            raise ValueError(f"Unknown log level {v!r}")
        return level

    def get_config_path(self) -> Path:
        """Explicit config path, else `.relatron/config.json` under the project root."""
        if self.config_path:
            return self.config_path
        return get_project_root() / ".relatron" / "config.json"


class ConfigManager:
    """Loads Relatron configuration from an optional JSON file layered over env settings."""

    config_path: Path

    def __init__(self, config_path: Path | str | None = None):
        config = RelatronConfig()

        if config_path:
            self.config_path = Path(config_path)
        else:
            self.config_path = config.get_config_path()

    @cached_property
    def logger(self) -> logging.Logger:
        """Get logger for this manager."""
        return logging.getLogger(__name__)

    def load_config(self, **overrides) -> RelatronConfig:
        """Load configuration, then apply non-None overrides (CLI flags).

        Unreadable files fall back to env/default settings with an error log.
        """
        config = RelatronConfig()

        if self.config_path.exists():
            try:
                with self.config_path.open("r") as f:
                    data = json.load(f)

                for key, value in data.items():
                    if key not in RelatronConfig.model_fields:
                        self.logger.warning("Ignoring unknown config key %r in %s.", key, self.config_path)
                        continue
                    setattr(config, key, value)

            except Exception as e:
                self.logger.error("Error loading config %s: %s", self.config_path, e)
                config = RelatronConfig()

        for key, value in overrides.items():
            if value is not None:
                setattr(config, key, value)

        return config
