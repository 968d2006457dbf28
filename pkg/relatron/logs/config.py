"""Logging configuration."""

import copy
from logging import config as logging_config

from .defaults import LOGGING_CONFIG

__all__ = (
    "configure_logging",
    "LOGGING_CONFIG",
)


def configure_logging(config: dict | None = None, *, incremental: bool = False, level: str | None = None) -> None:
    """Configure logging from a dictConfig mapping.

    Args:
        config: Logging configuration dictionary. The package default when None.
        incremental: Whether to apply the configuration incrementally.
        level: Override for the `relatron` logger level.
    """
    if config is None:
        config = copy.deepcopy(LOGGING_CONFIG)

    if level:
        config["loggers"]["relatron"]["level"] = level.upper()

    if incremental:
        config["incremental"] = True

    logging_config.dictConfig(config)
