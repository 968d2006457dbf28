import logging

from . import adapter, config
from .context import CONTEXT_FIELDS, current_context, log_context

__all__ = (
    "CONTEXT_FIELDS",
    "adapt_logger",
    "current_context",
    "get_logger",
    "initialize_logging",
    "log_context",
)


def initialize_logging(*, configure_logging: bool = True, start_listeners: bool = True) -> None:
    """Initialize logging queues and listeners.

    Called once per process by `relatron.process.setup`.
    """
    if configure_logging:
        config.configure_logging()

    if start_listeners:
        from .listener import QueueListener

        QueueListener.start_all()


def adapt_logger(logger: logging.Logger | None, extra: dict) -> adapter.LoggerAdapter:
    """Bind fields to one logger.

    Bound fields win over the run context set with `log_context`; the default
    formatter renders both as trailing `key=value` pairs.
    """
    if logger is None:
        logger = get_logger("relatron")

    return adapter.LoggerAdapter(logger, extra)


def get_logger(name: str | None = None) -> logging.Logger:
    """Get a logger by name; the root logger when name is None."""
    return logging.getLogger(name)
