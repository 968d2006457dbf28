"""Logging formatter module."""

import logging

__all__ = ("DefaultFormatter",)


class DefaultFormatter(logging.Formatter):
    """Default log formatter.

    Uses `{}`-style formatting and appends context bound through
    `relatron.logs.adapt_logger` as `key=value` pairs.
    """

    def __init__(self, fmt=None, datefmt=None, style="{", **kwds):
        super().__init__(fmt=fmt, datefmt=datefmt, style=style, **kwds)

    def format(self, record: logging.LogRecord) -> str:
        text = super().format(record)
        keys = getattr(record, "context_keys", ())
        if keys:
            context = " ".join(f"{key}={getattr(record, key, None)}" for key in keys)
            text = f"{text} [{context}]"
        return text
