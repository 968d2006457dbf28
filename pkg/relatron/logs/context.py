"""Run context (task, metapath, probe) attached to every record logged inside a block."""

import contextvars
from collections.abc import Iterator
from contextlib import contextmanager

__all__ = (
    "CONTEXT_FIELDS",
    "current_context",
    "log_context",
)

CONTEXT_FIELDS = ("task", "metapath", "probe")

_context: contextvars.ContextVar[dict] = contextvars.ContextVar("relatron_log_context", default={})


def current_context() -> dict:
    return dict(_context.get())


@contextmanager
def log_context(**fields) -> Iterator[dict]:
    """Bind context fields for the duration of the block; inner blocks extend outer ones.

    None values are skipped.

    Raises:
        ValueError: for a field outside `CONTEXT_FIELDS`.
    """
    unknown = sorted(set(fields) - set(CONTEXT_FIELDS))
    if unknown:
        raise ValueError(f"Unknown log context fields {unknown}; expected some of {CONTEXT_FIELDS}")

    merged = {**_context.get(), **{key: value for key, value in fields.items() if value is not None}}
    token = _context.set(merged)
    try:
        yield merged
    finally:
        _context.reset(token)
