"""Logging handlers."""

import logging
import logging.handlers
from queue import Queue

from .context import CONTEXT_FIELDS, current_context

__all__ = ("QueueHandler", "stamp_context")


def stamp_context(record: logging.LogRecord) -> logging.LogRecord:
    """Copy the active run context onto `record`.

    Fields bound through `adapt_logger` win over the run context. Stamped keys
    join `context_keys` in `CONTEXT_FIELDS` order, ahead of adapter-only keys.
    """
    context = current_context()
    bound = tuple(getattr(record, "context_keys", ()))
    for key, value in context.items():
        if key not in bound:
            setattr(record, key, value)
    keys = [key for key in CONTEXT_FIELDS if key in context or key in bound]
    record.context_keys = tuple(keys + [key for key in bound if key not in keys])
    return record


class QueueHandler(logging.handlers.QueueHandler):
    """Queue handler that stamps the emitting thread's run context.

    Stamping happens before the record is queued, since the listener thread
    sees no context of its own. The listener starts on first emit.
    """

    listener: logging.handlers.QueueListener | None

    def prepare(self, record: logging.LogRecord) -> logging.LogRecord:
        return super().prepare(stamp_context(record))

    def emit(self, record):
        if self.listener is not None and not self.listener.running and isinstance(self.queue, Queue):
            self.listener.start()
        super().emit(record)
