"""Background writer for the shared log queue."""

import atexit
import logging.handlers
import weakref

from .queue import LogQueue

__all__ = ("QueueListener",)


class QueueListener(logging.handlers.QueueListener):
    """Writes queued records on one background thread.

    Pool workers only enqueue, so their records never interleave mid-line with
    command output on stderr. Every listener is stopped, and so drained, at exit.
    """

    _listeners: "weakref.WeakSet[QueueListener]" = weakref.WeakSet()

    def __init__(self, queue: LogQueue, *handlers: logging.Handler, respect_handler_level: bool = True):
        super().__init__(queue, *handlers, respect_handler_level=respect_handler_level)
        type(self)._listeners.add(self)

    @property
    def running(self) -> bool:
        return self._thread is not None

    def start(self):
        if not self.running:
            super().start()
            atexit.register(self.stop)

    def stop(self):
        if self.running:
            super().stop()
            atexit.unregister(self.stop)

    def flush(self):
        """Write every record queued so far, then keep listening."""
        if self.running:
            self.stop()
            self.start()

    @classmethod
    def start_all(cls):
        for listener in list(cls._listeners):
            listener.start()

    @classmethod
    def flush_all(cls):
        """Drain all listeners; the CLI calls this before printing a command's result."""
        for listener in list(cls._listeners):
            listener.flush()

    @classmethod
    def stop_all(cls):
        for listener in list(cls._listeners):
            listener.stop()
