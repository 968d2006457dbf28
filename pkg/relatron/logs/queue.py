"""Logging queue shared by pool workers and the listener thread."""

import queue

__all__ = ("LogQueue",)


class LogQueue(queue.Queue):
    """Unbounded queue for log records."""

    def __init__(self):
        super().__init__(maxsize=0)
