import logging

__all__ = ("LoggerAdapter",)


class LoggerAdapter(logging.LoggerAdapter):
    """Context-binding adapter.

    Per-call extras are merged over the bound ones (the stdlib default replaces
    them before Python 3.13), and the merged key names are recorded so the
    formatter can render them.
    """

    def __init__(self, logger, extra=None):
        super().__init__(logger, dict(extra or {}))

    def process(self, msg, kwds):
        extra = {**self.extra, **(kwds.get("extra") or {})}
        extra.pop("context_keys", None)
        extra["context_keys"] = tuple(extra)
        kwds["extra"] = extra
        return msg, kwds
