import os
import sys
from pathlib import Path
from typing import Optional

try:
    from rich import console, pretty, traceback

    _rc: console.Console | None = None

except (ImportError, ModuleNotFoundError):
    pass

__all__ = (
    "initterm",
    "get_project_root",
    "resolve_threads",
)


def initterm(**kwds) -> Optional["console.Console"]:
    """Install rich tracebacks and pretty printing when attached to a terminal."""
    try:
        if not os.isatty(0):
            return None

    except (AttributeError, OSError):
        return None

    try:
        global _rc

        if _rc is None:
            kwds.setdefault("color_system", "truecolor")
            kwds.setdefault("file", sys.stderr)
            _rc = console.Console(**kwds)
            pretty.install(console=_rc)
            traceback.install(console=_rc, show_locals=False)

        return _rc

    except NameError:
        return None


def get_project_root() -> Path:
    """Get the current project root (where a .relatron directory may live)."""
    return Path.cwd()


def resolve_threads(threads: int | None) -> int:
    """Clamp a requested worker count; 0 or None means one per CPU."""
    if not threads:
        return os.cpu_count() or 1
    return max(1, int(threads))
