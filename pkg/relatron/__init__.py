"""Relatron - relational-database task profiler and architecture router.

Computes training-free task embeddings for RDB prediction tasks, predicts whether
graph learning (RDL) or feature synthesis (DFS) will win, and runs budget-aware
replay search with landscape-based post-selection.
"""

from importlib import metadata

try:
    __version__ = metadata.version("relatron")
except metadata.PackageNotFoundError:
    __version__ = "unknown"

del metadata

from .errors import RelatronError

__all__ = [
    "RelatronError",
    "__version__",
]
