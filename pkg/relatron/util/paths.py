"""Location of the bundled toy dataset."""

from pathlib import Path

from relatron import contrib

__all__ = ("get_toy_path",)


def get_toy_path() -> Path:
    """Directory holding the bundled toy RDB (schema, tables, task and bank).

    The first `relatron.contrib` namespace directory with a toy schema wins.
    """
    roots = [Path(path) for path in contrib.__path__ if Path(path).is_dir()]
    for root in roots:
        if (root / "toy" / "schema.json").exists():
            return root / "toy"
    return roots[0] / "toy"
