"""File output helpers: canonical JSON, atomic writes and run manifests."""

import hashlib
import json
import logging
import os
import sys
import tempfile
import time
from collections.abc import Iterable
from pathlib import Path
from typing import Any

import numpy as np

__all__ = (
    "FORMAT_VERSION",
    "check_format_version",
    "dumps_json",
    "write_json",
    "write_text",
    "read_json",
    "file_digest",
    "RunManifest",
)

FORMAT_VERSION = "1.0"

logger = logging.getLogger(__name__)


def _default(value: Any):
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Path):
        return str(value)
    if hasattr(value, "model_dump"):
        return value.model_dump(mode="json")
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def _finite(value: Any):
    if isinstance(value, float) and not np.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _finite(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_finite(v) for v in value]
    return value


def dumps_json(data: Any) -> str:
    """Canonical JSON text: sorted keys, two-space indent, trailing newline, NaN as null."""
    data = json.loads(json.dumps(data, default=_default))
    return json.dumps(_finite(data), indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_text(path: Path | str, text: str) -> Path:
    """Write text atomically through a temporary sibling file and `os.replace`."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise
    return path


def write_json(path: Path | str | None, data: Any) -> str:
    """Write canonical JSON to `path`, or to stdout when path is None or "-"."""
    text = dumps_json(data)
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        write_text(path, text)
        logger.debug("Wrote %s", path)
    return text


def read_json(path: Path | str) -> Any:
    with Path(path).open("r", encoding="utf-8") as f:
        return json.load(f)


def check_format_version(data: dict, *, key: str = "format_version", supported: str = FORMAT_VERSION) -> None:
    """Reject documents whose major version differs from the supported one."""
    from relatron.errors import UnsupportedFormatVersion

    version = str(data.get(key, supported))
    if version.split(".")[0] != supported.split(".")[0]:
        raise UnsupportedFormatVersion(f"Unsupported {key} {version!r}; expected major version {supported.split('.')[0]}")


def file_digest(path: Path | str) -> str:
    """sha256 hex digest of a file's content."""
    digest = hashlib.sha256()
    with Path(path).open("rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


class RunManifest:
    """Provenance record written next to each command output."""

    def __init__(self, command: str, config: dict, seed: int, version: str):
        self.command = command
        self.config = config
        self.seed = seed
        self.version = version
        self.inputs: dict[str, str] = {}
        self._started = time.perf_counter()

    def add_inputs(self, paths: Iterable[Path | str | None]) -> None:
        for path in paths:
            if path is None:
                continue
            path = Path(path)
            if path.is_dir():
                for child in sorted(p for p in path.rglob("*") if p.is_file()):
                    self.inputs[str(child)] = file_digest(child)
            elif path.exists():
                self.inputs[str(path)] = file_digest(path)

    def as_dict(self) -> dict:
        return {
            "command": self.command,
            "config": self.config,
            "seed": self.seed,
            "inputs": self.inputs,
            "version": self.version,
            "wall_time": round(time.perf_counter() - self._started, 6),
            "format_version": FORMAT_VERSION,
        }

    def write(self, out: Path | str | None) -> None:
        """Write `<out>.manifest.json`, or print to stderr when output went to stdout."""
        if out is None or str(out) == "-":
            sys.stderr.write(dumps_json(self.as_dict()))
            return
        out = Path(out)
        write_text(out.with_name(out.name + ".manifest.json"), dumps_json(self.as_dict()))
