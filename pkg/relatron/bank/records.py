"""Performance bank records and JSONL storage."""

import json
import logging
import math
from collections.abc import Iterable
from dataclasses import dataclass
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from ..errors import BankError, BankFormatError
from ..rdb.task import METRIC_DIRECTIONS
from ..util.io import write_text

__all__ = "FAMILIES", "BankRecord", "Bank", "config_signature", "load_bank", "append_records", "bank_from_records"

logger = logging.getLogger(__name__)

FAMILIES = ("rdl", "dfs")

ConfigValue = str | int | float | bool


class BankRecord(BaseModel):
    """One finished trial of a model family on a task."""

    model_config = {"frozen": True, "extra": "forbid"}

    task: str = Field(..., min_length=1)
    family: Literal["rdl", "dfs"]
    config: dict[str, ConfigValue]
    val_score: float
    test_score: float
    metric: str
    higher_is_better: bool | None = None
    trial: int | None = Field(default=None, ge=0)
    landscape: dict[str, float] | None = None

    @model_validator(mode="before")
    @classmethod
    def default_direction(cls, data):
        if isinstance(data, dict) and data.get("higher_is_better") is None and data.get("metric") in METRIC_DIRECTIONS:
            data = {**data, "higher_is_better": METRIC_DIRECTIONS[data["metric"]]}
        return data

    @field_validator("config")
    @classmethod
    def check_config(cls, value: dict) -> dict:
        if not value:
            raise ValueError("config must not be empty")
        return value

    @field_validator("val_score", "test_score")
    @classmethod
    def check_finite(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("scores must be finite")
        return value

    @model_validator(mode="after")
    def check_direction(self) -> "BankRecord":
        if self.higher_is_better is None:
            raise ValueError(f"higher_is_better is required for metric {self.metric!r}")
        return self

    def oriented(self, by: Literal["val", "test"]) -> float:
        """Score flipped so that larger is always better."""
        score = self.val_score if by == "val" else self.test_score
        return score if self.higher_is_better else -score


def config_signature(config: dict, exclusions: Iterable[str] = ("seed",)) -> str:
    """Canonical text of a config map without seed-like keys."""
    excluded = set(exclusions)
    kept = {key: value for key, value in config.items() if key not in excluded}
    return json.dumps(kept, sort_keys=True, separators=(",", ":"))


@dataclass(frozen=True)
class Bank:
    """An immutable snapshot of bank records in file order."""

    records: tuple[BankRecord, ...]

    def __len__(self) -> int:
        return len(self.records)

    def tasks(self) -> list[str]:
        return sorted({r.task for r in self.records})

    def for_task(self, task: str, family: str | None = None) -> list[BankRecord]:
        return [r for r in self.records if r.task == task and (family is None or r.family == family)]

    def families(self, task: str) -> set[str]:
        return {r.family for r in self.records if r.task == task}

    def direction(self, task: str) -> bool:
        records = self.for_task(task)
        if not records:
            raise BankError(f"No records for task {task!r}")
        return bool(records[0].higher_is_better)


def bank_from_records(records: Iterable[BankRecord | dict]) -> Bank:
    return Bank(tuple(r if isinstance(r, BankRecord) else BankRecord.model_validate(r) for r in records))


def load_bank(path: Path | str) -> Bank:
    """Read a JSONL bank; blank lines are skipped.

    Raises:
        BankFormatError: listing every malformed line with its number.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise BankError(f"Cannot read bank {path}: {e}") from e

    records: list[BankRecord] = []
    problems: list[tuple[int, str]] = []
    for number, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            records.append(BankRecord.model_validate(json.loads(line)))
        except json.JSONDecodeError as e:
            problems.append((number, f"invalid JSON: {e.msg}"))
        except ValidationError as e:
            fields = "; ".join(f"{'.'.join(map(str, err['loc'])) or 'record'}: {err['msg']}" for err in e.errors())
            problems.append((number, fields))

    if problems:
        raise BankFormatError(f"{len(problems)} malformed lines in {path}", problems)

    logger.debug("Loaded %d bank records from %s", len(records), path)
    return Bank(tuple(records))


def append_records(path: Path | str, records: Iterable[BankRecord | dict]) -> int:
    """Append validated records as JSON lines through an atomic rewrite; returns the number written."""
    path = Path(path)
    validated = bank_from_records(records).records
    existing = path.read_text(encoding="utf-8") if path.is_file() else ""
    if existing and not existing.endswith("\n"):
        existing += "\n"
    lines = [json.dumps(r.model_dump(mode="json", exclude_none=True), sort_keys=True) + "\n" for r in validated]
    write_text(path, existing + "".join(lines))
    logger.debug("Appended %d records to %s", len(validated), path)
    return len(validated)
