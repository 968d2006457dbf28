"""Temporal task tables and per-entity label aggregation."""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Literal

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field, ValidationError, model_validator

from ..errors import DataError
from .database import Database, parse_timestamps

__all__ = (
    "METRIC_DIRECTIONS",
    "MetricSpec",
    "TaskHeader",
    "TaskTable",
    "EntityLabelSummary",
    "load_task",
    "aggregate_labels",
    "task_stats",
)

logger = logging.getLogger(__name__)

METRIC_DIRECTIONS = {"roc_auc": True, "mae": False, "accuracy": True}

SPLITS = ("train", "val", "test")


class MetricSpec(BaseModel):
    model_config = {"frozen": True, "extra": "forbid"}

    name: Literal["roc_auc", "mae", "accuracy"]
    higher_is_better: bool | None = None

    @model_validator(mode="before")
    @classmethod
    def default_direction(cls, data):
        if isinstance(data, dict) and data.get("higher_is_better") is None:
            data = {**data, "higher_is_better": METRIC_DIRECTIONS.get(data.get("name"))}
        return data


class TaskHeader(BaseModel):
    """The `task.json` descriptor."""

    model_config = {"frozen": True, "extra": "forbid"}

    name: str
    entity_table: str
    entity_column: str
    time_column: str = "timestamp"
    time_format: Literal["iso", "epoch"] = "iso"
    target: Literal["classification", "regression"]
    num_classes: int = Field(default=1, ge=1)
    metric: MetricSpec
    rows_file: str | None = None

    @model_validator(mode="after")
    def check_classes(self) -> "TaskHeader":
        if self.target == "classification" and self.num_classes < 2:
            raise ValueError("classification tasks need num_classes >= 2")
        if self.target == "regression" and self.num_classes != 1:
            raise ValueError("regression tasks have num_classes == 1")
        return self


@dataclass(frozen=True)
class TaskTable:
    """Header plus rows.

    `rows` has columns entity_id, entity (node index in the entity table),
    timestamp (epoch seconds), label and split.
    """

    header: TaskHeader
    rows: pd.DataFrame

    @property
    def name(self) -> str:
        return self.header.name

    @property
    def is_classification(self) -> bool:
        return self.header.target == "classification"

    @property
    def num_classes(self) -> int:
        return self.header.num_classes

    @property
    def metric(self) -> MetricSpec:
        return self.header.metric

    def split(self, name: str) -> pd.DataFrame:
        return self.rows[self.rows["split"] == name]

    @classmethod
    def create(cls, header: TaskHeader | dict, rows: pd.DataFrame, database: Database | None = None) -> "TaskTable":
        """Validate rows and resolve entity ids.

        Without a database, entity ids must be integers and are taken as node indices.
        """
        if isinstance(header, dict):
            try:
                header = TaskHeader.model_validate(header)
            except ValidationError as e:
                raise DataError(f"Invalid task descriptor: {e}") from e

        missing = [c for c in ("entity_id", "timestamp", "label", "split") if c not in rows.columns]
        if missing:
            raise DataError(f"Task rows are missing columns: {', '.join(missing)}")

        rows = rows.reset_index(drop=True)
        frame = pd.DataFrame({"entity_id": rows["entity_id"].astype(str).str.strip()})

        if database is not None:
            table = database.table(header.entity_table)
            frame["entity"] = table.rows_of(frame["entity_id"])
        else:
            entity = pd.to_numeric(frame["entity_id"], errors="coerce")
            frame["entity"] = entity.fillna(-1).astype(np.int64)

        unresolved = frame["entity"] < 0
        if unresolved.any():
            raise DataError(
                f"{int(unresolved.sum())} task rows reference unknown entities, e.g. {frame['entity_id'][unresolved].iloc[0]!r}"
            )

        timestamps = rows["timestamp"]
        if pd.api.types.is_numeric_dtype(timestamps):
            frame["timestamp"] = timestamps.astype(np.float64)
        else:
            frame["timestamp"] = parse_timestamps(timestamps.astype(str), header.time_format)
        if frame["timestamp"].isna().any():
            raise DataError("Task rows contain null timestamps")

        labels = pd.to_numeric(rows["label"], errors="coerce")
        if labels.isna().any():
            raise DataError("Task rows contain null or non-numeric labels")
        if header.target == "classification":
            if not np.all(np.equal(np.mod(labels, 1), 0)):
                raise DataError("Classification labels must be class indices")
            if labels.min() < 0 or labels.max() >= header.num_classes:
                raise DataError(f"Class indices must lie in [0, {header.num_classes})")
        frame["label"] = labels.astype(np.float64)

        split = rows["split"].astype(str).str.strip().str.lower()
        unknown = sorted(set(split) - set(SPLITS))
        if unknown:
            raise DataError(f"Unknown split tags: {', '.join(unknown)}")
        frame["split"] = split

        for required in ("train", "val"):
            if not (frame["split"] == required).any():
                raise DataError(f"Task {header.name!r} has an empty {required} split")

        frame = frame.sort_values(["entity", "timestamp"], kind="mergesort").reset_index(drop=True)
        return cls(header=header, rows=frame)


@dataclass(frozen=True)
class EntityLabelSummary:
    """Per-entity mean label vectors over train rows up to a cutoff."""

    entities: np.ndarray
    means: np.ndarray
    counts: np.ndarray
    classification: bool
    cutoff: float

    @property
    def num_classes(self) -> int:
        return self.means.shape[1]

    def __len__(self) -> int:
        return len(self.entities)

    def dense(self, n_nodes: int) -> tuple[np.ndarray, np.ndarray]:
        """(labeled mask, label matrix) indexed by node; unlabeled rows are zero."""
        mask = np.zeros(n_nodes, dtype=bool)
        matrix = np.zeros((n_nodes, self.num_classes), dtype=np.float64)
        if len(self.entities):
            mask[self.entities] = True
            matrix[self.entities] = self.means
        return mask, matrix

    def as_dict(self) -> dict:
        return {int(e): m.tolist() for e, m in zip(self.entities, self.means)}

    @classmethod
    def from_means(cls, means, *, classification: bool = True, entities=None) -> "EntityLabelSummary":
        """Summary from explicit per-entity label vectors (fixtures)."""
        means = np.asarray(means, dtype=np.float64)
        if means.ndim == 1:
            means = means[:, None]
        entities = np.arange(len(means)) if entities is None else np.asarray(entities, dtype=np.int64)
        return cls(entities, means, np.ones(len(means), dtype=np.int64), classification, float("inf"))


def aggregate_labels(task: TaskTable, cutoff: float | None = None) -> EntityLabelSummary:
    """Mean one-hot (classification) or scalar (regression) label per entity.

    Only train rows with timestamp <= cutoff contribute; cutoff defaults to the
    latest train timestamp.
    """
    train = task.split("train")
    if cutoff is None:
        cutoff = float(train["timestamp"].max())

    rows = train[train["timestamp"] <= cutoff]
    C = task.num_classes

    if rows.empty:
        return EntityLabelSummary(
            np.zeros(0, dtype=np.int64), np.zeros((0, C)), np.zeros(0, dtype=np.int64), task.is_classification, cutoff
        )

    if task.is_classification:
        values = np.eye(C)[rows["label"].to_numpy(dtype=np.int64)]
    else:
        values = rows["label"].to_numpy(dtype=np.float64)[:, None]

    frame = pd.DataFrame(values, columns=range(values.shape[1]))
    frame["entity"] = rows["entity"].to_numpy()
    grouped = frame.groupby("entity", sort=True)
    means = grouped.mean()
    counts = grouped.size()

    logger.debug("Aggregated %d train rows into %d entities at cutoff %s", len(rows), len(means), cutoff)
    return EntityLabelSummary(
        entities=means.index.to_numpy(dtype=np.int64),
        means=means.to_numpy(dtype=np.float64),
        counts=counts.to_numpy(dtype=np.int64),
        classification=task.is_classification,
        cutoff=cutoff,
    )


def task_stats(task: TaskTable) -> dict:
    """Row and distinct-entity counts per split."""
    stats = {}
    for split in SPLITS:
        rows = task.split(split)
        stats[f"{split}_rows"] = int(len(rows))
        stats[f"{split}_entities"] = int(rows["entity"].nunique())
    return stats


def load_task(path: Path | str, database: Database | None = None) -> TaskTable:
    """Load `task.json` and its `rows_file` (resolved relative to the descriptor)."""
    path = Path(path)
    if not path.is_file():
        raise DataError(f"Task file {path} does not exist")

    try:
        with path.open("r", encoding="utf-8") as f:
            data = json.load(f)
        header = TaskHeader.model_validate(data)
    except (json.JSONDecodeError, ValidationError) as e:
        raise DataError(f"Invalid task descriptor {path}: {e}") from e

    if not header.rows_file:
        raise DataError(f"Task descriptor {path} has no rows_file")

    rows_path = path.parent / header.rows_file
    if not rows_path.is_file():
        raise DataError(f"Task rows file {rows_path} does not exist")

    rows = pd.read_csv(rows_path, dtype=str, keep_default_na=False, encoding="utf-8")
    if header.time_format == "epoch" and "timestamp" in rows.columns:
        rows["timestamp"] = pd.to_numeric(rows["timestamp"], errors="coerce")

    task = TaskTable.create(header, rows, database)
    logger.debug("Loaded task %s with %d rows", header.name, len(task.rows))
    return task
