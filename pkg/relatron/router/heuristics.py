"""Group-by-entity predictors scored with the task metric."""

import logging

import numpy as np
import pandas as pd

from ..errors import RelatronError
from ..rdb.scoring import score_metric
from ..rdb.task import TaskTable

__all__ = "entity_heuristics", "entity_mean_heuristic"

logger = logging.getLogger(__name__)


def _targets(task: TaskTable, rows: pd.DataFrame) -> pd.DataFrame:
    """Label columns the statistics run over: the label itself, or one-hot for >2 classes."""
    labels = rows["label"].to_numpy()
    if task.is_classification and task.num_classes > 2:
        frame = pd.DataFrame(np.eye(task.num_classes)[labels.astype(np.int64)], index=rows.index)
    else:
        frame = pd.DataFrame({0: labels.astype(np.float64)}, index=rows.index)
    frame["entity"] = rows["entity"].to_numpy()
    return frame


def _predict(task: TaskTable, table: pd.DataFrame, rows: pd.DataFrame) -> np.ndarray:
    """Per-row prediction from an entity-indexed statistic table; unseen entities get 0."""
    pred = table.reindex(rows["entity"].to_numpy()).fillna(0).to_numpy(dtype=np.float64)
    if not task.is_classification:
        return pred[:, 0]
    if task.num_classes == 2:
        p = pred[:, 0]
        return np.column_stack([1 - p, p])
    return pred


def entity_heuristics(task: TaskTable) -> tuple[dict[str, float | None], dict[str, str]]:
    """entity_{mean,median}_{val,train}: train statistics per entity scored on val or train rows."""
    train = task.split("train")
    targets = _targets(task, train).groupby("entity", sort=True)
    stats = {"mean": targets.mean(), "median": targets.median()}

    values: dict[str, float | None] = {}
    failures: dict[str, str] = {}
    for stat, table in stats.items():
        for split in ("val", "train"):
            name = f"entity_{stat}_{split}"
            rows = task.split(split)
            try:
                values[name] = score_metric(task.metric, rows["label"].to_numpy(), _predict(task, table, rows))
            except RelatronError as e:
                values[name] = None
                failures[name] = str(e)
                logger.debug("%s missing for %s: %s", name, task.name, e)
    return values, failures


def entity_mean_heuristic(task: TaskTable) -> float | None:
    return entity_heuristics(task)[0]["entity_mean_val"]
