"""Lagged label autocorrelation over the train split."""

import logging

import numpy as np

from ..rdb.task import TaskTable

__all__ = ("temporal_autocorr",)

logger = logging.getLogger(__name__)


def temporal_autocorr(task: TaskTable, lag: int) -> float | None:
    """Pearson correlation of (label_t, label_{t-lag}) pairs pooled over entities.

    Each entity's train rows are taken in timestamp order; classification labels
    enter as class indices. None when fewer than two pairs exist or either side
    has zero variance.
    """
    if lag < 1:
        raise ValueError(f"lag must be positive, got {lag}")

    train = task.split("train").sort_values(["entity", "timestamp"], kind="mergesort")
    current, previous = [], []
    for _, labels in train.groupby("entity", sort=True)["label"]:
        values = labels.to_numpy(dtype=np.float64)
        if len(values) > lag:
            current.append(values[lag:])
            previous.append(values[:-lag])

    if not current:
        return None
    x, y = np.concatenate(current), np.concatenate(previous)
    if len(x) < 2 or x.std() == 0 or y.std() == 0:
        logger.debug("lag%d autocorrelation undefined on %d pairs", lag, len(x))
        return None
    return float(np.corrcoef(x, y)[0, 1])
