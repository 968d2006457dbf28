"""Correlating task features with the RDL vs DFS gap."""

import logging
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.stats import spearmanr

from ..bank.records import Bank
from ..bank.winners import winner
from ..errors import IncompleteTask, RoutingError, TooFewTasks
from .embedding import TaskEmbedding

__all__ = "GapCorrelation", "gap_correlation"

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GapCorrelation:
    feature: str
    rho: float
    p_value: float
    tasks: list[str]
    values: list[float]
    gaps: list[float]

    def as_dict(self) -> dict:
        return {
            "feature": self.feature,
            "spearman_rho": self.rho,
            "p_value": self.p_value,
            "n": len(self.tasks),
            "tasks": self.tasks,
            "values": self.values,
            "gaps": self.gaps,
        }


def gap_correlation(
    bank: Bank, embeddings: list[TaskEmbedding], feature: str, *, by: Literal["val", "test"] = "val"
) -> GapCorrelation:
    """Spearman correlation of a raw embedding feature with the signed RDL - DFS test gap.

    Representatives are chosen by `by`; tasks lacking the feature or a family drop out.
    """
    tasks, values, gaps = [], [], []
    for embedding in embeddings:
        if feature not in embedding.names:
            raise RoutingError(f"Embedding of {embedding.task!r} has no feature {feature!r}")
        value = embedding.get(feature)
        if not np.isfinite(value):
            continue
        try:
            result = winner(bank, embedding.task, by)
        except IncompleteTask:
            continue
        tasks.append(embedding.task)
        values.append(value)
        gaps.append(result.gap)

    if len(tasks) < 3:
        raise TooFewTasks(f"Gap correlation needs at least 3 tasks with {feature!r}, got {len(tasks)}")
    rho, p_value = spearmanr(values, gaps)
    logger.debug("Spearman rho(%s, gap) = %.3f over %d tasks", feature, rho, len(tasks))
    return GapCorrelation(feature, float(rho), float(p_value), tasks, values, gaps)
