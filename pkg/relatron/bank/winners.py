"""Per-task winning family."""

import logging
from dataclasses import dataclass
from typing import Literal

from ..errors import IncompleteTask
from .records import Bank, BankRecord

__all__ = "Winner", "representative", "winner", "winners"

logger = logging.getLogger(__name__)

MARGIN_FLOOR = 1e-12


@dataclass(frozen=True)
class Winner:
    """Outcome of the RDL vs DFS comparison on one task.

    `gap` is the raw RDL - DFS test score difference. `margin` is the
    direction-aware relative gap, positive when RDL is better.
    """

    task: str
    family: Literal["rdl", "dfs"]
    margin: float
    gap: float
    by: str
    rdl: BankRecord
    dfs: BankRecord

    def as_dict(self) -> dict:
        return {
            "task": self.task,
            "family": self.family,
            "margin": self.margin,
            "gap": self.gap,
            "by": self.by,
            "rdl_test": self.rdl.test_score,
            "dfs_test": self.dfs.test_score,
            "rdl_config": self.rdl.config,
            "dfs_config": self.dfs.config,
        }


def _within_budget(records: list[BankRecord], budget: int | None) -> list[BankRecord]:
    if budget is None:
        return records

    def order(pair):
        index, record = pair
        return (record.trial if record.trial is not None else index, index)

    ordered = sorted(enumerate(records), key=order)
    return [record for _, record in ordered[:budget]]


def representative(records: list[BankRecord], by: Literal["val", "test"]) -> BankRecord:
    """Best record by `by`; the first in file order wins ties."""
    best = records[0]
    for record in records[1:]:
        if record.oriented(by) > best.oriented(by):
            best = record
    return best


def winner(bank: Bank, task: str, by: Literal["val", "test"] = "val", *, budget: int | None = None) -> Winner:
    """Compare the families' representatives on test score.

    Representatives are chosen by `by`. With a budget, each family only sees its
    first `budget` trials (by trial index, else file order). Exact ties go to DFS.

    Raises:
        IncompleteTask: when a family has no records for the task.
    """
    picks = {}
    for family in ("rdl", "dfs"):
        records = _within_budget(bank.for_task(task, family), budget)
        if not records:
            raise IncompleteTask(f"Task {task!r} has no {family} records")
        picks[family] = representative(records, by)

    rdl, dfs = picks["rdl"], picks["dfs"]
    advantage = rdl.oriented("test") - dfs.oriented("test")
    margin = advantage / max(abs(dfs.test_score), MARGIN_FLOOR)
    family = "rdl" if advantage > 0 else "dfs"
    return Winner(task, family, margin, rdl.test_score - dfs.test_score, by, rdl, dfs)


def winners(
    bank: Bank, by: Literal["val", "test"] = "val", *, budget: int | None = None
) -> tuple[dict[str, Winner], dict[str, str]]:
    """Winner per task; incomplete tasks are skipped and reported."""
    found, skipped = {}, {}
    for task in bank.tasks():
        try:
            found[task] = winner(bank, task, by, budget=budget)
        except IncompleteTask as e:
            skipped[task] = str(e)
            logger.debug("Skipping %s: %s", task, e)
    return found, skipped
