"""Ground-truth task similarity from shared-configuration rankings."""

import itertools
import logging
from collections import defaultdict
from collections.abc import Iterable
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.stats import kendalltau

from ..errors import BankError, DegenerateRanking
from ..util.io import FORMAT_VERSION, check_format_version, read_json, write_json
from ..util.pool import parallel_map
from .records import Bank, config_signature

__all__ = "SimilarityMatrix", "kendall_tau", "graphgym_similarity", "load_similarity"

logger = logging.getLogger(__name__)

MIN_SHARED = 2


def kendall_tau(x, y) -> float:
    """Tie-corrected Kendall tau-b.

    Raises:
        DegenerateRanking: when either vector is entirely tied.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise BankError(f"Rankings must be 1-D with equal lengths, got {x.shape} and {y.shape}")
    if len(x) < 2:
        raise BankError("Rankings need at least 2 entries")
    if np.all(x == x[0]) or np.all(y == y[0]):
        raise DegenerateRanking("Kendall tau is undefined for an all-tied ranking")
    return float(kendalltau(x, y, variant="b")[0])


@dataclass
class SimilarityMatrix:
    """Symmetric task-by-task similarities; NaN marks a missing pair."""

    tasks: list[str]
    values: np.ndarray
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        np.fill_diagonal(self.values, 1.0)

    def index(self, task: str) -> int:
        return self.tasks.index(task)

    def get(self, a: str, b: str) -> float:
        return float(self.values[self.index(a), self.index(b)])

    def subset(self, tasks: Iterable[str]) -> "SimilarityMatrix":
        tasks = list(tasks)
        idx = [self.index(t) for t in tasks]
        return SimilarityMatrix(tasks, self.values[np.ix_(idx, idx)].copy())

    def as_dict(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "tasks": self.tasks,
            "matrix": [[None if np.isnan(v) else float(v) for v in row] for row in self.values],
            "diagnostics": self.diagnostics,
        }

    def save(self, path: Path | str | None) -> None:
        write_json(path, self.as_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "SimilarityMatrix":
        check_format_version(data)
        tasks = [str(t) for t in data["tasks"]]
        values = np.array([[np.nan if v is None else float(v) for v in row] for row in data["matrix"]])
        if values.shape != (len(tasks), len(tasks)):
            raise BankError(f"Similarity matrix shape {values.shape} does not match {len(tasks)} tasks")
        if not np.allclose(values, values.T, equal_nan=True, rtol=0, atol=1e-12):
            raise BankError("Similarity matrix is not symmetric")
        return cls(tasks, values, data.get("diagnostics", {}))


def load_similarity(path: Path | str) -> SimilarityMatrix:
    return SimilarityMatrix.from_dict(read_json(path))


def _signature_scores(bank: Bank, task: str, exclusions) -> dict[str, float]:
    """Direction-aware test score per config signature (mean over repeats)."""
    grouped: dict[str, list[float]] = defaultdict(list)
    for record in bank.for_task(task):
        grouped[config_signature(record.config, exclusions)].append(record.oriented("test"))
    return {sig: float(np.mean(scores)) for sig, scores in grouped.items()}


def graphgym_similarity(
    bank: Bank, *, exclusions: Iterable[str] = ("seed",), min_shared: int = MIN_SHARED, threads: int | None = 1
) -> SimilarityMatrix:
    """Kendall tau between two tasks' rankings of their shared configurations.

    Pairs sharing fewer than `min_shared` signatures, or with an all-tied
    ranking, stay missing and are listed in diagnostics.
    """
    exclusions = tuple(exclusions)
    tasks = bank.tasks()
    scores = {task: _signature_scores(bank, task, exclusions) for task in tasks}
    pairs = list(itertools.combinations(range(len(tasks)), 2))

    def compare(pair: tuple[int, int]) -> float | str:
        a, b = tasks[pair[0]], tasks[pair[1]]
        shared = sorted(set(scores[a]) & set(scores[b]))
        if len(shared) < min_shared:
            return f"{len(shared)} shared configurations"
        try:
            return kendall_tau([scores[a][s] for s in shared], [scores[b][s] for s in shared])
        except DegenerateRanking as e:
            return str(e)

    values = np.full((len(tasks), len(tasks)), np.nan)
    missing = {}
    for (i, j), result in zip(pairs, parallel_map(compare, pairs, threads)):
        if isinstance(result, str):
            missing[f"{tasks[i]}|{tasks[j]}"] = result
            continue
        values[i, j] = values[j, i] = result

    if missing:
        logger.warning("%d of %d task pairs have no similarity", len(missing), len(pairs))
    return SimilarityMatrix(tasks, values, {"missing": missing, "exclusions": list(exclusions)})
