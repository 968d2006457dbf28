"""Random-walk label statistics around train entities.

Walks run over the whole typed graph. A visited entity counts when it is labeled
and its first train row is strictly earlier than the seed's latest train row.
"""

import logging
from dataclasses import dataclass

import numpy as np

from ..homophily.metrics import class_prior
from ..rdb.graph import RelGraph
from ..rdb.task import EntityLabelSummary, TaskTable
from ..sketch.tokens import SketchGraph
from ..util.pool import parallel_map

__all__ = "WalkFeatures", "walk_features", "seed_classes"

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class WalkFeatures:
    mean_same_class_ratio_ignore: float | None
    adjusted_mean_same_class_ratio: float | None
    sparsity_ratio: float
    mean_past_task_nodes: float
    seeds: int

    def as_dict(self) -> dict:
        return {
            "mean_same_class_ratio_ignore": self.mean_same_class_ratio_ignore,
            "adjusted_mean_same_class_ratio": self.adjusted_mean_same_class_ratio,
            "sparsity_ratio": self.sparsity_ratio,
            "mean_past_task_nodes": self.mean_past_task_nodes,
        }


def seed_classes(summary: EntityLabelSummary, task: TaskTable) -> tuple[np.ndarray, np.ndarray]:
    """Hard class per labeled entity and the class prior.

    Classification uses the argmax of the mean label; regression splits at the
    median of the entity means.
    """
    if summary.classification:
        return np.argmax(summary.means, axis=1), class_prior(summary)
    means = summary.means[:, 0]
    classes = (means > np.median(means)).astype(np.int64)
    prior = np.bincount(classes, minlength=2) / len(classes)
    return classes, prior


def walk_features(
    graph: RelGraph,
    task: TaskTable,
    summary: EntityLabelSummary,
    *,
    walks: int = 20,
    length: int = 4,
    max_seeds: int = 2000,
    seed: int = 0,
    threads: int | None = 1,
) -> WalkFeatures:
    """Same-class ratio, sparsity and past-entity counts over uniform random walks.

    Each step follows an outgoing edge chosen uniformly (parallel edges counted).
    Ratios are None when no walk reaches a past labeled entity.
    """
    if walks < 1 or length < 1:
        raise ValueError("walks and length must be positive")

    entity_type = task.header.entity_table
    sg = SketchGraph(graph)
    adjacency = sg.global_adjacency()
    offset = sg.offsets[entity_type]

    train = task.split("train")
    grouped = train.groupby("entity", sort=True)["timestamp"]
    first_seen = grouped.min()
    last_seen = grouped.max()

    if len(summary) == 0:
        return WalkFeatures(None, None, 1.0, 0.0, 0)

    classes, prior = seed_classes(summary, task)
    label_of = np.full(sg.n_nodes, -1, dtype=np.int64)
    first_of = np.full(sg.n_nodes, np.inf)
    nodes = summary.entities + offset
    label_of[nodes] = classes
    first_of[nodes] = first_seen.reindex(summary.entities).to_numpy(dtype=np.float64)

    order = np.arange(len(summary))
    if len(order) > max_seeds:
        order = np.sort(np.random.default_rng([seed, 0]).choice(len(order), max_seeds, replace=False))

    indptr, indices, weights = adjacency.indptr, adjacency.indices, adjacency.data

    def run(k: int):
        entity = int(summary.entities[k])
        start, label = entity + offset, int(classes[k])
        cutoff = float(last_seen[entity])
        rng = np.random.default_rng([seed, 1, entity])
        same = past = empty = 0
        for _ in range(walks):
            node, hits = start, 0
            for _ in range(length):
                lo, hi = indptr[node], indptr[node + 1]
                if lo == hi:
                    break
                cumulative = np.cumsum(weights[lo:hi])
                node = int(indices[lo + np.searchsorted(cumulative, rng.random() * cumulative[-1], side="right")])
                if node != start and label_of[node] >= 0 and first_of[node] < cutoff:
                    hits += 1
                    same += int(label_of[node] == label)
            past += hits
            empty += int(hits == 0)
        ratio = same / past if past else None
        return ratio, label, past, empty

    results = parallel_map(run, order.tolist(), threads)

    ratios = [(r, label) for r, label, _, _ in results if r is not None]
    total_past = sum(p for _, _, p, _ in results)
    total_empty = sum(e for _, _, _, e in results)
    n_walks = walks * len(results)

    if ratios:
        ratio = float(np.mean([r for r, _ in ratios]))
        adjusted = float(np.mean([r - prior[label] for r, label in ratios]))
    else:
        ratio = adjusted = None
        logger.debug("No walk of task %s reached a past labeled entity", task.name)

    return WalkFeatures(ratio, adjusted, total_empty / n_walks, total_past / n_walks, len(results))
