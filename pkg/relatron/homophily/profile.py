"""Per-metapath homophily suite and aggregate profile statistics."""

import logging
from dataclasses import dataclass, field

import numpy as np

from ..errors import EmptyProfile, RelatronError
from ..logs import adapt_logger, log_context
from ..rdb.graph import RelGraph
from ..rdb.metapath import Metapath, ProjectedEdges, enumerate_metapaths, project_metapath
from ..rdb.task import EntityLabelSummary, TaskTable
from ..util.pool import parallel_map
from .kernel import LabelKernel
from .metrics import (
    adjusted_homophily,
    aggregation_homophily,
    class_insensitive_homophily,
    class_prior,
    edge_homophily,
    labeled_edges,
    weighted_edge_homophily,
)

__all__ = "METRICS", "AggregateStats", "MetapathMetrics", "HomophilyProfile", "aggregate_stats", "profile"

logger = logging.getLogger(__name__)

METRICS = ("h_edge", "h_edge_weighted", "h_adj", "h_ins", "h_agg")

MODE_BINS = 10


@dataclass(frozen=True)
class AggregateStats:
    mean: float
    std: float
    min: float
    max: float
    mode: float
    weighted_mean: float

    def as_dict(self) -> dict:
        return {
            "mean": self.mean,
            "std": self.std,
            "min": self.min,
            "max": self.max,
            "mode": self.mode,
            "weighted_mean": self.weighted_mean,
        }


def aggregate_stats(values, weights) -> AggregateStats:
    """Summary statistics over per-metapath values.

    `mode` is the midpoint of the densest of ten equal-width bins over [min, max]
    (first bin wins ties); `weighted_mean` weights by edge counts.
    """
    values = np.asarray(values, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    lo, hi = float(values.min()), float(values.max())

    if hi > lo:
        counts, edges = np.histogram(values, bins=MODE_BINS, range=(lo, hi))
        densest = int(np.argmax(counts))
        mode = float((edges[densest] + edges[densest + 1]) / 2)
    else:
        mode = lo

    weighted = float(np.average(values, weights=weights)) if weights.sum() > 0 else float(values.mean())
    return AggregateStats(
        mean=float(values.mean()),
        std=float(values.std()),
        min=lo,
        max=hi,
        mode=mode,
        weighted_mean=weighted,
    )


@dataclass(frozen=True)
class MetapathMetrics:
    metapath: str
    name: str
    n_edges: int
    skipped_edges: int
    h_edge: float
    h_edge_weighted: float
    h_adj: float | None
    h_ins: float | None
    h_agg: float | None

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "n_edges": self.n_edges,
            "skipped_edges": self.skipped_edges,
            "h_edge": self.h_edge,
            "h_edge_weighted": self.h_edge_weighted,
            "h_adj": self.h_adj,
            "h_ins": self.h_ins,
            "h_agg": self.h_agg,
        }


@dataclass
class HomophilyProfile:
    """Per-metapath metrics, aggregates per metric family and diagnostics."""

    task: str
    classification: bool
    metapaths: dict[str, MetapathMetrics]
    aggregates: dict[str, AggregateStats]
    diagnostics: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "task": self.task,
            "classification": self.classification,
            "metapaths": {key: m.as_dict() for key, m in self.metapaths.items()},
            "aggregates": {key: a.as_dict() for key, a in self.aggregates.items()},
            "diagnostics": self.diagnostics,
        }


def _optional(func, *args, failures: dict, key: str):
    try:
        return func(*args)
    except RelatronError as e:
        failures[key] = str(e)
        return None


def metapath_metrics(
    metapath: Metapath, edges: ProjectedEdges, summary: EntityLabelSummary, kernel: LabelKernel, prior: np.ndarray
) -> tuple[MetapathMetrics, dict]:
    """Full suite on one metapath; H_edge failures propagate, other metrics degrade to None."""
    view = labeled_edges(edges, summary)
    h_edge = edge_homophily(edges, summary, kernel)
    failures: dict[str, str] = {}

    h_adj = None
    if summary.classification:
        h_adj = _optional(adjusted_homophily, edges, summary, failures=failures, key="h_adj")

    metrics = MetapathMetrics(
        metapath=metapath.id,
        name=metapath.name,
        n_edges=view.n_edges,
        skipped_edges=view.skipped,
        h_edge=h_edge,
        h_edge_weighted=weighted_edge_homophily(edges, summary, kernel),
        h_adj=h_adj,
        h_ins=_optional(class_insensitive_homophily, edges, summary, prior, kernel, failures=failures, key="h_ins"),
        h_agg=_optional(aggregation_homophily, edges, summary, kernel, failures=failures, key="h_agg"),
    )
    return metrics, failures


def profile(
    graph: RelGraph,
    task: TaskTable,
    summary: EntityLabelSummary,
    *,
    metapaths: list[Metapath] | None = None,
    multi_hop: bool = False,
    threads: int | None = 1,
) -> HomophilyProfile:
    """Homophily suite over every self-looped metapath of the task's entity type.

    Metapaths whose H_edge is undefined are excluded and listed in diagnostics.

    Raises:
        EmptyProfile: when no metapath yields a value.
    """
    log = adapt_logger(logger, {"task": task.name})
    if metapaths is None:
        metapaths = enumerate_metapaths(graph, task.header.entity_table, multi_hop=multi_hop)

    kernel = LabelKernel.for_summary(summary)
    prior = class_prior(summary)

    def run(metapath: Metapath):
        with log_context(task=task.name, metapath=metapath.name):
            edges = project_metapath(graph, metapath)
            try:
                return metapath_metrics(metapath, edges, summary, kernel, prior)
            except RelatronError as e:
                return e

    results = parallel_map(run, metapaths, threads)

    per_metapath: dict[str, MetapathMetrics] = {}
    excluded: dict[str, str] = {}
    partial: dict[str, dict] = {}
    for metapath, result in zip(metapaths, results):
        if isinstance(result, Exception):
            excluded[metapath.name] = f"{type(result).__name__}: {result}"
            log.debug("Excluded metapath %s: %s", metapath.name, result)
            continue
        metrics, failures = result
        per_metapath[metapath.name] = metrics
        if failures:
            partial[metapath.name] = failures

    if not per_metapath:
        raise EmptyProfile(f"No usable metapath for task {task.name!r} ({len(metapaths)} enumerated)")

    aggregates = {}
    for metric in METRICS:
        pairs = [(getattr(m, metric), m.n_edges) for m in per_metapath.values() if getattr(m, metric) is not None]
        if pairs:
            values, weights = zip(*pairs)
            aggregates[metric] = aggregate_stats(values, weights)

    skipped = {name: m.skipped_edges for name, m in per_metapath.items() if m.skipped_edges}
    if excluded:
        log.warning("%d of %d metapaths excluded from the profile", len(excluded), len(metapaths))

    diagnostics = {
        "enumerated": len(metapaths),
        "excluded": excluded,
        "partial": partial,
        "skipped_edges": skipped,
    }
    return HomophilyProfile(task.name, summary.classification, per_metapath, aggregates, diagnostics)
