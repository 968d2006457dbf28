"""End-to-end task profiling: database and task files in, task embedding out."""

import logging
from dataclasses import dataclass, field
from pathlib import Path

from .errors import RelatronError
from .homophily import HomophilyProfile, profile
from .logs import log_context
from .rdb import (
    Database,
    TaskTable,
    aggregate_labels,
    augment_fk_pairs,
    build_graph,
    load_database,
    load_schema,
    load_task,
    task_stats,
)
from .router.embedding import TaskEmbedding, assemble_embedding
from .router.heuristics import entity_heuristics
from .router.registry import FeatureRegistry
from .router.temporal import temporal_autocorr
from .router.walks import WalkFeatures, walk_features
from .settings import RelatronConfig
from .sketch import AffinityScores, affinity_scores

__all__ = "TEMPORAL_LAGS", "ProfileRun", "load_inputs", "profile_task"

logger = logging.getLogger(__name__)

TEMPORAL_LAGS = (1, 2)


@dataclass
class ProfileRun:
    """Everything computed for one task; `embedding` is the routed artifact."""

    task: TaskTable
    embedding: TaskEmbedding
    profile: HomophilyProfile | None
    walks: WalkFeatures | None
    stats: dict
    affinity: AffinityScores | None = None
    diagnostics: dict = field(default_factory=dict)

    def report(self) -> dict:
        return {
            "task": self.task.name,
            "embedding": self.embedding.as_dict(),
            "homophily": self.profile.as_dict() if self.profile else None,
            "walks": self.walks.as_dict() if self.walks else None,
            "stats": self.stats,
            "affinity": self.affinity.as_dict() if self.affinity else None,
            "diagnostics": self.diagnostics,
        }


def load_inputs(
    schema_path: Path | str, task_path: Path | str, data_dir: Path | str | None = None
) -> tuple[Database, TaskTable]:
    """Schema, tables (next to the schema unless `data_dir` is given) and task."""
    schema_path = Path(schema_path)
    schema = load_schema(schema_path)
    db = load_database(schema, data_dir or schema_path.parent)
    return db, load_task(task_path, db)


def profile_task(
    db: Database,
    task: TaskTable,
    config: RelatronConfig | None = None,
    *,
    probes: bool = False,
    heuristics: bool = False,
    budget: float | None = None,
    external: dict[str, float] | None = None,
) -> ProfileRun:
    """Homophily, temporal, walk and size features, plus probes and heuristics on request.

    A feature group that cannot be computed is left missing in the embedding and
    its reason recorded in the diagnostics.
    """
    config = config or RelatronConfig()
    diagnostics: dict = {}

    with log_context(task=task.name):
        graph = augment_fk_pairs(build_graph(db), db)
        summary = aggregate_labels(task)

        homophily = None
        try:
            homophily = profile(graph, task, summary, multi_hop=config.multi_hop, threads=config.threads)
        except RelatronError as e:
            logger.warning("No homophily profile: %s", e)
            diagnostics["homophily"] = f"{type(e).__name__}: {e}"

        temporal = {lag: temporal_autocorr(task, lag) for lag in TEMPORAL_LAGS}

        walks = None
        try:
            walks = walk_features(
                graph,
                task,
                summary,
                walks=config.walks.walks,
                length=config.walks.length,
                max_seeds=config.walks.max_seeds,
                seed=config.seed,
                threads=config.threads,
            )
        except RelatronError as e:
            logger.warning("No walk features: %s", e)
            diagnostics["walks"] = f"{type(e).__name__}: {e}"

        stats = task_stats(task)

        affinity = None
        if probes:
            affinity = affinity_scores(
                graph,
                task,
                db,
                width=config.sketch.width,
                seed=config.seed,
                lam=config.ridge_lambda,
                slots=config.category_slots,
                external=external,
                threads=config.threads,
            )
            if affinity.missing:
                diagnostics["probes"] = affinity.missing

        heuristic_values = None
        if heuristics:
            heuristic_values, failures = entity_heuristics(task)
            if failures:
                diagnostics["heuristics"] = failures

        registry = FeatureRegistry.default(probes=probes, heuristics=heuristics)
        embedding = assemble_embedding(
            task.name,
            registry,
            profile=homophily,
            temporal=temporal,
            walks=walks,
            stats=stats,
            probes=affinity.scores if affinity else None,
            heuristics=heuristic_values,
            budget=budget,
        )
        if embedding.imputed:
            diagnostics["imputed"] = list(embedding.imputed)
            logger.info("%d of %d features missing", len(embedding.imputed), len(embedding.names))

    return ProfileRun(task, embedding, homophily, walks, stats, affinity, diagnostics)
