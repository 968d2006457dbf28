"""Training-free affinity probes.

Each probe maps the task's entities to frozen features, fits a closed-form head
on train rows and scores the val rows with the task metric.
"""

import logging
from collections.abc import Callable
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import DataError, RelatronError
from ..logs import adapt_logger, log_context
from ..rdb.database import Database
from ..rdb.graph import RelGraph
from ..rdb.scoring import score_metric
from ..rdb.task import TaskTable
from ..util.io import read_json
from .config import SketchConfig
from .dense import dense_sketch
from .features import DEFAULT_SLOTS, encode_database
from .heads import fit_head, standardize
from .hasher import propagate, random_mp_hasher
from .tokens import SketchGraph

__all__ = "AffinityScores", "affinity_scores", "load_external_affinity", "probe_names"

logger = logging.getLogger(__name__)

SKETCH_HORIZONS = (1, 2, 3)
HASHER_LAYERS = (1, 2, 3)
FEATURE_HOPS = (1, 2)


def probe_names() -> list[str]:
    return (
        [f"rfr_randomnbfnet_{t}" for t in SKETCH_HORIZONS]
        + [f"rfr_randomsage_{n}" for n in HASHER_LAYERS]
        + [f"feat_affinity_{h}hop" for h in FEATURE_HOPS]
    )


@dataclass
class AffinityScores:
    """Probe name -> validation score; failed probes are None with the reason in `missing`."""

    scores: dict[str, float | None]
    missing: dict[str, str] = field(default_factory=dict)
    external: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {"scores": self.scores, "missing": self.missing, "external": self.external}


def load_external_affinity(path: Path | str) -> dict[str, float]:
    """Read externally computed probe scores, a JSON object of name -> number."""
    data = read_json(path)
    if not isinstance(data, dict):
        raise DataError(f"External affinity file {path} must hold a JSON object")
    scores = {}
    for name, value in data.items():
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise DataError(f"External affinity {name!r} in {path} is not a number")
        scores[str(name)] = float(value)
    return scores


def _head_kind(task: TaskTable) -> str:
    return "lda" if task.is_classification and task.num_classes == 2 else "ridge"


def _targets(task: TaskTable, labels: np.ndarray) -> np.ndarray:
    if task.is_classification and task.num_classes > 2:
        return np.eye(task.num_classes)[labels.astype(np.int64)]
    return labels


def evaluate_probe(task: TaskTable, node_features: np.ndarray, *, lam: float = 1.0) -> float:
    """Fit a head on train rows' entity features and score the val rows."""
    train, val = task.split("train"), task.split("val")
    x_train = node_features[train["entity"].to_numpy()]
    x_val = node_features[val["entity"].to_numpy()]
    x_train, x_val = standardize(x_train, x_val)

    kind = _head_kind(task)
    head = fit_head(x_train, _targets(task, train["label"].to_numpy()), kind, lam=lam)
    if task.is_classification:
        pred = head.class_scores(x_val)
    else:
        pred = head.decision(x_val)
    return score_metric(task.metric, val["label"].to_numpy(), pred)


def affinity_scores(
    graph: RelGraph,
    task: TaskTable,
    db: Database | None = None,
    *,
    width: int = 64,
    seed: int = 0,
    lam: float = 1.0,
    slots: int = DEFAULT_SLOTS,
    external: dict[str, float] | None = None,
    threads: int | None = 1,
) -> AffinityScores:
    """Path, neighborhood and feature affinity of a task.

    Without a database every table has zero-width features; the hasher still
    sees a constant column, so its probes stay structural.

    Raises:
        DataError: when the train or val split is empty.
    """
    for split in ("train", "val"):
        if task.split(split).empty:
            raise DataError(f"Affinity probes need a non-empty {split} split")

    entity = task.header.entity_table
    graph.check_type(entity)
    log = adapt_logger(logger, {"task": task.name})

    if db is not None:
        features = encode_database(db, slots=slots)
    else:
        features = {t: np.zeros((n, 0)) for t, n in graph.node_counts.items()}
    with_bias = {t: np.hstack([np.ones((len(x), 1)), x]) for t, x in features.items()}

    sg = SketchGraph(graph)
    sources = [(entity, i) for i in range(graph.node_counts[entity])]

    probes: dict[str, Callable[[], np.ndarray]] = {}
    for horizon in SKETCH_HORIZONS:
        config = SketchConfig(width=width, horizon=horizon, mode="dense", seed=seed)
        probes[f"rfr_randomnbfnet_{horizon}"] = lambda c=config: dense_sketch(sg, c, sources, threads=threads).matrix
    for layers in HASHER_LAYERS:
        probes[f"rfr_randomsage_{layers}"] = lambda n=layers: random_mp_hasher(graph, with_bias, n, width, seed)[entity]

    hop = features
    for hops in FEATURE_HOPS:
        hop = propagate(graph, hop)
        probes[f"feat_affinity_{hops}hop"] = lambda h=hop: h[entity]

    external = external or {}
    scores: dict[str, float | None] = {}
    missing: dict[str, str] = {}
    for name, build in probes.items():
        if name in external:
            scores[name] = external[name]
            continue
        try:
            with log_context(task=task.name, probe=name):
                value = evaluate_probe(task, build(), lam=lam)
        except RelatronError as e:
            log.warning("Probe %s failed: %s", name, e, extra={"probe": name})
            scores[name], missing[name] = None, f"{type(e).__name__}: {e}"
            continue
        if not np.isfinite(value):
            scores[name], missing[name] = None, "undefined metric on the val split"
            continue
        scores[name] = value
        log.debug("Probe %s scored %.4f", name, value)

    return AffinityScores(scores, missing, sorted(set(external) & set(probes)))
