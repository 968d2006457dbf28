"""Task embeddings: assembly, shared normalization and JSON I/O."""

import logging
import math
from collections.abc import Iterable
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from sklearn.impute import SimpleImputer
from sklearn.pipeline import Pipeline, make_pipeline
from sklearn.preprocessing import StandardScaler

from ..errors import RoutingError
from ..homophily.profile import HomophilyProfile
from ..util.io import FORMAT_VERSION, check_format_version, read_json, write_json
from .registry import BUDGET_FEATURE, REGISTRY_VERSION, FeatureRegistry
from .walks import WalkFeatures

__all__ = (
    "TaskEmbedding",
    "Normalizer",
    "assemble_embedding",
    "homophily_features",
    "save_embeddings",
    "load_embeddings",
)

logger = logging.getLogger(__name__)

AGGREGATE_FEATURES = {
    "h_adjs_corr_mean": "mean",
    "h_adjs_corr_max": "max",
    "h_adjs_corr_min": "min",
    "h_adjs_corr_mode": "mode",
    "h_adjs_corr_weighted_mean": "weighted_mean",
}


@dataclass(frozen=True)
class TaskEmbedding:
    """Ordered feature values; NaN marks a missing feature listed in `imputed`."""

    task: str
    names: tuple[str, ...]
    values: np.ndarray
    imputed: tuple[str, ...] = ()
    registry_version: str = REGISTRY_VERSION

    def __post_init__(self):
        if len(self.names) != len(self.values):
            raise RoutingError(f"Embedding of {self.task!r} has {len(self.names)} names and {len(self.values)} values")

    def get(self, name: str) -> float:
        return float(self.values[self.names.index(name)])

    @property
    def budget(self) -> float | None:
        if BUDGET_FEATURE not in self.names:
            return None
        return self.get(BUDGET_FEATURE)

    def with_budget(self, budget: float) -> "TaskEmbedding":
        """Set or append the budget slot."""
        if BUDGET_FEATURE in self.names:
            values = self.values.copy()
            values[self.names.index(BUDGET_FEATURE)] = float(budget)
            return replace(self, values=values)
        return replace(self, names=(*self.names, BUDGET_FEATURE), values=np.append(self.values, float(budget)))

    def without_budget(self) -> "TaskEmbedding":
        if BUDGET_FEATURE not in self.names:
            return self
        keep = [k for k, n in enumerate(self.names) if n != BUDGET_FEATURE]
        return replace(self, names=tuple(self.names[k] for k in keep), values=self.values[keep])

    def as_dict(self) -> dict:
        return {
            "task": self.task,
            "registry_version": self.registry_version,
            "features": {n: (None if math.isnan(v) else float(v)) for n, v in zip(self.names, self.values)},
            "imputed": list(self.imputed),
            "format_version": FORMAT_VERSION,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TaskEmbedding":
        check_format_version(data, key="registry_version", supported=REGISTRY_VERSION)
        features = data.get("features")
        if not isinstance(features, dict):
            raise RoutingError("Embedding needs a 'features' object")
        names = _canonical_order(features)
        values = np.array([np.nan if features[n] is None else float(features[n]) for n in names])
        imputed = tuple(data.get("imputed") or (n for n in names if features[n] is None))
        return cls(str(data["task"]), names, values, imputed, str(data.get("registry_version", REGISTRY_VERSION)))


def _canonical_order(features: Iterable[str]) -> tuple[str, ...]:
    """Registry order for known names, then unknown names sorted.

    The order of features in the file is ignored.
    """
    order = {n: k for k, n in enumerate(FeatureRegistry.default(probes=True, heuristics=True, budget=True).names)}
    return tuple(sorted(features, key=lambda n: (order.get(n, len(order)), n)))


def homophily_features(profile: HomophilyProfile | None) -> dict[str, float | None]:
    """h_adjs_corr_* from the profile aggregates: H_adj for classification, H_edge otherwise."""
    if profile is None:
        return {}
    metric = "h_adj" if profile.classification else "h_edge"
    stats = profile.aggregates.get(metric)
    if stats is None:
        return {}
    return {name: getattr(stats, field_name) for name, field_name in AGGREGATE_FEATURES.items()}


def assemble_embedding(
    task: str,
    registry: FeatureRegistry | None = None,
    *,
    profile: HomophilyProfile | None = None,
    temporal: dict[int, float | None] | None = None,
    walks: WalkFeatures | None = None,
    stats: dict | None = None,
    probes: dict[str, float | None] | None = None,
    heuristics: dict[str, float | None] | None = None,
    budget: float | None = None,
) -> TaskEmbedding:
    """Order the profiler outputs by the registry; absent values stay NaN and are flagged.

    log_total_rows is ln(1 + train rows + val rows). The budget slot is appended
    only when a budget is given.
    """
    registry = (registry or FeatureRegistry()).base
    found: dict[str, float | None] = {}
    found.update(homophily_features(profile))
    for lag, value in (temporal or {}).items():
        found[f"lag{lag}_autocorr_corr"] = value
    if walks is not None:
        found.update(walks.as_dict())
    if stats is not None:
        found["log_total_rows"] = math.log1p(stats["train_rows"] + stats["val_rows"])
    found.update(probes or {})
    found.update(heuristics or {})

    values = np.array([np.nan if found.get(n) is None else float(found[n]) for n in registry.names])
    imputed = tuple(n for n, v in zip(registry.names, values) if not np.isfinite(v))
    values[~np.isfinite(values)] = np.nan
    if imputed:
        logger.debug("Embedding of %s is missing %s", task, ", ".join(imputed))

    embedding = TaskEmbedding(task, registry.names, values, imputed, registry.version)
    return embedding.with_budget(budget) if budget is not None else embedding


@dataclass
class Normalizer:
    """Mean imputation over present values, then z-scoring of the imputed columns (std 0 -> 1).

    Features missing on every task impute to 0.
    """

    names: tuple[str, ...]
    pipeline: Pipeline
    diagnostics: dict = field(default_factory=dict)

    @classmethod
    def fit(cls, embeddings: Iterable[TaskEmbedding]) -> "Normalizer":
        embeddings = list(embeddings)
        if not embeddings:
            raise RoutingError("Cannot normalize an empty embedding set")
        names = embeddings[0].names
        for e in embeddings[1:]:
            if e.names != names:
                raise RoutingError(f"Embedding of {e.task!r} uses a different feature order")

        matrix = np.vstack([e.values for e in embeddings])
        pipeline = make_pipeline(SimpleImputer(strategy="mean", keep_empty_features=True), StandardScaler())
        pipeline.fit(matrix)

        empty = [n for n, present in zip(names, np.isfinite(matrix).any(axis=0)) if not present]
        if empty:
            logger.warning("Features missing on every task: %s", ", ".join(empty))
        return cls(names, pipeline, {"all_missing": empty})

    @property
    def mean(self) -> np.ndarray:
        return self.pipeline[-1].mean_

    @property
    def std(self) -> np.ndarray:
        return self.pipeline[-1].scale_

    def transform(self, embedding: TaskEmbedding) -> np.ndarray:
        return self.transform_all([embedding])[0]

    def transform_all(self, embeddings: Iterable[TaskEmbedding]) -> np.ndarray:
        embeddings = list(embeddings)
        for embedding in embeddings:
            if embedding.names != self.names:
                raise RoutingError(
                    f"Embedding of {embedding.task!r} does not match the fitted registry "
                    f"({len(embedding.names)} vs {len(self.names)} features)"
                )
        if not embeddings:
            return np.zeros((0, len(self.names)))
        return self.pipeline.transform(np.vstack([e.values for e in embeddings]))


def save_embeddings(path: Path | str | None, embeddings: list[TaskEmbedding]) -> None:
    """One embedding is written as an object, several as {"embeddings": [...]}."""
    if len(embeddings) == 1:
        write_json(path, embeddings[0].as_dict())
    else:
        write_json(path, {"format_version": FORMAT_VERSION, "embeddings": [e.as_dict() for e in embeddings]})


def load_embeddings(path: Path | str) -> list[TaskEmbedding]:
    data = read_json(path)
    if isinstance(data, list):
        items = data
    elif isinstance(data, dict) and "embeddings" in data:
        check_format_version(data)
        items = data["embeddings"]
    elif isinstance(data, dict):
        items = [data]
    else:
        raise RoutingError(f"Unrecognized embedding file {path}")
    embeddings = [TaskEmbedding.from_dict(item) for item in items]
    logger.debug("Loaded %d embeddings from %s", len(embeddings), path)
    return embeddings
