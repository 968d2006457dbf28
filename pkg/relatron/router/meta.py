"""Meta-classifiers that route a task to the RDL or DFS family."""

import logging
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from sklearn.linear_model import LogisticRegression
from sklearn.neighbors import KNeighborsClassifier

from ..bank.records import Bank
from ..bank.winners import Winner, winner
from ..errors import BudgetMismatch, IncompleteTask, RoutingError, SingleFamilyBank, TooFewTasks
from ..util.pool import parallel_map
from .embedding import Normalizer, TaskEmbedding

__all__ = (
    "MetaClassifier",
    "RouteDecision",
    "LooReport",
    "fit_meta",
    "fit_meta_labels",
    "winner_labels",
    "predict",
    "route",
    "loo_eval",
    "loo_eval_labels",
    "anchor_ratio_rule",
)

logger = logging.getLogger(__name__)

# L2 strength on the coefficients; sklearn's C is its inverse.
L2 = 1e-4
TOLERANCE = 1e-8
MAX_ITERATIONS = 100
TOP_WEIGHTS = 3


@dataclass(frozen=True)
class RouteDecision:
    family: Literal["rdl", "dfs"]
    confidence: float
    neighbors: list[str] = field(default_factory=list)
    weights: dict[str, float] = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "family": self.family,
            "confidence": self.confidence,
            "neighbors": self.neighbors,
            "weights": self.weights,
        }


@dataclass
class MetaClassifier:
    """A fitted router over normalized embeddings; labels are 1 for rdl, 0 for dfs."""

    kind: Literal["knn", "logistic"]
    names: tuple[str, ...]
    normalizer: Normalizer
    tasks: list[str]
    model: KNeighborsClassifier | LogisticRegression
    k: int = 3

    @property
    def uses_budget(self) -> bool:
        return "budget" in self.names


def winner_labels(
    bank: Bank, embeddings: list[TaskEmbedding], by: Literal["val", "test"] = "val"
) -> tuple[list[TaskEmbedding], list[str], dict[str, Winner]]:
    """Winner per embedding, honoring an embedded budget; tasks without a winner drop out."""
    kept, labels, found = [], [], {}
    for embedding in embeddings:
        budget = embedding.budget
        try:
            result = winner(bank, embedding.task, by, budget=None if budget is None else int(budget))
        except IncompleteTask as e:
            logger.debug("No winner for %s: %s", embedding.task, e)
            continue
        kept.append(embedding)
        labels.append(result.family)
        found[_key(embedding)] = result
    return kept, labels, found


def _key(embedding: TaskEmbedding) -> str:
    budget = embedding.budget
    return embedding.task if budget is None else f"{embedding.task}@{budget:g}"


def _model(kind: str, k: int, n: int) -> KNeighborsClassifier | LogisticRegression:
    if kind == "knn":
        return KNeighborsClassifier(n_neighbors=min(k, n), weights="distance", algorithm="brute")
    if kind == "logistic":
        # Newton steps; the intercept is not penalized.
        return LogisticRegression(C=1.0 / L2, solver="newton-cholesky", tol=TOLERANCE, max_iter=MAX_ITERATIONS)
    raise RoutingError(f"Unknown meta-classifier kind {kind!r}")


def fit_meta_labels(
    embeddings: list[TaskEmbedding], labels: list[str], kind: Literal["knn", "logistic"] = "knn", *, k: int = 3
) -> MetaClassifier:
    """Fit on explicit winner labels.

    Raises:
        SingleFamilyBank: when only one family wins.
    """
    if len(embeddings) < 2:
        raise TooFewTasks(f"Meta-classifier needs at least 2 tasks, got {len(embeddings)}")
    if len(set(labels)) < 2:
        raise SingleFamilyBank(f"Every task is won by {labels[0]!r}")
    if kind == "knn" and (k < 1 or k % 2 == 0):
        raise RoutingError(f"knn needs an odd k >= 1, got {k}")

    normalizer = Normalizer.fit(embeddings)
    x = normalizer.transform_all(embeddings)
    y = np.array([1 if label == "rdl" else 0 for label in labels])
    model = _model(kind, k, len(x)).fit(x, y)
    return MetaClassifier(kind, normalizer.names, normalizer, [_key(e) for e in embeddings], model, k)


def fit_meta(
    bank: Bank,
    embeddings: list[TaskEmbedding],
    kind: Literal["knn", "logistic"] = "knn",
    *,
    by: Literal["val", "test"] = "val",
    k: int = 3,
) -> MetaClassifier:
    kept, labels, _ = winner_labels(bank, embeddings, by)
    return fit_meta_labels(kept, labels, kind, k=k)


def _family(score: float) -> str:
    return "rdl" if score > 0.5 else "dfs"


def predict(meta: MetaClassifier, embedding: TaskEmbedding) -> RouteDecision:
    """knn: distance-weighted vote of the k nearest tasks; logistic: fitted probability.

    Neighbors at distance zero take the whole vote. Even splits go to DFS.
    """
    z = meta.normalizer.transform(embedding)[None, :]
    share = float(meta.model.predict_proba(z)[0, list(meta.model.classes_).index(1)])
    family = _family(share)
    confidence = share if family == "rdl" else 1 - share

    if meta.kind == "logistic":
        coef = meta.model.coef_[0]
        order = np.argsort(-np.abs(coef), kind="stable")[:TOP_WEIGHTS]
        return RouteDecision(family, confidence, [], {meta.names[i]: float(coef[i]) for i in order})

    _, nearest = meta.model.kneighbors(z)
    return RouteDecision(family, confidence, [meta.tasks[i] for i in nearest[0]], {})


def route(meta: MetaClassifier, embedding: TaskEmbedding, budget: float | None = None) -> RouteDecision:
    """Predict with the budget slot filled in when the router was trained with one.

    Raises:
        BudgetMismatch: when a budget is given to a budget-free router or omitted for a budgeted one.
    """
    if budget is not None and not meta.uses_budget:
        raise BudgetMismatch("This router was trained without a budget feature")
    if budget is None and meta.uses_budget and embedding.budget is None:
        raise BudgetMismatch("This router needs a budget")
    if budget is not None:
        embedding = embedding.with_budget(budget)
    elif not meta.uses_budget:
        embedding = embedding.without_budget()
    return predict(meta, embedding)


@dataclass
class LooReport:
    accuracy: float
    kind: str
    by: str
    per_task: list[dict]

    def as_dict(self) -> dict:
        return {"accuracy": self.accuracy, "kind": self.kind, "by": self.by, "per_task": self.per_task}


def loo_eval(
    bank: Bank,
    embeddings: list[TaskEmbedding],
    kind: Literal["knn", "logistic"] = "knn",
    *,
    by: Literal["val", "test"] = "val",
    k: int = 3,
    threads: int | None = 1,
) -> LooReport:
    """Leave one task out, refit (normalization included) on the rest, predict it.

    A fold whose training tasks all share one winner predicts that winner.
    """
    kept, labels, found = winner_labels(bank, embeddings, by)
    margins = {key: w.margin for key, w in found.items()}
    return loo_eval_labels(kept, labels, kind, k=k, by=by, margins=margins, threads=threads)


def loo_eval_labels(
    embeddings: list[TaskEmbedding],
    labels: list[str],
    kind: Literal["knn", "logistic"] = "knn",
    *,
    k: int = 3,
    by: str = "val",
    margins: dict[str, float] | None = None,
    threads: int | None = 1,
) -> LooReport:
    if len(embeddings) < 3:
        raise TooFewTasks(f"Leave-one-out needs at least 3 tasks, got {len(embeddings)}")
    if len(set(labels)) < 2:
        raise SingleFamilyBank(f"Every task is won by {labels[0]!r}")
    margins = margins or {}

    def fold(i: int) -> dict:
        rest = [e for j, e in enumerate(embeddings) if j != i]
        rest_labels = [label for j, label in enumerate(labels) if j != i]
        if len(set(rest_labels)) == 1:
            decision = RouteDecision(rest_labels[0], 1.0)
        else:
            decision = predict(fit_meta_labels(rest, rest_labels, kind, k=k), embeddings[i])
        key = _key(embeddings[i])
        return {
            "task": key,
            "predicted": decision.family,
            "actual": labels[i],
            "correct": decision.family == labels[i],
            "confidence": decision.confidence,
            "margin": margins.get(key),
        }

    per_task = parallel_map(fold, range(len(embeddings)), threads)
    accuracy = float(np.mean([row["correct"] for row in per_task]))
    logger.debug("LOO %s accuracy %.3f over %d tasks", kind, accuracy, len(per_task))
    return LooReport(accuracy, kind, by, per_task)


def anchor_ratio_rule(
    embedding: TaskEmbedding, threshold: float = 1.10, *, higher_is_better: bool = True
) -> RouteDecision:
    """DFS when feature affinity over path affinity reaches `threshold`, RDL otherwise.

    Each affinity is the best of its probes; for lower-is-better metrics the ratio is inverted.
    """

    def best(prefix: str) -> float:
        values = [v for n, v in zip(embedding.names, embedding.values) if n.startswith(prefix) and np.isfinite(v)]
        if not values:
            raise RoutingError(f"Embedding of {embedding.task!r} has no {prefix}* features")
        return max(values) if higher_is_better else min(values)

    feature, path = best("feat_affinity_"), best("rfr_randomnbfnet_")
    if feature <= 0 or path <= 0:
        raise RoutingError("Affinity ratio needs positive scores")
    ratio = feature / path if higher_is_better else path / feature
    family = "dfs" if ratio >= threshold else "rdl"
    return RouteDecision(family, 1.0, [], {"affinity_ratio": float(ratio)})
