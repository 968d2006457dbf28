"""Embedding similarity, its agreement with ground truth, and a learned projection."""

import logging
from dataclasses import dataclass, field

import numpy as np

from ..bank.similarity import SimilarityMatrix, kendall_tau
from ..errors import DegenerateRanking, DivergedProjection, RoutingError, TooFewTasks

__all__ = (
    "Agreement",
    "Projection",
    "embedding_similarity",
    "similarity_agreement",
    "triplets",
    "train_projection",
)

logger = logging.getLogger(__name__)

MAX_HALVINGS = 20


def embedding_similarity(matrix: np.ndarray, tasks: list[str]) -> SimilarityMatrix:
    """Pairwise cosine of normalized embedding rows; a zero row has similarity 0 with everyone."""
    matrix = np.asarray(matrix, dtype=np.float64)
    if len(matrix) != len(tasks):
        raise RoutingError(f"{len(matrix)} embedding rows for {len(tasks)} tasks")
    norms = np.linalg.norm(matrix, axis=1)
    zero = norms == 0
    unit = np.divide(matrix, norms[:, None], out=np.zeros_like(matrix), where=~zero[:, None])
    values = np.clip(unit @ unit.T, -1.0, 1.0)
    values = (values + values.T) / 2

    diagnostics = {}
    if zero.any():
        diagnostics["zero_vectors"] = [t for t, z in zip(tasks, zero) if z]
        logger.warning("Zero embedding vectors: %s", ", ".join(diagnostics["zero_vectors"]))
    return SimilarityMatrix(list(tasks), values, diagnostics)


@dataclass(frozen=True)
class Agreement:
    mean: float
    per_task: dict[str, float]
    skipped: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {"agreement": self.mean, "per_task": self.per_task, "skipped": self.skipped}


def similarity_agreement(embedded: SimilarityMatrix, truth: SimilarityMatrix) -> Agreement:
    """Mean over tasks of Kendall tau between each row's rankings of the other tasks.

    Missing ground-truth entries drop out pairwise; rows with fewer than two
    comparable entries or an all-tied ranking are skipped.
    """
    if sorted(embedded.tasks) != sorted(truth.tasks):
        raise RoutingError("Similarity matrices cover different task sets")
    tasks = embedded.tasks
    truth = truth.subset(tasks)

    per_task: dict[str, float] = {}
    skipped: list[str] = []
    for i, task in enumerate(tasks):
        others = [j for j in range(len(tasks)) if j != i and np.isfinite(truth.values[i, j])]
        if len(others) < 2:
            skipped.append(task)
            continue
        try:
            per_task[task] = kendall_tau(embedded.values[i, others], truth.values[i, others])
        except DegenerateRanking:
            skipped.append(task)

    mean = float(np.mean(list(per_task.values()))) if per_task else float("nan")
    return Agreement(mean, per_task, skipped)


def triplets(truth: SimilarityMatrix) -> list[tuple[int, int, int]]:
    """(anchor, positive, negative) with truth[a, p] > truth[a, n]."""
    out = []
    n = len(truth.tasks)
    for a in range(n):
        for p in range(n):
            if p == a or not np.isfinite(truth.values[a, p]):
                continue
            for q in range(n):
                if q in (a, p) or not np.isfinite(truth.values[a, q]):
                    continue
                if truth.values[a, p] > truth.values[a, q]:
                    out.append((a, p, q))
    return out


def _cosine_grad(u: np.ndarray, v: np.ndarray) -> tuple[float, np.ndarray, np.ndarray]:
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0 or nv == 0:
        return 0.0, np.zeros_like(u), np.zeros_like(v)
    cos = float(u @ v / (nu * nv))
    return cos, v / (nu * nv) - cos * u / nu**2, u / (nu * nv) - cos * v / nv**2


def _loss_and_grad(g: np.ndarray, x: np.ndarray, trips, margin: float) -> tuple[float, np.ndarray]:
    z = x @ g.T
    loss, grad = 0.0, np.zeros_like(g)
    for a, p, q in trips:
        cos_p, du_p, dv_p = _cosine_grad(z[a], z[p])
        cos_n, du_n, dv_n = _cosine_grad(z[a], z[q])
        hinge = margin - cos_p + cos_n
        if hinge <= 0:
            continue
        loss += hinge
        grad -= np.outer(du_p, x[a]) + np.outer(dv_p, x[p])
        grad += np.outer(du_n, x[a]) + np.outer(dv_n, x[q])
    scale = max(len(trips), 1)
    return loss / scale, grad / scale


@dataclass
class Projection:
    matrix: np.ndarray
    before: float
    after: float
    losses: list[float]

    def apply(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(x, dtype=np.float64) @ self.matrix.T

    def as_dict(self) -> dict:
        return {
            "matrix": self.matrix.tolist(),
            "agreement_before": self.before,
            "agreement_after": self.after,
            "losses": self.losses,
        }


def train_projection(
    matrix: np.ndarray,
    tasks: list[str],
    truth: SimilarityMatrix,
    *,
    margin: float = 0.1,
    steps: int = 200,
    step_size: float = 0.1,
) -> Projection:
    """Gradient descent on the triplet margin-ranking loss of cosine similarities.

    g starts at the identity. A non-finite loss halves the step and retries.

    Raises:
        DivergedProjection: when halving the step does not restore a finite loss.
    """
    x = np.asarray(matrix, dtype=np.float64)
    if len(tasks) < 3:
        raise TooFewTasks(f"Projection training needs at least 3 tasks, got {len(tasks)}")
    truth = truth.subset(tasks)
    trips = triplets(truth)

    g = np.eye(x.shape[1])
    before = similarity_agreement(embedding_similarity(x, tasks), truth).mean
    loss, grad = _loss_and_grad(g, x, trips, margin)
    losses = [loss]
    rate = step_size

    for step in range(steps):
        if not grad.any():
            break
        for _ in range(MAX_HALVINGS):
            candidate = g - rate * grad
            new_loss, new_grad = _loss_and_grad(candidate, x, trips, margin)
            if np.isfinite(new_loss) and np.all(np.isfinite(candidate)):
                break
            rate /= 2
        else:
            raise DivergedProjection(f"Loss stayed non-finite at step {step}")
        g, loss, grad = candidate, new_loss, new_grad
        losses.append(loss)

    after = similarity_agreement(embedding_similarity(x @ g.T, tasks), truth).mean
    logger.debug("Projection loss %.4f -> %.4f, agreement %.3f -> %.3f", losses[0], losses[-1], before, after)
    return Projection(g, before, after, losses)
