"""Closed-form linear heads: ridge regression and two-class LDA."""

import logging
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
import scipy.linalg
from sklearn.linear_model import Ridge
from sklearn.preprocessing import StandardScaler

from ..errors import SingleClass, SingularFit, SketchError

__all__ = "LinearHead", "fit_ridge", "fit_lda", "fit_head", "standardize"

logger = logging.getLogger(__name__)

SHRINKAGE = 1e-3


@dataclass(frozen=True)
class LinearHead:
    """w and b such that scores = X @ w + b; w is (p,) or (p, outputs)."""

    kind: Literal["ridge", "lda"]
    weights: np.ndarray
    intercept: np.ndarray | float
    stats: dict = field(default_factory=dict)

    def decision(self, x) -> np.ndarray:
        return np.asarray(x, dtype=np.float64) @ self.weights + self.intercept

    def class_scores(self, x) -> np.ndarray:
        """(n, C) scores; an LDA head scores class 0 at zero and class 1 at the discriminant."""
        scores = self.decision(x)
        if self.kind == "lda":
            return np.column_stack([np.zeros(len(scores)), scores])
        return scores if scores.ndim == 2 else scores[:, None]


def _solve(matrix: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    try:
        solution = scipy.linalg.solve(matrix, rhs, assume_a="pos")
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as e:
        raise SingularFit(f"Singular system: {e}") from e
    if not np.all(np.isfinite(solution)):
        raise SingularFit("Non-finite solution")
    return solution


def fit_ridge(x, y, lam: float = 1.0) -> LinearHead:
    """Ridge with an unpenalized intercept; a Cholesky solve of the centered normal equations."""
    if lam <= 0:
        raise SketchError(f"Ridge lambda must be positive, got {lam}")
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if len(x) < 2:
        raise SingularFit(f"Need at least 2 samples, got {len(x)}")

    if x.shape[1] == 0:
        weights = np.zeros((0,) + y.shape[1:])
        intercept = y.mean(axis=0)
    else:
        try:
            model = Ridge(alpha=lam, solver="cholesky").fit(x, y)
        except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as e:
            raise SingularFit(f"Singular system: {e}") from e
        weights = model.coef_.T if y.ndim == 2 else model.coef_
        intercept = model.intercept_
        if not (np.all(np.isfinite(weights)) and np.all(np.isfinite(intercept))):
            raise SingularFit("Non-finite solution")

    residual = y - (x @ weights + intercept)
    stats = {"lambda": lam, "samples": len(x), "train_rmse": float(np.sqrt(np.mean(residual**2)))}
    return LinearHead("ridge", weights, intercept, stats)


def fit_lda(x, y) -> LinearHead:
    """Pooled-covariance discriminant for labels {0, 1} with shrinkage εI.

    ε is 1e-3 times the larger of the mean diagonals of the pooled and total
    covariances (1e-3 when both vanish).
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y).astype(np.int64)
    if len(x) < 2:
        raise SingularFit(f"Need at least 2 samples, got {len(x)}")
    present = np.unique(y)
    if len(present) < 2:
        raise SingleClass(f"LDA needs both classes, only saw {present.tolist()}")

    pos, neg = x[y == 1], x[y == 0]
    mu1, mu0 = pos.mean(axis=0), neg.mean(axis=0)
    p = x.shape[1]
    prior = np.log(len(pos) / len(neg))
    if p == 0:
        return LinearHead("lda", np.zeros(0), float(prior), {"epsilon": 0.0, "samples": len(x)})

    centered = np.vstack([pos - mu1, neg - mu0])
    pooled = centered.T @ centered / len(x)
    total = np.atleast_2d(np.cov(x, rowvar=False, bias=True))
    scale = max(float(np.mean(np.diag(pooled))), float(np.mean(np.diag(total))))
    epsilon = SHRINKAGE * scale if scale > 0 else SHRINKAGE

    weights = _solve(pooled + epsilon * np.eye(p), mu1 - mu0)
    intercept = float(-weights @ (mu0 + mu1) / 2 + prior)
    return LinearHead("lda", weights, intercept, {"epsilon": epsilon, "samples": len(x)})


def fit_head(x, y, kind: Literal["ridge", "lda"], *, lam: float = 1.0) -> LinearHead:
    if kind == "ridge":
        return fit_ridge(x, y, lam)
    if kind == "lda":
        return fit_lda(x, y)
    raise SketchError(f"Unknown head kind {kind!r}")


def standardize(train: np.ndarray, *others: np.ndarray) -> tuple[np.ndarray, ...]:
    """Scale every matrix with the train columns' mean and std (std 0 -> 1)."""
    if len(train) == 0 or train.shape[1] == 0:
        return (train, *others)
    scaler = StandardScaler().fit(train)
    return tuple(scaler.transform(m) for m in (train, *others))
