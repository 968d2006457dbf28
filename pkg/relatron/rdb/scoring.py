"""Task metrics over predictions.

Classification predictions are either (n, C) class scores or a vector: positive
class scores for AUROC, hard class labels for accuracy. Regression predictions
are (n,).
"""

import numpy as np
from sklearn import metrics

from ..errors import DegenerateLabels, MetricError
from .task import MetricSpec

__all__ = "roc_auc", "mean_absolute_error", "accuracy", "score_metric"


def roc_auc(y_true, scores) -> float:
    """Binary AUROC; NaN when only one class is present."""
    y_true = np.asarray(y_true).astype(bool)
    if y_true.all() or not y_true.any():
        return float("nan")
    return float(metrics.roc_auc_score(y_true, np.asarray(scores, dtype=np.float64)))


def mean_absolute_error(y_true, pred) -> float:
    return float(metrics.mean_absolute_error(np.asarray(y_true, dtype=np.float64), np.asarray(pred, dtype=np.float64)))


def accuracy(y_true, pred) -> float:
    pred = np.asarray(pred, dtype=np.float64)
    labels = np.argmax(pred, axis=1) if pred.ndim == 2 else pred
    return float(metrics.accuracy_score(np.asarray(y_true, dtype=np.float64), labels.astype(np.float64)))


def score_metric(metric: MetricSpec | str, y_true, pred) -> float:
    """Evaluate a task metric.

    AUROC over more than two classes is the macro average of one-vs-rest AUROCs
    over classes present with both polarities.

    Raises:
        DegenerateLabels: AUROC with a single class present.
    """
    name = metric if isinstance(metric, str) else metric.name
    y_true = np.asarray(y_true)
    pred = np.asarray(pred, dtype=np.float64)
    if len(y_true) == 0:
        raise MetricError(f"Cannot evaluate {name} on an empty split")
    if len(pred) != len(y_true):
        raise MetricError(f"{len(pred)} predictions for {len(y_true)} labels")

    if name == "mae":
        return mean_absolute_error(y_true, pred)
    if name == "accuracy":
        return accuracy(y_true, pred)
    if name != "roc_auc":
        raise MetricError(f"Unknown metric {name!r}")

    labels = y_true.astype(np.int64)
    if pred.ndim == 1:
        value = roc_auc(labels == 1, pred)
    elif pred.shape[1] == 2:
        value = roc_auc(labels == 1, pred[:, 1] - pred[:, 0])
    else:
        values = [roc_auc(labels == c, pred[:, c]) for c in range(pred.shape[1])]
        values = [v for v in values if np.isfinite(v)]
        value = float(np.mean(values)) if values else float("nan")
    if not np.isfinite(value):
        raise DegenerateLabels("AUROC needs both classes among the labels")
    return value
