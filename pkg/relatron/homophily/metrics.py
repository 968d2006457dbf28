"""Homophily metrics over projected metapath edges.

Edges with an unlabeled endpoint are skipped and counted, never imputed.
"""

import logging
from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateClassMass, MetricError, NoLabeledEdges
from ..rdb.metapath import ProjectedEdges
from ..rdb.task import EntityLabelSummary
from .kernel import LabelKernel

__all__ = (
    "LabeledEdges",
    "labeled_edges",
    "class_prior",
    "edge_homophily",
    "weighted_edge_homophily",
    "adjusted_homophily",
    "class_insensitive_homophily",
    "aggregation_homophily",
    "ShuffleNull",
    "label_shuffle_null",
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LabeledEdges:
    """Retained edges with endpoint label vectors gathered."""

    u: np.ndarray
    v: np.ndarray
    weight: np.ndarray
    yu: np.ndarray
    yv: np.ndarray
    skipped: int
    labels: np.ndarray

    @property
    def n_edges(self) -> int:
        return len(self.u)

    @property
    def skip_fraction(self) -> float:
        total = self.n_edges + self.skipped
        return self.skipped / total if total else 0.0


def labeled_edges(edges: ProjectedEdges, summary: EntityLabelSummary, *, labels: np.ndarray | None = None) -> LabeledEdges:
    """Keep edges whose endpoints both carry a label.

    Raises:
        NoLabeledEdges: when no edge survives.
    """
    n_nodes = max(edges.n_nodes, int(summary.entities.max()) + 1 if len(summary) else 0)
    mask, matrix = summary.dense(n_nodes)
    if labels is not None:
        matrix = labels

    keep = mask[edges.u] & mask[edges.v]
    skipped = int((~keep).sum())
    if skipped:
        logger.debug("Skipped %d of %d edges with unlabeled endpoints on %s", skipped, edges.n_edges, edges.metapath)
    if not keep.any():
        raise NoLabeledEdges(f"No edge of {edges.metapath} has two labeled endpoints")

    u, v = edges.u[keep], edges.v[keep]
    return LabeledEdges(u, v, edges.weight[keep], matrix[u], matrix[v], skipped, matrix)


def class_prior(summary: EntityLabelSummary) -> np.ndarray:
    """Mean label vector over labeled nodes."""
    if not len(summary):
        return np.zeros(summary.num_classes)
    return summary.means.mean(axis=0)


def _kernel(summary: EntityLabelSummary, kernel: LabelKernel | None) -> LabelKernel:
    return kernel if kernel is not None else LabelKernel.for_summary(summary)


def edge_homophily(edges: ProjectedEdges, summary: EntityLabelSummary, kernel: LabelKernel | None = None) -> float:
    """Mean kernel value over retained edges."""
    kernel = _kernel(summary, kernel)
    view = labeled_edges(edges, summary)
    return float(kernel(view.yu, view.yv).mean())


def weighted_edge_homophily(
    edges: ProjectedEdges, summary: EntityLabelSummary, kernel: LabelKernel | None = None
) -> float:
    """Witness-weighted variant of `edge_homophily`."""
    kernel = _kernel(summary, kernel)
    view = labeled_edges(edges, summary)
    return float(np.average(kernel(view.yu, view.yv), weights=view.weight))


def _adjusted(view: LabeledEdges) -> float:
    h_edge = float(np.einsum("ij,ij->i", view.yu, view.yv).mean())
    mass = (view.yu + view.yv).sum(axis=0) / (2.0 * view.n_edges)
    expected = float((mass**2).sum())
    denominator = 1.0 - expected
    if abs(denominator) < 1e-12:
        raise DegenerateClassMass("All edge label mass sits in one class")
    return (h_edge - expected) / denominator


def adjusted_homophily(edges: ProjectedEdges, summary: EntityLabelSummary) -> float:
    """Chance-corrected edge homophily with soft class degree mass D_k."""
    if not summary.classification:
        raise MetricError("Adjusted homophily is defined for classification tasks only")
    return _adjusted(labeled_edges(edges, summary))


def class_insensitive_homophily(
    edges: ProjectedEdges,
    summary: EntityLabelSummary,
    prior: np.ndarray | None = None,
    kernel: LabelKernel | None = None,
) -> float:
    """(1/(C-1)) sum_k [h_k - pi_k]_+ ; equals `edge_homophily` for regression.

    Classes with zero edge mass are skipped.
    """
    kernel = _kernel(summary, kernel)
    if not summary.classification:
        return edge_homophily(edges, summary, kernel)

    C = summary.num_classes
    if C < 2:
        raise MetricError("Class-insensitive homophily needs at least two classes")

    prior = class_prior(summary) if prior is None else np.asarray(prior, dtype=np.float64)
    view = labeled_edges(edges, summary)
    k_values = kernel(view.yu, view.yv)

    mass = view.yv.sum(axis=0)
    total = 0.0
    for k in range(C):
        if mass[k] <= 0:
            continue
        h_k = float((k_values * view.yv[:, k]).sum() / mass[k])
        total += max(0.0, h_k - float(prior[k]))
    return total / (C - 1)


def aggregation_homophily(edges: ProjectedEdges, summary: EntityLabelSummary, kernel: LabelKernel | None = None) -> float:
    """Mean over nodes with labeled neighbors of K(y_u, mean neighbor label)."""
    kernel = _kernel(summary, kernel)
    view = labeled_edges(edges, summary)

    n_nodes, C = view.labels.shape
    sums = np.zeros((n_nodes, C))
    np.add.at(sums, view.u, view.yv)
    degree = np.bincount(view.u, minlength=n_nodes)

    nodes = np.flatnonzero(degree > 0)
    if not len(nodes):
        raise NoLabeledEdges("No node has a labeled neighbor")
    neighbor_mean = sums[nodes] / degree[nodes, None]
    return float(kernel(view.labels[nodes], neighbor_mean).mean())


@dataclass(frozen=True)
class ShuffleNull:
    """Permutation null distribution of adjusted homophily."""

    observed: float
    mean: float
    std: float
    shuffles: int

    @property
    def z_score(self) -> float:
        return (self.observed - self.mean) / self.std if self.std > 0 else 0.0


def label_shuffle_null(edges: ProjectedEdges, summary: EntityLabelSummary, shuffles: int = 200, seed: int = 0) -> ShuffleNull:
    """Adjusted homophily after permuting labels over labeled nodes, `shuffles` times."""
    view = labeled_edges(edges, summary)
    observed = _adjusted(view)

    rng = np.random.default_rng(seed)
    n_nodes = view.labels.shape[0]
    values = []
    for _ in range(shuffles):
        permuted = np.zeros_like(view.labels)
        permuted[summary.entities] = summary.means[rng.permutation(len(summary))]
        shuffled = LabeledEdges(
            view.u, view.v, view.weight, permuted[view.u], permuted[view.v], view.skipped, permuted
        )
        try:
            values.append(_adjusted(shuffled))
        except DegenerateClassMass:
            continue

    values = np.asarray(values) if values else np.zeros(1)
    logger.debug("Shuffle null over %d permutations of %d nodes", len(values), n_nodes)
    return ShuffleNull(observed, float(values.mean()), float(values.std()), len(values))
