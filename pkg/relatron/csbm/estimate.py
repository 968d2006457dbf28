"""Gate estimation from a partially labeled instance."""

import logging
import math

import numpy as np
import scipy.sparse as sp

from .model import CsbmInstance

__all__ = ("estimate_gamma",)

logger = logging.getLogger(__name__)


def _labeled_mask(instance: CsbmInstance, labeled) -> np.ndarray:
    labeled = np.asarray(labeled)
    if labeled.dtype == bool:
        if len(labeled) != instance.n:
            raise ValueError(f"Mask of length {len(labeled)} for {instance.n} nodes")
        return labeled
    mask = np.zeros(instance.n, dtype=bool)
    mask[labeled.astype(np.int64)] = True
    return mask


def estimate_gamma(instance: CsbmInstance, labeled) -> np.ndarray:
    """ln(p_hat / q_hat) per metapath from edges with both endpoints labeled.

    p_hat = (same-label edges + 1) / (same-label pairs + 2), q_hat likewise for
    different-label pairs. A metapath without labeled edges gets a gate of 0.
    `labeled` is a boolean mask or an index array.
    """
    mask = _labeled_mask(instance, labeled)
    nodes = np.flatnonzero(mask)
    labels = instance.labels[nodes]
    positives = int(np.sum(labels == 1))
    negatives = len(labels) - positives
    same_pairs = math.comb(positives, 2) + math.comb(negatives, 2)
    diff_pairs = positives * negatives

    gammas = np.zeros(len(instance.adjacency))
    for m, adjacency in enumerate(instance.adjacency):
        upper = sp.triu(adjacency[nodes][:, nodes], k=1).tocoo()
        if upper.nnz == 0:
            continue
        same = int(np.sum(labels[upper.row] == labels[upper.col]))
        diff = upper.nnz - same
        p_hat = (same + 1) / (same_pairs + 2)
        q_hat = (diff + 1) / (diff_pairs + 2)
        gammas[m] = math.log(p_hat / q_hat)

    logger.debug("Estimated gates %s from %d labeled nodes", np.round(gammas, 3).tolist(), int(mask.sum()))
    return gammas
