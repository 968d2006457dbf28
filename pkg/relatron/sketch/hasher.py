"""Frozen random message passing over the typed graph."""

import logging

import numpy as np

from ..rdb.graph import RelGraph
from ..util.hashing import stable_token_hash

__all__ = "mean_aggregate", "propagate", "random_mp_hasher"

logger = logging.getLogger(__name__)


def mean_aggregate(graph: RelGraph, name: str, x: np.ndarray) -> np.ndarray:
    """Mean of source features over each target's in-neighbors along one edge type.

    Parallel edges weigh in by multiplicity; nodes without neighbors get zeros.
    """
    incoming = graph.adjacency[name].T.tocsr()
    total = incoming @ x
    degree = np.asarray(incoming.sum(axis=1)).ravel()
    out = np.zeros_like(total, dtype=np.float64)
    nonzero = degree > 0
    out[nonzero] = total[nonzero] / degree[nonzero, None]
    return out


def propagate(graph: RelGraph, features: dict[str, np.ndarray]) -> dict[str, np.ndarray]:
    """Self features concatenated with the neighbor mean per incoming edge type (name order)."""
    out = {}
    for node_type in graph.node_counts:
        parts = [features[node_type]]
        for edge in sorted(graph.incoming(node_type), key=lambda e: e.name):
            parts.append(mean_aggregate(graph, edge.name, features[edge.src]))
        out[node_type] = np.hstack(parts)
    return out


def _weights(seed: int, layer: int, node_type: str, fan_in: int, width: int) -> np.ndarray:
    rng = np.random.default_rng([seed, layer, stable_token_hash(node_type)])
    return rng.standard_normal((fan_in, width)) / np.sqrt(max(fan_in, 1))


def random_mp_hasher(
    graph: RelGraph, features: dict[str, np.ndarray], layers: int, width: int, seed: int = 0
) -> dict[str, np.ndarray]:
    """L rounds of propagate -> fixed Gaussian projection -> max(0, .).

    Weights depend only on (seed, layer, node type), so permuting nodes within a
    type permutes the outputs.
    """
    x = {t: np.asarray(features[t], dtype=np.float64) for t in graph.node_counts}
    for layer in range(1, layers + 1):
        mixed = propagate(graph, x)
        x = {
            t: np.maximum(0.0, z @ _weights(seed, layer, t, z.shape[1], width)) for t, z in mixed.items()
        }
    return x
