"""Dense Rademacher typed-path sketch.

Every coordinate k runs the frozen recurrence

    h(0)(v) = 1{v = s}
    h(l)(v) = sum over u->v of r_k(l)(token) * h(l-1)(u)
    z_k(s)  = sum_l a_l sum_v beta(v) h(l)(v)

which expands to a sum over paths of the product of their per-layer signs.
No 1/sqrt(d) factor enters the layers; only kernel estimates divide by d.
"""

import logging

import numpy as np

from ..errors import SketchError
from ..rdb.graph import RelGraph
from ..util.hashing import keyed_signs
from ..util.pool import parallel_map
from .config import PathBag, PathFeatureMatrix, SketchConfig
from .oracle import as_sketch_graph
from .tokens import SketchGraph

__all__ = "SOURCE_BATCH", "layer_signs", "dense_sketch", "sketch_from_bag", "sources_of"

logger = logging.getLogger(__name__)

SALT_DENSE = 0x5D3E

SOURCE_BATCH = 64


def sources_of(graph: RelGraph | SketchGraph, node_type: str) -> list[tuple[str, int]]:
    """Every node of one type, in row order."""
    return [(node_type, i) for i in range(graph.node_counts[node_type])]


def layer_signs(config: SketchConfig, n_tokens: int) -> np.ndarray:
    """Signs r_k(l)(token) as a (T, tokens, d) array.

    Coordinate k of layer l reads the keyed stream (seed, layer, k); the sign of
    token t is its t-th word, so widening d or adding tokens keeps earlier signs.
    """
    return np.stack(
        [
            np.column_stack([keyed_signs(n_tokens, config.seed, SALT_DENSE, layer, k) for k in range(config.width)])
            for layer in range(1, config.horizon + 1)
        ]
    )


def _batch(sg: SketchGraph, config: SketchConfig, signs: np.ndarray, batch: list[tuple[str, int]]) -> np.ndarray:
    S, d = len(batch), config.width
    h = {t: np.zeros((n, S, d)) for t, n in sg.node_counts.items()}
    for j, (node_type, index) in enumerate(batch):
        h[node_type][index, j, :] = 1.0

    z = np.zeros((S, d))
    for layer in range(1, config.horizon + 1):
        step = {t: np.zeros_like(arr) for t, arr in h.items()}
        for edge in sg.edges:
            state = h[edge.src]
            if not state.any():
                continue
            message = (state * signs[layer - 1, edge.token]).reshape(state.shape[0], S * d)
            step[edge.dst] += (edge.matrix.T @ message).reshape(-1, S, d)
        h = step

        a = config.length_weight(layer)
        for node_type, state in h.items():
            weight = a * config.endpoint_weight(node_type)
            if weight:
                z += weight * state.sum(axis=0)
    return z


def dense_sketch(
    graph: RelGraph | SketchGraph, config: SketchConfig, sources: list[tuple[str, int]], *, threads: int | None = 1
) -> PathFeatureMatrix:
    """z(s) for every source, computed in source batches.

    Batches share nothing but the sign table, so the thread count never changes the result.
    """
    if config.mode != "dense":
        raise SketchError(f"dense_sketch needs mode 'dense', got {config.mode!r}")

    sg = as_sketch_graph(graph)
    for source in sources:
        sg.check_source(source)

    signs = layer_signs(config, len(sg.tokens))
    batches = [sources[i : i + SOURCE_BATCH] for i in range(0, len(sources), SOURCE_BATCH)]
    blocks = parallel_map(lambda batch: _batch(sg, config, signs, batch), batches, threads)
    matrix = np.vstack(blocks) if blocks else np.zeros((0, config.width))

    logger.debug("Dense sketch of %d sources, d=%d, T=%d", len(sources), config.width, config.horizon)
    return PathFeatureMatrix(list(sources), matrix, config.fingerprint())


def sketch_from_bag(bag: PathBag, config: SketchConfig, n_tokens: int) -> np.ndarray:
    """Sign-weighted sum over a path bag using the same signs as `dense_sketch`."""
    signs = layer_signs(config, n_tokens)
    z = np.zeros(config.width)
    for seq, weight in bag.items():
        product = np.ones(config.width)
        for position, token in enumerate(seq):
            product *= signs[position, token]
        z += weight * product
    return z
