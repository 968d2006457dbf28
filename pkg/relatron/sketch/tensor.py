"""TensorSketch (CountSketch over token sequences) of typed-path bags.

y_j(s) = sum over sequences sigma of Psi_s[sigma] S(sigma) 1{H(sigma) = j}, with
H(sigma) = sum_i h_i(sigma_i) mod d and S(sigma) = prod_i s_i(sigma_i). The DP
carries bucket offsets as circular shifts of a width-d state.
"""

import logging

import numpy as np

from ..errors import SketchError
from ..rdb.graph import RelGraph
from ..util.hashing import PolyHash
from ..util.pool import parallel_map
from .config import PathBag, PathFeatureMatrix, SketchConfig
from .dense import SOURCE_BATCH
from .oracle import as_sketch_graph
from .tokens import SketchGraph

__all__ = "layer_hashes", "tensor_sketch", "tensor_sketch_from_bag"

logger = logging.getLogger(__name__)

SALT_BUCKET = 0x7B11
SALT_SIGN = 0x7B12


def layer_hashes(config: SketchConfig, n_tokens: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-layer pairwise-independent buckets and signs, each (T, tokens)."""
    tokens = np.arange(n_tokens)
    buckets = np.zeros((config.horizon, n_tokens), dtype=np.int64)
    signs = np.zeros((config.horizon, n_tokens))
    for layer in range(1, config.horizon + 1):
        buckets[layer - 1] = PolyHash(config.seed, SALT_BUCKET, layer).bins(tokens, config.width)
        signs[layer - 1] = PolyHash(config.seed, SALT_SIGN, layer).signs(tokens)
    return buckets, signs


def _batch(
    sg: SketchGraph, config: SketchConfig, buckets: np.ndarray, signs: np.ndarray, batch: list[tuple[str, int]]
) -> np.ndarray:
    S, d = len(batch), config.width
    h = {t: np.zeros((n, S, d)) for t, n in sg.node_counts.items()}
    for j, (node_type, index) in enumerate(batch):
        h[node_type][index, j, 0] = 1.0

    y = np.zeros((S, d))
    for layer in range(1, config.horizon + 1):
        step = {t: np.zeros_like(arr) for t, arr in h.items()}
        for edge in sg.edges:
            state = h[edge.src]
            if not state.any():
                continue
            shifted = np.roll(state, int(buckets[layer - 1, edge.token]), axis=2) * signs[layer - 1, edge.token]
            step[edge.dst] += (edge.matrix.T @ shifted.reshape(state.shape[0], S * d)).reshape(-1, S, d)
        h = step

        a = config.length_weight(layer)
        for node_type, state in h.items():
            weight = a * config.endpoint_weight(node_type)
            if weight:
                y += weight * state.sum(axis=0)
    return y


def tensor_sketch(
    graph: RelGraph | SketchGraph, config: SketchConfig, sources: list[tuple[str, int]], *, threads: int | None = 1
) -> PathFeatureMatrix:
    if config.mode != "tensor":
        raise SketchError(f"tensor_sketch needs mode 'tensor', got {config.mode!r}")

    sg = as_sketch_graph(graph)
    for source in sources:
        sg.check_source(source)

    buckets, signs = layer_hashes(config, len(sg.tokens))
    batches = [sources[i : i + SOURCE_BATCH] for i in range(0, len(sources), SOURCE_BATCH)]
    blocks = parallel_map(lambda batch: _batch(sg, config, buckets, signs, batch), batches, threads)
    matrix = np.vstack(blocks) if blocks else np.zeros((0, config.width))

    logger.debug("Tensor sketch of %d sources, d=%d, T=%d", len(sources), config.width, config.horizon)
    return PathFeatureMatrix(list(sources), matrix, config.fingerprint())


def tensor_sketch_from_bag(bag: PathBag, config: SketchConfig, n_tokens: int) -> np.ndarray:
    """CountSketch of an explicit bag with the hashes `tensor_sketch` uses."""
    buckets, signs = layer_hashes(config, n_tokens)
    y = np.zeros(config.width)
    for seq, weight in bag.items():
        bucket = sum(int(buckets[i, token]) for i, token in enumerate(seq)) % config.width
        sign = float(np.prod([signs[i, token] for i, token in enumerate(seq)]))
        y[bucket] += weight * sign
    return y
