"""Typed-path sketches, frozen message passing, closed-form heads and affinity probes."""

from .affinity import AffinityScores, affinity_scores, load_external_affinity, probe_names
from .config import PathBag, PathFeatureMatrix, SketchConfig, bag_inner, kernel_estimate
from .dense import dense_sketch, sketch_from_bag, sources_of
from .features import FeatureBlock, encode_database, encode_features
from .hasher import random_mp_hasher
from .heads import LinearHead, fit_head, fit_lda, fit_ridge
from .oracle import DEFAULT_ORACLE_CAP, path_bag_oracle
from .tensor import tensor_sketch, tensor_sketch_from_bag
from .tokens import EdgeToken, SketchGraph, TokenTable

__all__ = (
    "AffinityScores",
    "affinity_scores",
    "load_external_affinity",
    "probe_names",
    "PathBag",
    "PathFeatureMatrix",
    "SketchConfig",
    "bag_inner",
    "kernel_estimate",
    "dense_sketch",
    "sketch_from_bag",
    "sources_of",
    "path_sketch",
    "FeatureBlock",
    "encode_database",
    "encode_features",
    "random_mp_hasher",
    "LinearHead",
    "fit_head",
    "fit_lda",
    "fit_ridge",
    "DEFAULT_ORACLE_CAP",
    "path_bag_oracle",
    "tensor_sketch",
    "tensor_sketch_from_bag",
    "EdgeToken",
    "SketchGraph",
    "TokenTable",
)


def path_sketch(graph, config: SketchConfig, sources, *, threads=1) -> PathFeatureMatrix:
    """Dispatch on `config.mode`."""
    if config.mode == "tensor":
        return tensor_sketch(graph, config, sources, threads=threads)
    return dense_sketch(graph, config, sources, threads=threads)
