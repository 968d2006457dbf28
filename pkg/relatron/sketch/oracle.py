"""Brute-force path-bag enumeration, the reference the sketches are checked against."""

import logging
from collections import defaultdict

from ..errors import OracleTooLarge
from ..rdb.graph import RelGraph
from .config import PathBag, SketchConfig
from .tokens import SketchGraph

__all__ = "DEFAULT_ORACLE_CAP", "as_sketch_graph", "path_bag_oracle"

logger = logging.getLogger(__name__)

DEFAULT_ORACLE_CAP = 1_000_000


def as_sketch_graph(graph: RelGraph | SketchGraph) -> SketchGraph:
    return graph if isinstance(graph, SketchGraph) else SketchGraph(graph)


def path_bag_oracle(
    graph: RelGraph | SketchGraph, source: tuple[str, int], config: SketchConfig, *, cap: int = DEFAULT_ORACLE_CAP
) -> PathBag:
    """Enumerate every directed path of length 1..T from `source`.

    Paths are bucketed by token sequence; a bucket's weight is the a_l-scaled,
    beta-weighted count of its paths (parallel edges counted separately).

    Raises:
        OracleTooLarge: when the running path count exceeds `cap`.
    """
    sg = as_sketch_graph(graph)
    sg.check_source(source)

    frontier: dict[tuple[str, int, tuple[int, ...]], float] = {(source[0], int(source[1]), ()): 1.0}
    bag: dict[tuple[int, ...], float] = defaultdict(float)
    total = 0.0

    for layer in range(1, config.horizon + 1):
        step: dict[tuple[str, int, tuple[int, ...]], float] = defaultdict(float)
        for (node_type, node, seq), count in frontier.items():
            for edge in sg.out_edges(node_type):
                m = edge.matrix
                lo, hi = m.indptr[node], m.indptr[node + 1]
                for nbr, multiplicity in zip(m.indices[lo:hi].tolist(), m.data[lo:hi].tolist()):
                    step[(edge.dst, nbr, seq + (edge.token,))] += count * multiplicity

        total += sum(step.values())
        if total > cap:
            raise OracleTooLarge(f"More than {cap} paths within horizon {config.horizon} from {source[0]}:{source[1]}")

        a = config.length_weight(layer)
        for (node_type, _, seq), count in step.items():
            weight = a * config.endpoint_weight(node_type) * count
            if weight:
                bag[seq] += weight
        frontier = step

    logger.debug("Oracle enumerated %d paths in %d token sequences", int(total), len(bag))
    return dict(bag)
