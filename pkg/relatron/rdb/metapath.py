"""Self-looped metapaths on a labeled node type and their projections."""

import logging
from collections import defaultdict
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .graph import RelGraph

__all__ = (
    "Metapath",
    "ProjectedEdges",
    "enumerate_metapaths",
    "project_metapath",
    "project_metapath_bruteforce",
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Metapath:
    """A typed relation sequence starting and ending at the labeled type."""

    legs: tuple[str, ...]
    name: str

    @property
    def id(self) -> str:
        return "|".join(self.legs)


@dataclass(frozen=True)
class ProjectedEdges:
    """Deduplicated, symmetric labeled-entity edges induced by a metapath.

    Both directions of every pair are stored, so `n_edges` counts ordered pairs.
    """

    metapath: str
    n_nodes: int
    u: np.ndarray
    v: np.ndarray
    weight: np.ndarray

    @property
    def n_edges(self) -> int:
        return len(self.u)

    def as_set(self) -> dict[tuple[int, int], float]:
        return {(int(a), int(b)): float(w) for a, b, w in zip(self.u, self.v, self.weight)}

    @classmethod
    def from_pairs(
        cls, pairs, n_nodes: int, *, metapath: str = "custom", weights=None, symmetrize: bool = True
    ) -> "ProjectedEdges":
        """Build from (u, v) pairs; used for hand-made fixtures."""
        pairs = np.asarray(list(pairs), dtype=np.int64).reshape(-1, 2)
        data = np.ones(len(pairs)) if weights is None else np.asarray(weights, dtype=np.float64)
        matrix = sp.coo_array((data, (pairs[:, 0], pairs[:, 1])), shape=(n_nodes, n_nodes)).tocsr()
        return _finalize(metapath, matrix, symmetrize=symmetrize)


def _name(graph: RelGraph, labeled_type: str, legs: tuple[str, ...]) -> str:
    parts = [labeled_type]
    for leg in legs:
        parts.append(f"-[{leg}]->{graph.edge_types[leg].dst}")
    return "".join(parts)


def enumerate_metapaths(graph: RelGraph, labeled_type: str, *, multi_hop: bool = False) -> list[Metapath]:
    """Direct F->F edge types plus every composition F->X->F, sorted by name.

    With `multi_hop`, three-leg compositions F->X->Y->F are added as well.
    """
    graph.check_type(labeled_type)

    found: dict[tuple[str, ...], Metapath] = {}

    def add(legs: tuple[str, ...]):
        if legs not in found:
            found[legs] = Metapath(legs=legs, name=_name(graph, labeled_type, legs))

    outgoing = sorted(graph.outgoing(labeled_type), key=lambda e: e.name)

    for first in outgoing:
        if first.dst == labeled_type:
            add((first.name,))
        for second in sorted(graph.outgoing(first.dst), key=lambda e: e.name):
            if second.dst == labeled_type:
                add((first.name, second.name))
            if multi_hop:
                for third in sorted(graph.outgoing(second.dst), key=lambda e: e.name):
                    if third.dst == labeled_type:
                        add((first.name, second.name, third.name))

    metapaths = sorted(found.values(), key=lambda m: (m.name, m.id))
    logger.debug("Enumerated %d metapaths on %s", len(metapaths), labeled_type)
    return metapaths


def _binary(matrix: sp.csr_array) -> sp.csr_array:
    out = matrix.copy()
    out.data = np.ones_like(out.data)
    return out


def _finalize(name: str, matrix: sp.csr_array, *, symmetrize: bool = True) -> ProjectedEdges:
    coo = sp.coo_array(matrix)
    off = (coo.row != coo.col) & (coo.data != 0)
    matrix = sp.coo_array((coo.data[off], (coo.row[off], coo.col[off])), shape=coo.shape).tocsr()
    if symmetrize:
        matrix = matrix.maximum(matrix.T).tocsr()
    matrix.sum_duplicates()
    matrix.sort_indices()
    coo = matrix.tocoo()
    order = np.lexsort((coo.col, coo.row))
    return ProjectedEdges(
        metapath=name,
        n_nodes=matrix.shape[0],
        u=coo.row[order].astype(np.int64),
        v=coo.col[order].astype(np.int64),
        weight=coo.data[order].astype(np.float64),
    )


def project_metapath(graph: RelGraph, metapath: Metapath) -> ProjectedEdges:
    """Project a metapath onto labeled entities.

    The weight of (u, v) counts distinct witnesses: parallel edges for a direct leg,
    distinct intermediate node sequences for composed legs.
    """
    if len(metapath.legs) == 1:
        matrix = graph.adjacency[metapath.legs[0]]
    else:
        matrix = _binary(graph.adjacency[metapath.legs[0]])
        for leg in metapath.legs[1:]:
            matrix = (matrix @ _binary(graph.adjacency[leg])).tocsr()

    return _finalize(metapath.id, matrix)


def project_metapath_bruteforce(graph: RelGraph, metapath: Metapath) -> ProjectedEdges:
    """Join-by-enumeration oracle for `project_metapath`; only for small graphs."""
    neighbors = []
    for leg in metapath.legs:
        coo = graph.adjacency[leg].tocoo()
        table: dict[int, dict[int, float]] = defaultdict(dict)
        for a, b, count in zip(coo.row.tolist(), coo.col.tolist(), coo.data.tolist()):
            table[a][b] = table[a].get(b, 0.0) + count
        neighbors.append(table)

    n = graph.node_counts[graph.edge_types[metapath.legs[0]].src]
    counts: dict[tuple[int, int], float] = defaultdict(float)

    for start in range(n):
        if len(metapath.legs) == 1:
            for end, multiplicity in neighbors[0].get(start, {}).items():
                counts[(start, end)] += multiplicity
            continue

        paths = [(start,)]
        for table in neighbors:
            paths = [path + (nxt,) for path in paths for nxt in table.get(path[-1], {})]
        for path in set(paths):
            counts[(start, path[-1])] += 1.0

    directed = {pair: w for pair, w in counts.items() if pair[0] != pair[1]}
    closed: dict[tuple[int, int], float] = {}
    for (u, v), w in directed.items():
        closed[(u, v)] = max(closed.get((u, v), 0.0), w)
        closed[(v, u)] = max(closed.get((v, u), 0.0), w)

    pairs = sorted(closed)
    return ProjectedEdges(
        metapath=metapath.id,
        n_nodes=n,
        u=np.array([p[0] for p in pairs], dtype=np.int64),
        v=np.array([p[1] for p in pairs], dtype=np.int64),
        weight=np.array([closed[p] for p in pairs], dtype=np.float64),
    )
