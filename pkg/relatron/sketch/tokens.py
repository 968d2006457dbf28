"""Edge tokens and a flattened view of the typed graph for path computations."""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from ..errors import SketchError
from ..rdb.graph import RelGraph

__all__ = "EdgeToken", "TokenTable", "TypedEdges", "SketchGraph"


@dataclass(frozen=True, order=True)
class EdgeToken:
    """(tail node type, edge type, head node type)."""

    tail: str
    edge: str
    head: str


class TokenTable:
    """Injective interning of edge tokens to consecutive integer ids."""

    def __init__(self):
        self._ids: dict[EdgeToken, int] = {}
        self._tokens: list[EdgeToken] = []

    def intern(self, token: EdgeToken) -> int:
        if token not in self._ids:
            self._ids[token] = len(self._tokens)
            self._tokens.append(token)
        return self._ids[token]

    def __getitem__(self, token_id: int) -> EdgeToken:
        return self._tokens[token_id]

    def __len__(self) -> int:
        return len(self._tokens)

    def __contains__(self, token: EdgeToken) -> bool:
        return token in self._ids


@dataclass(frozen=True)
class TypedEdges:
    token: int
    src: str
    dst: str
    matrix: sp.csr_array


class SketchGraph:
    """Typed adjacency grouped by token, interned in edge-type name order.

    Node addresses are (type, row) pairs; `offsets` maps them to one global index.
    """

    def __init__(self, graph: RelGraph):
        self.node_counts = dict(graph.node_counts)
        self.tokens = TokenTable()
        self.edges: list[TypedEdges] = []
        for name in sorted(graph.edge_types):
            edge = graph.edge_types[name]
            token = self.tokens.intern(EdgeToken(edge.src, edge.name, edge.dst))
            self.edges.append(TypedEdges(token, edge.src, edge.dst, graph.adjacency[name]))

        self.offsets: dict[str, int] = {}
        total = 0
        for node_type, count in self.node_counts.items():
            self.offsets[node_type] = total
            total += count
        self.n_nodes = total

    def check_source(self, source: tuple[str, int]) -> None:
        node_type, index = source
        if node_type not in self.node_counts or not 0 <= index < self.node_counts[node_type]:
            raise SketchError(f"Unknown source node {node_type}:{index}")

    def out_edges(self, node_type: str) -> list[TypedEdges]:
        return [e for e in self.edges if e.src == node_type]

    def global_adjacency(self) -> sp.csr_array:
        """All edge types merged into one (n x n) multiplicity matrix over global indices."""
        rows, cols, data = [], [], []
        for edge in self.edges:
            coo = edge.matrix.tocoo()
            rows.append(coo.row + self.offsets[edge.src])
            cols.append(coo.col + self.offsets[edge.dst])
            data.append(coo.data)
        if not rows:
            return sp.csr_array((self.n_nodes, self.n_nodes))
        matrix = sp.coo_array(
            (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))), shape=(self.n_nodes, self.n_nodes)
        ).tocsr()
        matrix.sum_duplicates()
        matrix.sort_indices()
        return matrix
