"""Typed entity graph over a database.

Node type = table, node index = row index. Every edge type stores a sparse
(source rows x target rows) matrix whose entries count parallel edges.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
import scipy.sparse as sp

from ..errors import UnknownLabeledType
from .database import Database

__all__ = "EdgeType", "RelGraph", "build_graph", "augment_fk_pairs", "fk_edge_multiset"

logger = logging.getLogger(__name__)

Origin = Literal["fk", "fk-reverse", "fk-pair"]


@dataclass(frozen=True)
class EdgeType:
    """Metadata of one directed edge type."""

    name: str
    src: str
    dst: str
    origin: Origin
    table: str
    columns: tuple[str, ...]

    @property
    def label(self) -> str:
        return f"{self.src}-[{self.name}]->{self.dst}"


@dataclass(frozen=True)
class RelGraph:
    """Immutable typed graph: node counts per type and CSR adjacency per edge type."""

    node_counts: dict[str, int]
    edge_types: dict[str, EdgeType]
    adjacency: dict[str, sp.csr_array] = field(repr=False)

    def node_types(self) -> list[str]:
        return list(self.node_counts)

    def check_type(self, node_type: str) -> None:
        if node_type not in self.node_counts:
            raise UnknownLabeledType(f"Unknown node type {node_type!r}")

    def outgoing(self, node_type: str) -> list[EdgeType]:
        return [e for e in self.edge_types.values() if e.src == node_type]

    def incoming(self, node_type: str) -> list[EdgeType]:
        return [e for e in self.edge_types.values() if e.dst == node_type]

    def reverse_of(self, name: str) -> str | None:
        """Name of the edge type running opposite to `name`."""
        edge = self.edge_types[name]
        for other in self.edge_types.values():
            if other.name != name and other.table == edge.table and other.columns == edge.columns[::-1]:
                if edge.origin == "fk-pair" and other.origin == "fk-pair":
                    return other.name
                if {edge.origin, other.origin} == {"fk", "fk-reverse"}:
                    return other.name
        return None

    def degree(self, name: str) -> np.ndarray:
        """In-degree of target nodes along edge type `name` (parallel edges counted)."""
        return np.asarray(self.adjacency[name].sum(axis=0)).ravel()

    def out_degree(self, name: str) -> np.ndarray:
        return np.asarray(self.adjacency[name].sum(axis=1)).ravel()

    @property
    def n_edges(self) -> int:
        return int(sum(a.sum() for a in self.adjacency.values()))

    def summary(self) -> dict:
        return {
            "node_types": dict(self.node_counts),
            "edge_types": {
                name: {"src": e.src, "dst": e.dst, "origin": e.origin, "edges": int(self.adjacency[name].sum())}
                for name, e in self.edge_types.items()
            },
        }


def _adjacency(src_rows: np.ndarray, dst_rows: np.ndarray, shape: tuple[int, int]) -> sp.csr_array:
    """Sparse count matrix with sorted column indices; duplicates summed into multiplicities."""
    keep = (src_rows >= 0) & (dst_rows >= 0)
    src_rows, dst_rows = src_rows[keep], dst_rows[keep]
    data = np.ones(len(src_rows), dtype=np.float64)
    matrix = sp.coo_array((data, (src_rows, dst_rows)), shape=shape).tocsr()
    matrix.sum_duplicates()
    matrix.sort_indices()
    return matrix


def build_graph(db: Database) -> RelGraph:
    """One node per row per table; forward and reverse edge types per FK column."""
    node_counts = {spec.name: db.tables[spec.name].n_rows for spec in db.schema.tables}
    edge_types: dict[str, EdgeType] = {}
    adjacency: dict[str, sp.csr_array] = {}

    for spec in db.schema.tables:
        rows = np.arange(node_counts[spec.name])
        for fk in spec.foreign_keys:
            targets = db.fk_targets(spec.name, fk.column)
            forward = f"{spec.name}.{fk.column}"
            reverse = f"rev:{spec.name}.{fk.column}"

            edge_types[forward] = EdgeType(forward, spec.name, fk.references_table, "fk", spec.name, (fk.column,))
            adjacency[forward] = _adjacency(rows, targets, (node_counts[spec.name], node_counts[fk.references_table]))

            edge_types[reverse] = EdgeType(
                reverse, fk.references_table, spec.name, "fk-reverse", spec.name, (fk.column,)
            )
            adjacency[reverse] = adjacency[forward].T.tocsr()
            adjacency[reverse].sort_indices()

    logger.debug("Built graph with %d node types and %d edge types", len(node_counts), len(edge_types))
    return RelGraph(node_counts=node_counts, edge_types=edge_types, adjacency=adjacency)


def augment_fk_pairs(graph: RelGraph, db: Database) -> RelGraph:
    """Add an edge type for every unordered pair of FK columns of a table, in both directions.

    A row links the two entities it references; rows with a null or dangling key in
    either column contribute nothing.
    """
    edge_types = dict(graph.edge_types)
    adjacency = dict(graph.adjacency)
    added = 0

    for spec in db.schema.tables:
        for left, right in itertools.combinations(spec.foreign_keys, 2):
            a = db.fk_targets(spec.name, left.column)
            b = db.fk_targets(spec.name, right.column)
            shape = (graph.node_counts[left.references_table], graph.node_counts[right.references_table])

            forward = f"pair:{spec.name}.{left.column}~{right.column}"
            backward = f"pair:{spec.name}.{right.column}~{left.column}"

            edge_types[forward] = EdgeType(
                forward, left.references_table, right.references_table, "fk-pair", spec.name, (left.column, right.column)
            )
            adjacency[forward] = _adjacency(a, b, shape)

            edge_types[backward] = EdgeType(
                backward, right.references_table, left.references_table, "fk-pair", spec.name, (right.column, left.column)
            )
            adjacency[backward] = adjacency[forward].T.tocsr()
            adjacency[backward].sort_indices()
            added += 2

    logger.debug("Added %d fk-pair edge types", added)
    return RelGraph(node_counts=dict(graph.node_counts), edge_types=edge_types, adjacency=adjacency)


def fk_edge_multiset(graph: RelGraph, name: str) -> list[tuple[int, int]]:
    """Expand an edge type back into its (source row, target row) multiset, sorted."""
    coo = graph.adjacency[name].tocoo()
    pairs = []
    for u, v, count in zip(coo.row.tolist(), coo.col.tolist(), coo.data.tolist()):
        pairs.extend([(u, v)] * int(round(count)))
    return sorted(pairs)
