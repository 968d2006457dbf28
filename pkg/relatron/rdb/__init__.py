"""Relational database ingestion, typed entity graph and metapath projection."""

from .database import Database, Table, load_database
from .graph import EdgeType, RelGraph, augment_fk_pairs, build_graph
from .metapath import Metapath, ProjectedEdges, enumerate_metapaths, project_metapath, project_metapath_bruteforce
from .schema import Schema, TableSpec, load_schema
from .task import EntityLabelSummary, TaskHeader, TaskTable, aggregate_labels, load_task, task_stats

__all__ = (
    "Database",
    "EdgeType",
    "EntityLabelSummary",
    "Metapath",
    "ProjectedEdges",
    "RelGraph",
    "Schema",
    "Table",
    "TableSpec",
    "TaskHeader",
    "TaskTable",
    "aggregate_labels",
    "augment_fk_pairs",
    "build_graph",
    "enumerate_metapaths",
    "load_database",
    "load_schema",
    "load_task",
    "project_metapath",
    "project_metapath_bruteforce",
    "task_stats",
)
