"""RDB task homophily: label kernels, per-metapath metrics and profiles."""

from .kernel import LabelKernel
from .metrics import (
    adjusted_homophily,
    aggregation_homophily,
    class_insensitive_homophily,
    class_prior,
    edge_homophily,
    label_shuffle_null,
    weighted_edge_homophily,
)
from .profile import AggregateStats, HomophilyProfile, MetapathMetrics, aggregate_stats, profile

__all__ = (
    "AggregateStats",
    "HomophilyProfile",
    "LabelKernel",
    "MetapathMetrics",
    "adjusted_homophily",
    "aggregate_stats",
    "aggregation_homophily",
    "class_insensitive_homophily",
    "class_prior",
    "edge_homophily",
    "label_shuffle_null",
    "profile",
    "weighted_edge_homophily",
)
