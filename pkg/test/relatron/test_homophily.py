"""Tests for label kernels, homophily metrics and the per-metapath profile."""

import numpy as np
import pytest

from relatron.errors import DegenerateClassMass, DegenerateLabels, EmptyProfile, MetricError, NoLabeledEdges
from relatron.homophily import (
    LabelKernel,
    adjusted_homophily,
    aggregate_stats,
    aggregation_homophily,
    class_insensitive_homophily,
    edge_homophily,
    label_shuffle_null,
    profile,
    weighted_edge_homophily,
)
from relatron.homophily.profile import METRICS
from relatron.rdb import EntityLabelSummary, ProjectedEdges, TaskTable, aggregate_labels

A, B = [1.0, 0.0], [0.0, 1.0]


def classes(*rows):
    return EntityLabelSummary.from_means(rows)


def edges(pairs, n, weights=None):
    return ProjectedEdges.from_pairs(pairs, n, weights=weights)


class TestLabelKernel:
    """Test label kernels."""

    def test_dot(self):
        kernel = LabelKernel.dot()
        assert kernel(np.array([A, A]), np.array([A, B])).tolist() == [1.0, 0.0]

    def test_pearson_standardizes_over_nodes(self):
        kernel = LabelKernel.pearson(np.array([1.0, 3.0]))
        assert kernel.mu == 2.0
        assert kernel.sigma2 == 1.0
        assert kernel(np.array([[3.0]]), np.array([[1.0]])).tolist() == [-1.0]

    def test_pearson_zero_variance(self):
        with pytest.raises(DegenerateLabels):
            LabelKernel.pearson(np.array([2.0, 2.0]))


class TestEdgeHomophily:
    """Test edge-level homophily metrics."""

    def test_edge_homophily(self):
        summary = classes(A, A, B, B)
        assert edge_homophily(edges([(0, 1), (0, 2), (1, 3)], 4), summary) == pytest.approx(1 / 3)

    def test_weighted(self):
        summary = classes(A, A, B)
        value = weighted_edge_homophily(edges([(0, 1), (0, 2)], 3, weights=[3.0, 1.0]), summary)
        assert value == pytest.approx(0.75)

    def test_unlabeled_endpoints_skipped(self):
        summary = EntityLabelSummary.from_means([A, A], entities=[0, 1])
        assert edge_homophily(edges([(0, 1), (1, 2)], 3), summary) == 1.0

    def test_no_labeled_edges(self):
        summary = EntityLabelSummary.from_means([A], entities=[0])
        with pytest.raises(NoLabeledEdges):
            edge_homophily(edges([(0, 1)], 2), summary)

    def test_identity_metapath_pearson(self):
        summary = EntityLabelSummary.from_means([1.0, 1.0, 3.0, 3.0], classification=False)
        assert edge_homophily(edges([(0, 1), (2, 3)], 4), summary) == pytest.approx(1.0)


class TestAdjustedHomophily:
    """Test chance-corrected homophily."""

    def test_balanced_perfect(self):
        summary = classes(A, A, B, B)
        assert adjusted_homophily(edges([(0, 1), (2, 3)], 4), summary) == pytest.approx(1.0)

    def test_balanced_heterophilous(self):
        summary = classes(A, B, A, B)
        assert adjusted_homophily(edges([(0, 1), (2, 3)], 4), summary) == pytest.approx(-1.0)

    def test_single_class_mass(self):
        summary = classes(A, A)
        with pytest.raises(DegenerateClassMass):
            adjusted_homophily(edges([(0, 1)], 2), summary)

    def test_regression_rejected(self):
        summary = EntityLabelSummary.from_means([1.0, 3.0], classification=False)
        with pytest.raises(MetricError):
            adjusted_homophily(edges([(0, 1)], 2), summary)


class TestClassInsensitiveHomophily:
    """Test class-insensitive homophily."""

    def test_complete_graph_at_prior(self):
        summary = classes(A, A, B, B)
        complete = [(i, j) for i in range(4) for j in range(i + 1, 4)]
        value = class_insensitive_homophily(edges(complete, 4), summary, prior=np.array([0.5, 0.5]))
        assert value == pytest.approx(0.0)

    def test_perfect(self):
        summary = classes(A, A, B, B)
        assert class_insensitive_homophily(edges([(0, 1), (2, 3)], 4), summary) == pytest.approx(1.0)

    def test_regression_equals_edge_homophily(self):
        summary = EntityLabelSummary.from_means([1.0, 2.0, 4.0], classification=False)
        projected = edges([(0, 1), (1, 2)], 3)
        assert class_insensitive_homophily(projected, summary) == pytest.approx(edge_homophily(projected, summary))


class TestAggregationHomophily:
    """Test aggregation homophily."""

    def test_heterophilous_star(self):
        summary = classes(A, B, B, B)
        assert aggregation_homophily(edges([(0, 1), (0, 2), (0, 3)], 4), summary) == 0.0

    def test_regression_pairs(self):
        summary = EntityLabelSummary.from_means([1.0, 1.0, 3.0, 3.0], classification=False)
        assert aggregation_homophily(edges([(0, 1), (2, 3)], 4), summary) == pytest.approx(1.0)


class TestShuffleNull:
    """Test the label-shuffle null."""

    def test_deterministic(self):
        summary = classes(A, A, A, B, B, B)
        projected = edges([(0, 1), (1, 2), (3, 4), (4, 5), (2, 3)], 6)
        first = label_shuffle_null(projected, summary, shuffles=50, seed=3)
        second = label_shuffle_null(projected, summary, shuffles=50, seed=3)
        assert first == second
        assert first.observed > first.mean
        assert first.z_score > 0


class TestAggregateStats:
    """Test profile aggregate statistics."""

    def test_weighted_mean(self):
        stats = aggregate_stats([0.2, 0.6], [10, 30])
        assert stats.weighted_mean == pytest.approx(0.5)
        assert stats.mean == pytest.approx(0.4)
        assert stats.min == 0.2
        assert stats.max == 0.6

    def test_constant_values(self):
        stats = aggregate_stats([0.3, 0.3], [1, 1])
        assert stats.mode == 0.3
        assert stats.std == 0.0

    def test_mode_densest_bin(self):
        stats = aggregate_stats([0.0, 0.95, 0.96, 1.0], [1, 1, 1, 1])
        assert stats.mode == pytest.approx(0.95)


class TestProfile:
    """Test the task homophily profile."""

    def test_toy_profile(self, toy_graph, toy_task):
        result = profile(toy_graph, toy_task, aggregate_labels(toy_task))
        assert result.classification is True
        assert result.metapaths
        assert set(result.aggregates) <= set(METRICS)
        assert "h_edge" in result.aggregates
        for metrics in result.metapaths.values():
            assert -1.0 <= metrics.h_edge <= 1.0
        assert result.diagnostics["enumerated"] >= len(result.metapaths)

    def test_threads_do_not_change_result(self, toy_graph, toy_task):
        summary = aggregate_labels(toy_task)
        assert profile(toy_graph, toy_task, summary).as_dict() == profile(
            toy_graph, toy_task, summary, threads=4
        ).as_dict()

    def test_no_usable_metapath(self, tiny_graph):
        import pandas as pd

        header = {
            "name": "lonely",
            "entity_table": "drivers",
            "entity_column": "driverId",
            "target": "classification",
            "num_classes": 2,
            "metric": {"name": "roc_auc"},
        }
        rows = pd.DataFrame(
            [(0, 1.0, 1, "train"), (1, 1.0, 0, "val")], columns=["entity_id", "timestamp", "label", "split"]
        )
        task = TaskTable.create(header, rows)
        with pytest.raises(EmptyProfile):
            profile(tiny_graph, task, aggregate_labels(task))
