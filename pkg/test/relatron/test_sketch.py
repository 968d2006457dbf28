"""Tests for typed-path sketches, the path-bag oracle, heads and affinity probes."""

import json

import numpy as np
import pandas as pd
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relatron.errors import DataError, OracleTooLarge, SingleClass, SketchError
from relatron.rdb import augment_fk_pairs, build_graph
from relatron.rdb.database import Database
from relatron.sketch import (
    SketchConfig,
    SketchGraph,
    affinity_scores,
    bag_inner,
    dense_sketch,
    encode_features,
    fit_lda,
    fit_ridge,
    kernel_estimate,
    load_external_affinity,
    path_bag_oracle,
    path_sketch,
    probe_names,
    random_mp_hasher,
    sketch_from_bag,
    sources_of,
    tensor_sketch,
    tensor_sketch_from_bag,
)
from relatron.sketch.dense import layer_signs
from relatron.sketch.heads import standardize


def oracle_rows(sg, config, sources, from_bag):
    return np.vstack([from_bag(path_bag_oracle(sg, s, config), config, len(sg.tokens)) for s in sources])


class TestSketchConfig:
    """Test sketch configuration."""

    def test_defaults(self):
        config = SketchConfig()
        assert config.length_weight(2) == 1.0
        assert config.endpoint_weight("drivers") == 1.0

    def test_length_weights_must_match_horizon(self):
        with pytest.raises(ValueError):
            SketchConfig(horizon=3, length_weights=(1.0, 0.5))

    def test_endpoint_restriction(self):
        config = SketchConfig(endpoint_type="drivers")
        assert config.endpoint_weight("drivers") == 1.0
        assert config.endpoint_weight("races") == 0.0

    def test_fingerprint_tracks_settings(self):
        assert SketchConfig(seed=1).fingerprint() != SketchConfig(seed=2).fingerprint()
        assert SketchConfig(seed=1).fingerprint() == SketchConfig(seed=1).fingerprint()


class TestOracle:
    """Test brute-force path-bag enumeration."""

    def test_one_hop(self, tiny_graph):
        sg = SketchGraph(tiny_graph)
        bag = path_bag_oracle(sg, ("drivers", 0), SketchConfig(horizon=1))
        assert sorted(bag.values()) == [2.0, 2.0]
        assert all(len(seq) == 1 for seq in bag)

    def test_endpoint_type_drops_other_endpoints(self, tiny_graph):
        bag = path_bag_oracle(tiny_graph, ("drivers", 0), SketchConfig(horizon=1, endpoint_type="drivers"))
        assert bag == {}

    def test_length_weights_scale_buckets(self, tiny_graph):
        plain = path_bag_oracle(tiny_graph, ("drivers", 0), SketchConfig(horizon=2))
        scaled = path_bag_oracle(tiny_graph, ("drivers", 0), SketchConfig(horizon=2, length_weights=(1.0, 3.0)))
        for seq, weight in plain.items():
            assert scaled[seq] == weight * (3.0 if len(seq) == 2 else 1.0)

    def test_cap(self, tiny_graph):
        with pytest.raises(OracleTooLarge):
            path_bag_oracle(tiny_graph, ("drivers", 0), SketchConfig(horizon=3), cap=3)

    def test_unknown_source(self, tiny_graph):
        with pytest.raises(SketchError):
            path_bag_oracle(tiny_graph, ("drivers", 7), SketchConfig())


class TestDenseSketch:
    """Test the dense Rademacher sketch."""

    def test_matches_oracle(self, toy_graph):
        sg = SketchGraph(toy_graph)
        config = SketchConfig(width=16, horizon=2, seed=5)
        sources = sources_of(sg, "drivers")[:4]
        features = dense_sketch(sg, config, sources)
        expected = oracle_rows(sg, config, sources, sketch_from_bag)
        np.testing.assert_allclose(features.matrix, expected, rtol=1e-9, atol=1e-9)

    def test_matches_oracle_with_weights_and_endpoint(self, tiny_graph):
        sg = SketchGraph(tiny_graph)
        config = SketchConfig(width=8, horizon=3, length_weights=(0.5, 1.0, 2.0), endpoint_type="drivers", seed=2)
        sources = sources_of(sg, "drivers")
        expected = oracle_rows(sg, config, sources, sketch_from_bag)
        np.testing.assert_allclose(dense_sketch(sg, config, sources).matrix, expected, atol=1e-9)

    def test_threads_do_not_change_result(self, toy_graph):
        config = SketchConfig(width=8, horizon=2)
        sources = sources_of(toy_graph, "results")
        one = dense_sketch(toy_graph, config, sources, threads=1)
        many = dense_sketch(toy_graph, config, sources, threads=4)
        np.testing.assert_array_equal(one.matrix, many.matrix)

    def test_signs_keep_prefix_when_widened(self):
        narrow = layer_signs(SketchConfig(width=4, horizon=2, seed=3), 10)
        wide = layer_signs(SketchConfig(width=8, horizon=2, seed=3), 12)
        assert wide.shape == (2, 12, 8)
        np.testing.assert_array_equal(wide[:, :10, :4], narrow)
        assert not np.array_equal(layer_signs(SketchConfig(width=4, horizon=2, seed=4), 10), narrow)

    def test_wrong_mode(self, tiny_graph):
        with pytest.raises(SketchError):
            dense_sketch(tiny_graph, SketchConfig(mode="tensor"), [("drivers", 0)])

    def test_frame(self, tiny_graph):
        features = path_sketch(tiny_graph, SketchConfig(width=4, horizon=1), sources_of(tiny_graph, "drivers"))
        frame = features.to_frame(["d1", "d2", "d3"])
        assert list(frame.columns) == ["source_id", "f0", "f1", "f2", "f3"]
        assert frame["source_id"].tolist() == ["d1", "d2", "d3"]

    @settings(max_examples=20, deadline=None)
    @given(
        st.lists(st.tuples(st.integers(0, 2), st.one_of(st.none(), st.integers(0, 1))), min_size=1, max_size=10),
        st.integers(0, 2**16),
    )
    def test_matches_oracle_on_random_tables(self, tiny_schema, rows, seed):
        frames = {
            "drivers": pd.DataFrame({"driverId": ["d0", "d1", "d2"], "nationality": ["X"] * 3, "number": ["1"] * 3}),
            "races": pd.DataFrame({"raceId": ["r0", "r1"]}),
            "results": pd.DataFrame(
                {
                    "resultId": [f"s{i}" for i in range(len(rows))],
                    "driverId": [f"d{d}" for d, _ in rows],
                    "raceId": ["" if r is None else f"r{r}" for _, r in rows],
                    "points": ["0"] * len(rows),
                }
            ),
        }
        db = Database.from_frames(tiny_schema, frames)
        sg = SketchGraph(augment_fk_pairs(build_graph(db), db))
        config = SketchConfig(width=4, horizon=2, seed=seed)
        sources = sources_of(sg, "drivers")
        expected = oracle_rows(sg, config, sources, sketch_from_bag)
        np.testing.assert_allclose(dense_sketch(sg, config, sources).matrix, expected, atol=1e-9)

    @pytest.mark.slow
    def test_kernel_estimate_is_unbiased(self, tiny_graph):
        sg = SketchGraph(tiny_graph)
        base = SketchConfig(width=256, horizon=2)
        bags = [path_bag_oracle(sg, ("drivers", i), base) for i in range(2)]
        exact = bag_inner(bags[0], bags[1])
        estimates = []
        for seed in range(50):
            config = base.model_copy(update={"seed": seed})
            features = dense_sketch(sg, config, [("drivers", 0), ("drivers", 1)])
            estimates.append(kernel_estimate(features, 0, 1))
        assert np.mean(estimates) == pytest.approx(exact, rel=0.1)


class TestTensorSketch:
    """Test the CountSketch realization."""

    def test_matches_oracle(self, toy_graph):
        sg = SketchGraph(toy_graph)
        config = SketchConfig(width=16, horizon=2, mode="tensor", seed=9)
        sources = sources_of(sg, "drivers")[:4]
        expected = oracle_rows(sg, config, sources, tensor_sketch_from_bag)
        np.testing.assert_allclose(tensor_sketch(sg, config, sources).matrix, expected, atol=1e-9)

    def test_dispatch(self, tiny_graph):
        config = SketchConfig(width=8, horizon=2, mode="tensor")
        sources = sources_of(tiny_graph, "drivers")
        np.testing.assert_array_equal(
            path_sketch(tiny_graph, config, sources).matrix, tensor_sketch(tiny_graph, config, sources).matrix
        )

    def test_wrong_mode(self, tiny_graph):
        with pytest.raises(SketchError):
            tensor_sketch(tiny_graph, SketchConfig(), [("drivers", 0)])


class TestFeatures:
    """Test column encoding and the frozen message-passing hasher."""

    def test_encode_drivers(self, toy_db):
        block = encode_features(toy_db, "drivers")
        assert block.width == 33
        assert block.names[-1] == "number"
        np.testing.assert_array_equal(block.matrix[:, :32].sum(axis=1), np.ones(12))

    def test_null_numeric_is_zero(self, tiny_db):
        block = encode_features(tiny_db, "drivers", slots=4)
        assert block.matrix[2, -1] == 0.0

    def test_hasher_zero_layers(self, tiny_graph):
        features = {t: np.ones((n, 1)) for t, n in tiny_graph.node_counts.items()}
        out = random_mp_hasher(tiny_graph, features, 0, 8)
        np.testing.assert_array_equal(out["drivers"], features["drivers"])

    def test_hasher_shapes(self, tiny_graph):
        features = {t: np.ones((n, 1)) for t, n in tiny_graph.node_counts.items()}
        out = random_mp_hasher(tiny_graph, features, 2, 8, seed=3)
        assert out["drivers"].shape == (3, 8)
        assert np.all(out["results"] >= 0)
        again = random_mp_hasher(tiny_graph, features, 2, 8, seed=3)
        np.testing.assert_array_equal(out["drivers"], again["drivers"])


class TestHeads:
    """Test closed-form heads."""

    def test_ridge_recovers_linear_map(self):
        rng = np.random.default_rng(0)
        x = rng.standard_normal((200, 3))
        y = x @ np.array([1.0, -2.0, 0.5]) + 4.0
        head = fit_ridge(x, y, lam=1e-6)
        np.testing.assert_allclose(head.weights, [1.0, -2.0, 0.5], atol=1e-4)
        assert head.intercept == pytest.approx(4.0, abs=1e-4)

    def test_ridge_lambda_positive(self):
        with pytest.raises(SketchError):
            fit_ridge(np.ones((3, 1)), np.ones(3), lam=0.0)

    def test_ridge_multi_output(self):
        rng = np.random.default_rng(1)
        x = rng.standard_normal((100, 2))
        y = np.column_stack([x[:, 0] + 1.0, -x[:, 1]])
        head = fit_ridge(x, y, lam=1e-6)
        assert head.weights.shape == (2, 2)
        np.testing.assert_allclose(head.weights, [[1.0, 0.0], [0.0, -1.0]], atol=1e-4)
        np.testing.assert_allclose(head.intercept, [1.0, 0.0], atol=1e-4)
        assert head.class_scores(x).shape == (100, 2)

    def test_standardize_uses_train_moments(self):
        train = np.array([[1.0, 5.0], [3.0, 5.0]])
        scaled_train, scaled_val = standardize(train, np.array([[2.0, 7.0]]))
        np.testing.assert_allclose(scaled_train, [[-1.0, 0.0], [1.0, 0.0]])
        np.testing.assert_allclose(scaled_val, [[0.0, 2.0]])

    def test_standardize_empty_train(self):
        empty = np.zeros((0, 2))
        out = standardize(empty, np.ones((1, 2)))
        np.testing.assert_array_equal(out[1], np.ones((1, 2)))

    def test_lda_separates(self):
        x = np.array([[0.0], [0.2], [1.0], [1.2]])
        head = fit_lda(x, [0, 0, 1, 1])
        scores = head.class_scores(x)
        assert np.all(np.argmax(scores, axis=1) == [0, 0, 1, 1])

    def test_lda_single_class(self):
        with pytest.raises(SingleClass):
            fit_lda(np.ones((3, 1)), [1, 1, 1])


class TestAffinity:
    """Test the affinity probes."""

    def test_toy_scores(self, toy_graph, toy_task, toy_db):
        result = affinity_scores(toy_graph, toy_task, toy_db, width=16)
        assert list(result.scores) == probe_names()
        assert len(result.scores) == 8
        assert not result.missing
        assert all(0.0 <= v <= 1.0 for v in result.scores.values())

    def test_external_override(self, toy_graph, toy_task, toy_db):
        result = affinity_scores(toy_graph, toy_task, toy_db, width=8, external={"rfr_randomnbfnet_1": 0.5})
        assert result.scores["rfr_randomnbfnet_1"] == 0.5
        assert result.external == ["rfr_randomnbfnet_1"]

    def test_load_external(self, tmp_path):
        path = tmp_path / "external.json"
        path.write_text(json.dumps({"rfr_randomnbfnet_1": 0.7}))
        assert load_external_affinity(path) == {"rfr_randomnbfnet_1": 0.7}

    def test_load_external_rejects_text(self, tmp_path):
        path = tmp_path / "external.json"
        path.write_text(json.dumps({"rfr_randomnbfnet_1": "high"}))
        with pytest.raises(DataError):
            load_external_affinity(path)
