"""Tests for end-to-end task profiling."""

import math

import pytest

from relatron.pipeline import load_inputs, profile_task
from relatron.router import BASE_FEATURES, FeatureRegistry
from relatron.settings import RelatronConfig


@pytest.fixture(scope="module")
def small_config():
    return RelatronConfig(sketch={"width": 8}, walks={"walks": 4, "length": 3})


class TestProfileTask:
    """Test profiling the toy task."""

    def test_load_inputs(self, toy_dir):
        db, task = load_inputs(toy_dir / "schema.json", toy_dir / "task.json")
        assert task.name == "driver-top3"
        assert "drivers" in db.tables

    def test_base_embedding(self, toy_db, toy_task, small_config):
        run = profile_task(toy_db, toy_task, small_config)
        assert run.embedding.names == BASE_FEATURES
        expected_rows = run.stats["train_rows"] + run.stats["val_rows"]
        assert run.embedding.get("log_total_rows") == pytest.approx(math.log1p(expected_rows))
        assert run.profile is not None
        assert run.report()["task"] == "driver-top3"

    def test_all_groups(self, toy_db, toy_task, small_config):
        run = profile_task(toy_db, toy_task, small_config, probes=True, heuristics=True, budget=8)
        registry = FeatureRegistry.default(probes=True, heuristics=True, budget=True)
        assert run.embedding.names == registry.names
        assert run.embedding.budget == 8.0
        assert run.affinity is not None

    def test_deterministic(self, toy_db, toy_task, small_config):
        one = profile_task(toy_db, toy_task, small_config).embedding
        two = profile_task(toy_db, toy_task, small_config.model_copy(update={"threads": 4})).embedding
        assert one.as_dict() == two.as_dict()
