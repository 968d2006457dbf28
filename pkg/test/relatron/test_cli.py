"""Tests for the command-line interface."""

import json

import pytest

from relatron.cli import create_parser, dispatch
from relatron.landscape import demo_surface
from relatron.router import BASE_FEATURES, load_embeddings, save_embeddings
from relatron.util.io import read_json


@pytest.fixture
def config_path(tmp_path, monkeypatch):
    """Isolated, absent config file for CLI runs."""
    monkeypatch.delenv("RELATRON_CONFIG_PATH", raising=False)
    monkeypatch.delenv("RELATRON_SEED", raising=False)
    return tmp_path / ".relatron" / "config.json"


@pytest.fixture
def target(tmp_path, toy_embeddings):
    """Embedding file of the driver-top3 bank task."""
    path = tmp_path / "target.json"
    save_embeddings(path, toy_embeddings[:1])
    return path


def run(config_path, *argv) -> int:
    return dispatch(["--config", str(config_path), *map(str, argv)])


class TestDispatch:
    """Test exit codes and global flags."""

    def test_no_command(self, config_path):
        assert run(config_path) == 2

    def test_usage_error(self, config_path):
        with pytest.raises(SystemExit) as e:
            run(config_path, "route")
        assert e.value.code == 2

    def test_global_flags(self):
        args = create_parser().parse_args(["--seed", "5", "--threads", "2", "loo", "--bank", "b.jsonl"])
        assert args.seed == 5
        assert args.threads == 2
        assert args.kind == "knn"

    def test_domain_error_exits_one(self, config_path, tmp_path, capsys):
        assert run(config_path, "bank", "winners", "--bank", tmp_path / "missing.jsonl") == 1
        assert "✗" in capsys.readouterr().err


class TestRdbCommands:
    """Test ingest, profile, homophily and sketch."""

    def test_ingest(self, config_path, tmp_path, toy_dir):
        out = tmp_path / "ingest.json"
        assert run(config_path, "ingest", "--schema", toy_dir / "schema.json", "--out", out) == 0
        data = read_json(out)
        assert data["database"]["rows"]["drivers"] == 12
        manifest = read_json(tmp_path / "ingest.json.manifest.json")
        assert manifest["command"] == "ingest"
        assert str(toy_dir / "drivers.csv") in manifest["inputs"]

    def test_profile(self, config_path, tmp_path, toy_dir):
        out, report = tmp_path / "embedding.json", tmp_path / "report.json"
        code = run(
            config_path,
            "profile",
            "--schema",
            toy_dir / "schema.json",
            "--task",
            toy_dir / "task.json",
            "--report",
            report,
            "--out",
            out,
        )
        assert code == 0
        [embedding] = load_embeddings(out)
        assert embedding.task == "driver-top3"
        assert embedding.names == BASE_FEATURES
        assert read_json(report)["task"] == "driver-top3"

    def test_homophily_verified(self, config_path, tmp_path, toy_dir):
        out = tmp_path / "homophily.json"
        code = run(
            config_path,
            "homophily",
            "--schema",
            toy_dir / "schema.json",
            "--task",
            toy_dir / "task.json",
            "--verify",
            "--shuffles",
            5,
            "--out",
            out,
        )
        assert code == 0
        data = read_json(out)
        assert data["verified"]
        assert all(data["verified"].values())
        assert "shuffle_null" in data

    def test_sketch(self, config_path, tmp_path, toy_dir):
        out = tmp_path / "sketch.csv"
        code = run(
            config_path,
            "sketch",
            "--schema",
            toy_dir / "schema.json",
            "--source-type",
            "drivers",
            "--width",
            8,
            "--horizon",
            2,
            "--out",
            out,
        )
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "source_id,f0,f1,f2,f3,f4,f5,f6,f7"
        assert len(lines) == 13
        assert (tmp_path / "sketch.csv.manifest.json").is_file()

    def test_sketch_affinity(self, config_path, tmp_path, toy_dir):
        affinity = tmp_path / "affinity.json"
        code = run(
            config_path,
            "sketch",
            "--schema",
            toy_dir / "schema.json",
            "--task",
            toy_dir / "task.json",
            "--width",
            8,
            "--affinity-out",
            affinity,
            "--out",
            tmp_path / "sketch.csv",
        )
        assert code == 0
        assert len(read_json(affinity)["scores"]) == 8

    def test_sketch_needs_source(self, config_path, tmp_path, toy_dir):
        code = run(config_path, "sketch", "--schema", toy_dir / "schema.json", "--out", tmp_path / "s.csv")
        assert code == 1


class TestLandscapeCommand:
    """Test landscape metrics and post-selection."""

    @pytest.fixture
    def surfaces(self, tmp_path):
        paths = []
        for kind in ("quadratic", "bump"):
            path = tmp_path / f"{kind}.json"
            path.write_text(json.dumps(demo_surface(kind).as_dict()))
            paths.append(path)
        return paths

    def test_metrics_and_selection(self, config_path, tmp_path, surfaces):
        out = tmp_path / "landscape.json"
        assert run(config_path, "landscape", *surfaces, "--val", "0.8,0.8", "--out", out) == 0
        data = read_json(out)
        assert set(data["surfaces"]) == {str(p) for p in surfaces}
        assert data["selected"] in data["surfaces"]

    def test_score_count_mismatch(self, config_path, surfaces):
        assert run(config_path, "landscape", *surfaces, "--val", "0.8") == 1


class TestBankCommands:
    """Test bank add, winners and similarity."""

    def test_add_and_winners(self, config_path, tmp_path):
        bank = tmp_path / "bank.jsonl"
        records = tmp_path / "records.jsonl"
        base = {"task": "t", "config": {"lr": 0.1}, "val_score": 0.7, "metric": "roc_auc"}
        records.write_text(json.dumps({**base, "family": "rdl", "test_score": 0.8}) + "\n")
        dfs = json.dumps({**base, "family": "dfs", "test_score": 0.6})
        assert run(config_path, "bank", "add", "--bank", bank, records, "--record", dfs) == 0

        out = tmp_path / "winners.json"
        assert run(config_path, "bank", "winners", "--bank", bank, "--out", out) == 0
        assert read_json(out)["winners"]["t"]["family"] == "rdl"

    def test_toy_winners_with_budget(self, config_path, tmp_path, toy_dir):
        out = tmp_path / "winners.json"
        code = run(config_path, "bank", "winners", "--bank", toy_dir / "bank.jsonl", "--budget", 2, "--out", out)
        assert code == 0
        data = read_json(out)
        assert data["budget"] == 2
        assert data["winners"]["driver-top3"]["rdl_test"] == 0.8154

    def test_similarity(self, config_path, tmp_path, toy_dir):
        out = tmp_path / "similarity.json"
        assert run(config_path, "bank", "similarity", "--bank", toy_dir / "bank.jsonl", "--out", out) == 0
        assert len(read_json(out)["tasks"]) == 6


class TestRouterCommands:
    """Test route, loo, hpo, similarity and correlate."""

    def test_route(self, config_path, tmp_path, toy_dir, target):
        out = tmp_path / "route.json"
        assert run(config_path, "route", "--bank", toy_dir / "bank.jsonl", "--embedding", target, "--out", out) == 0
        data = read_json(out)
        assert data["family"] == "rdl"
        assert data["neighbors"][0] == "driver-top3"

    def test_route_with_budget(self, config_path, tmp_path, toy_dir, target):
        out = tmp_path / "route.json"
        code = run(
            config_path,
            "route",
            "--bank",
            toy_dir / "bank.jsonl",
            "--embedding",
            target,
            "--budget",
            2,
            "--train-budgets",
            "2,8",
            "--out",
            out,
        )
        assert code == 0
        assert read_json(out)["budget"] == 2

    def test_ratio_rule_needs_probes(self, config_path, target):
        assert run(config_path, "route", "--embedding", target, "--rule", "ratio") == 1

    def test_route_takes_one_embedding(self, config_path, toy_dir):
        path = toy_dir / "bank_embeddings.json"
        assert run(config_path, "route", "--bank", toy_dir / "bank.jsonl", "--embedding", path) == 1

    def test_loo(self, config_path, tmp_path, toy_dir):
        out = tmp_path / "loo.json"
        assert run(config_path, "loo", "--bank", toy_dir / "bank.jsonl", "--k", 1, "--out", out) == 0
        data = read_json(out)
        assert len(data["per_task"]) == 6
        assert 0.0 <= data["accuracy"] <= 1.0

    def test_hpo(self, config_path, tmp_path, toy_dir):
        out = tmp_path / "hpo.json"
        code = run(
            config_path,
            "hpo",
            "--bank",
            toy_dir / "bank.jsonl",
            "--task",
            "driver-top3",
            "--budget",
            16,
            "--no-landscape",
            "--out",
            out,
        )
        assert code == 0
        data = read_json(out)
        assert data["best_val"] == pytest.approx(0.8357)
        assert data["best_possible_val"] == pytest.approx(0.8357)
        assert len(data["trajectory"]) == 16

    def test_hpo_routed(self, config_path, tmp_path, toy_dir, target):
        out = tmp_path / "hpo.json"
        code = run(
            config_path,
            "hpo",
            "--bank",
            toy_dir / "bank.jsonl",
            "--task",
            "driver-top3",
            "--budget",
            4,
            "--route",
            target,
            "--out",
            out,
        )
        assert code == 0
        assert read_json(out)["family"] == "rdl"

    def test_similarity(self, config_path, tmp_path, toy_dir):
        out = tmp_path / "agreement.json"
        code = run(
            config_path,
            "similarity",
            "--embeddings",
            toy_dir / "bank_embeddings.json",
            "--bank",
            toy_dir / "bank.jsonl",
            "--out",
            out,
        )
        assert code == 0
        assert "agreement" in read_json(out)["before"]

    def test_similarity_needs_truth(self, config_path, toy_dir):
        assert run(config_path, "similarity", "--embeddings", toy_dir / "bank_embeddings.json") == 1

    def test_correlate(self, config_path, tmp_path, toy_dir):
        out = tmp_path / "correlate.json"
        code = run(
            config_path, "correlate", "--bank", toy_dir / "bank.jsonl", "--feature", "h_adjs_corr_mean", "--out", out
        )
        assert code == 0
        assert read_json(out)["n"] == 6


class TestCsbmCommands:
    """Test the CSBM lab commands."""

    def test_sample(self, config_path, tmp_path):
        out = tmp_path / "sample.json"
        code = run(
            config_path, "--seed", 7, "csbm", "sample", "--n", 100, "--gamma", "1,-1", "--degree", 4, "--out", out
        )
        assert code == 0
        data = read_json(out)
        assert data["spec"]["seed"] == 7
        assert len(data["metapaths"]) == 2
        assert data["positives"] + data["negatives"] == 100

    def test_sample_needs_a_spec(self, config_path):
        assert run(config_path, "csbm", "sample") == 1

    def test_spec_file(self, config_path, tmp_path):
        spec = tmp_path / "spec.json"
        spec.write_text(json.dumps({"n": 50, "metapaths": [{"p": 0.2, "q": 0.05}]}))
        out = tmp_path / "sample.json"
        assert run(config_path, "csbm", "sample", "--spec", spec, "--out", out) == 0
        assert read_json(out)["spec"]["n"] == 50

    def test_snr(self, config_path, tmp_path):
        out = tmp_path / "snr.json"
        code = run(config_path, "csbm", "snr", "--gamma", "1.2,-1.2", "--mc-samples", 2000, "--out", out)
        assert code == 0
        assert read_json(out)["rho_lin"] == pytest.approx(0.0, abs=1e-9)

    def test_gating_seed_floor(self, config_path):
        assert run(config_path, "csbm", "gating", "--gamma", "1", "--seeds", 5) == 1

    def test_crossover(self, config_path, tmp_path):
        out, curves = tmp_path / "crossover.json", tmp_path / "curves.csv"
        code = run(
            config_path,
            "csbm",
            "crossover",
            "--n",
            200,
            "--gamma",
            2,
            "--degree",
            4,
            "--grid",
            "10,50",
            "--seeds",
            2,
            "--curves",
            curves,
            "--out",
            out,
        )
        assert code == 0
        assert read_json(out)["grid"] == [10, 50]
        assert len(curves.read_text().splitlines()) == 3
