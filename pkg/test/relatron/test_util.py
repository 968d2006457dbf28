"""Tests for hashing, JSON output, run manifests and process setup."""

import json
import math
import os

import numpy as np
import pytest

from relatron import process
from relatron.errors import UnsupportedFormatVersion
from relatron.util.hashing import PolyHash, keyed_generator, keyed_signs, keyed_words, stable_token_hash
from relatron.util.io import RunManifest, check_format_version, dumps_json, file_digest, read_json, write_json
from relatron.util.pool import parallel_map


class TestHashing:
    """Test keyed streams and hashes."""

    def test_keyed_words_are_counter_based(self):
        np.testing.assert_array_equal(keyed_words(8, 1, 2, 3)[:5], keyed_words(5, 1, 2, 3))
        assert not np.array_equal(keyed_words(5, 1, 2, 3), keyed_words(5, 1, 3, 2))

    def test_keyed_generator_matches_philox(self):
        ours = keyed_generator(4, 9).integers(0, 100, size=10)
        direct = np.random.Generator(np.random.Philox(np.random.SeedSequence([4, 9]))).integers(0, 100, size=10)
        np.testing.assert_array_equal(ours, direct)

    def test_negative_keys_wrap(self):
        np.testing.assert_array_equal(keyed_words(3, -1), keyed_words(3, 2**64 - 1))

    def test_keyed_signs_balanced(self):
        signs = keyed_signs(20_000, 7)
        assert set(np.unique(signs)) <= {-1.0, 1.0}
        assert abs(signs.mean()) < 0.03

    def test_poly_hash(self):
        h = PolyHash(1, 2)
        assert np.all(h.bins(np.arange(100), 8) < 8)
        assert set(np.unique(h.signs(np.arange(100)))) <= {-1.0, 1.0}
        np.testing.assert_array_equal(h.raw([5, 6]), PolyHash(1, 2).raw([5, 6]))
        assert h.coeffs != PolyHash(1, 3).coeffs

    def test_stable_token_hash(self):
        assert stable_token_hash("drivers") == stable_token_hash("drivers")
        assert 0 <= stable_token_hash("drivers") < 2**63


class TestJson:
    """Test canonical JSON output."""

    def test_canonical(self):
        text = dumps_json({"b": np.float64(1.5), "a": np.arange(2), "c": math.nan})
        assert text.endswith("\n")
        assert json.loads(text) == {"a": [0, 1], "b": 1.5, "c": None}
        assert text.index('"a"') < text.index('"b"')

    def test_write_and_read(self, tmp_path):
        path = tmp_path / "out" / "data.json"
        write_json(path, {"x": 1})
        assert read_json(path) == {"x": 1}
        assert not list(path.parent.glob("*.tmp"))

    def test_stdout(self, capsys):
        write_json("-", {"x": 1})
        assert json.loads(capsys.readouterr().out) == {"x": 1}

    def test_format_version(self):
        check_format_version({"format_version": "1.3"})
        check_format_version({})
        with pytest.raises(UnsupportedFormatVersion):
            check_format_version({"format_version": "2.0"})


class TestRunManifest:
    """Test run manifests."""

    def test_manifest_next_to_output(self, tmp_path):
        source = tmp_path / "input.csv"
        source.write_text("a\n1\n")
        out = tmp_path / "result.json"
        manifest = RunManifest("ingest", {"seed": 0}, 0, "0.1.0")
        manifest.add_inputs([source, None, tmp_path / "absent.csv"])
        manifest.write(out)

        data = read_json(tmp_path / "result.json.manifest.json")
        assert data["command"] == "ingest"
        assert data["inputs"] == {str(source): file_digest(source)}
        assert data["format_version"] == "1.0"


class TestParallelMap:
    """Test the order-preserving pool."""

    def test_order(self):
        assert parallel_map(lambda x: x * x, range(10), threads=4) == [x * x for x in range(10)]

    def test_empty(self):
        assert parallel_map(lambda x: x, [], threads=4) == []


class TestProcess:
    """Test once-per-process setup."""

    def test_setup_is_idempotent(self):
        process.setup(source=__name__)
        assert process.is_initialized()
        assert not process.initialize_process(RELATRON_UNUSED="1")
        assert "RELATRON_UNUSED" not in os.environ
        assert all(os.environ.get(key) for key in process.BLAS_THREAD_VARIABLES)
