"""Shared fixtures: the bundled toy database and a tiny hand-made one."""

from pathlib import Path

import pandas as pd
import pytest

import relatron
from relatron.bank import load_bank
from relatron.rdb import Schema, augment_fk_pairs, build_graph, load_database, load_schema, load_task
from relatron.rdb.database import Database
from relatron.router import load_embeddings

TOY_DIR = Path(relatron.__file__).parent / "contrib" / "toy"

TINY_SCHEMA = {
    "tables": [
        {
            "name": "drivers",
            "file": "drivers.csv",
            "primary_key": "driverId",
            "columns": [
                {"name": "driverId", "kind": "categorical"},
                {"name": "nationality", "kind": "categorical"},
                {"name": "number", "kind": "numeric"},
            ],
        },
        {
            "name": "races",
            "file": "races.csv",
            "primary_key": "raceId",
            "columns": [{"name": "raceId", "kind": "categorical"}],
        },
        {
            "name": "results",
            "file": "results.csv",
            "primary_key": "resultId",
            "foreign_keys": [
                {"column": "driverId", "references_table": "drivers"},
                {"column": "raceId", "references_table": "races"},
            ],
            "columns": [
                {"name": "resultId", "kind": "categorical"},
                {"name": "points", "kind": "numeric"},
            ],
        },
    ]
}


def _tiny_frames() -> dict[str, pd.DataFrame]:
    return {
        "drivers": pd.DataFrame(
            {"driverId": ["d1", "d2", "d3"], "nationality": ["GBR", "NLD", "GBR"], "number": ["44", "33", "x"]}
        ),
        "races": pd.DataFrame({"raceId": ["r1", "r2"]}),
        "results": pd.DataFrame(
            {
                "resultId": ["s1", "s2", "s3", "s4", "s5"],
                "driverId": ["d1", "d2", "d1", "d2", "d3"],
                "raceId": ["r1", "r1", "r2", "r2", ""],
                "points": ["25", "18", "18", "25", "0"],
            }
        ),
    }


@pytest.fixture
def toy_dir() -> Path:
    return TOY_DIR


@pytest.fixture(scope="session")
def toy_db():
    return load_database(load_schema(TOY_DIR / "schema.json"), TOY_DIR)


@pytest.fixture(scope="session")
def toy_task(toy_db):
    return load_task(TOY_DIR / "task.json", toy_db)


@pytest.fixture(scope="session")
def toy_graph(toy_db):
    return augment_fk_pairs(build_graph(toy_db), toy_db)


@pytest.fixture(scope="session")
def toy_bank():
    return load_bank(TOY_DIR / "bank.jsonl")


@pytest.fixture(scope="session")
def toy_embeddings():
    return load_embeddings(TOY_DIR / "bank_embeddings.json")


@pytest.fixture
def tiny_frames() -> dict[str, pd.DataFrame]:
    """Fresh raw string frames of the tiny database; tests may mutate them."""
    return _tiny_frames()


@pytest.fixture(scope="session")
def tiny_schema() -> Schema:
    return Schema.from_dict(TINY_SCHEMA)


@pytest.fixture
def tiny_db(tiny_schema) -> Database:
    return Database.from_frames(tiny_schema, _tiny_frames())


@pytest.fixture
def tiny_graph(tiny_db):
    return augment_fk_pairs(build_graph(tiny_db), tiny_db)
