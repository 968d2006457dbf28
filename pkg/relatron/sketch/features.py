"""Numeric encoding of table columns for the hasher and feature probes."""

import logging
from dataclasses import dataclass

import numpy as np
from sklearn.preprocessing import StandardScaler

from ..rdb.database import Database
from ..util.hashing import stable_token_hash

__all__ = "DEFAULT_SLOTS", "FeatureBlock", "encode_features", "encode_database", "category_slots"

logger = logging.getLogger(__name__)

DEFAULT_SLOTS = 32


@dataclass(frozen=True)
class FeatureBlock:
    table: str
    names: list[str]
    matrix: np.ndarray

    @property
    def width(self) -> int:
        return self.matrix.shape[1]


def category_slots(prefix: str, values, slots: int) -> dict[str, int]:
    """Hashed slot per distinct value; collisions are resolved by linear probing
    while the number of distinct values fits in `slots`."""
    assigned: dict[str, int] = {}
    taken: set[int] = set()
    for value in sorted(set(values)):
        slot = stable_token_hash(f"{prefix}={value}") % slots
        if len(taken) < slots:
            while slot in taken:
                slot = (slot + 1) % slots
        assigned[value] = slot
        taken.add(slot)
    return assigned


def encode_features(db: Database, table: str, *, slots: int = DEFAULT_SLOTS) -> FeatureBlock:
    """Per-row feature vectors for one table.

    Numeric columns are z-scored with nulls set to 0 afterwards; a constant column
    encodes as all zeros. Categorical columns become a one-hot block of `slots`
    hashed positions. Text and key columns are skipped.
    """
    data = db.table(table)
    spec = data.spec
    names: list[str] = []
    blocks: list[np.ndarray] = []

    for column in spec.columns:
        if column.name in spec.key_columns or column.kind == "text":
            continue
        values = data.frame[column.name]

        if column.kind == "numeric":
            x = values.to_numpy(dtype=np.float64)[:, None]
            # Missing cells stay NaN through the scaler and score 0.
            scored = StandardScaler().fit_transform(x) if np.isfinite(x).any() else np.zeros_like(x)
            blocks.append(np.nan_to_num(scored, nan=0.0))
            names.append(column.name)
        else:
            present = values.notna().to_numpy()
            mapping = category_slots(f"{table}.{column.name}", values[present].astype(str), slots)
            block = np.zeros((len(values), slots))
            rows = np.flatnonzero(present)
            block[rows, [mapping[str(v)] for v in values[present]]] = 1.0
            blocks.append(block)
            names.extend(f"{column.name}#{k}" for k in range(slots))

    if not blocks:
        logger.warning("Table %s has no numeric or categorical columns; zero-width features", table)
        return FeatureBlock(table, [], np.zeros((data.n_rows, 0)))

    return FeatureBlock(table, names, np.hstack(blocks))


def encode_database(db: Database, *, slots: int = DEFAULT_SLOTS) -> dict[str, np.ndarray]:
    """Encoded feature matrix per table."""
    return {name: encode_features(db, name, slots=slots).matrix for name in db.schema.table_names}
