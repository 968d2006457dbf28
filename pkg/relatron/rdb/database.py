"""In-memory column store loaded from CSV table files."""

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from ..errors import DataError, DuplicatePrimaryKey, MissingColumn
from .schema import Schema, TableSpec

__all__ = "Table", "Database", "RelationDiagnostics", "load_database", "parse_timestamps"

logger = logging.getLogger(__name__)


def _normalize_key(value):
    if value is None or (isinstance(value, float) and np.isnan(value)):
        return None
    text = str(value).strip()
    return text or None


def parse_timestamps(values: pd.Series, time_format: str = "iso") -> np.ndarray:
    """Convert a column of timestamps to float epoch seconds (NaN for nulls).

    Raises:
        DataError: when a non-empty cell cannot be parsed.
    """
    values = values.astype("object").map(_normalize_key)
    if time_format == "epoch":
        parsed = pd.to_numeric(values, errors="coerce")
    else:
        parsed = pd.to_datetime(values, errors="coerce", utc=True, format="ISO8601")
        parsed = (parsed - pd.Timestamp(0, tz="UTC")) / pd.Timedelta(seconds=1)

    parsed = pd.Series(parsed, index=values.index, dtype="float64")
    bad = parsed.isna() & values.notna()
    if bad.any():
        first = values[bad].iloc[0]
        raise DataError(f"Unparseable {time_format} timestamp {first!r} ({int(bad.sum())} cells)")
    return parsed.to_numpy(dtype=np.float64)


@dataclass(frozen=True)
class RelationDiagnostics:
    """Null and dangling counts for one foreign-key relation."""

    table: str
    column: str
    references_table: str
    null_count: int
    dangling_count: int


@dataclass
class Table:
    """One loaded table.

    Key columns hold strings (None for nulls); numeric columns hold float64 with
    NaN for nulls; categorical and text columns hold strings.
    """

    spec: TableSpec
    frame: pd.DataFrame
    pk_index: pd.Index
    timestamps: np.ndarray | None = None
    unparseable: dict[str, int] = field(default_factory=dict)

    @property
    def name(self) -> str:
        return self.spec.name

    @property
    def n_rows(self) -> int:
        return len(self.frame)

    def column(self, name: str) -> np.ndarray:
        if name not in self.frame.columns:
            raise MissingColumn(f"Table {self.name!r} has no column {name!r}")
        return self.frame[name].to_numpy()

    def rows_of(self, keys) -> np.ndarray:
        """Row index of each primary-key value; -1 for null or unresolved keys."""
        keys = pd.Index(pd.Series(keys, dtype="object").map(_normalize_key))
        return self.pk_index.get_indexer(keys)


@dataclass
class Database:
    """A validated schema plus its loaded tables."""

    schema: Schema
    tables: dict[str, Table]
    relations: list[RelationDiagnostics] = field(default_factory=list)

    def table(self, name: str) -> Table:
        self.schema.table(name)
        return self.tables[name]

    def fk_targets(self, table: str, column: str) -> np.ndarray:
        """Referenced row index per row of `table` along FK `column` (-1 when null or dangling)."""
        spec = self.schema.table(table)
        for fk in spec.foreign_keys:
            if fk.column == column:
                return self.tables[fk.references_table].rows_of(self.tables[table].frame[column])
        raise MissingColumn(f"{table}.{column} is not a foreign key")

    @property
    def total_rows(self) -> int:
        return sum(t.n_rows for t in self.tables.values())

    def diagnostics(self) -> dict:
        return {
            "rows": {name: t.n_rows for name, t in self.tables.items()},
            "relations": [
                {
                    "relation": f"{r.table}.{r.column}->{r.references_table}",
                    "null": r.null_count,
                    "dangling": r.dangling_count,
                }
                for r in self.relations
            ],
            "unparseable": {
                f"{name}.{column}": count
                for name, t in self.tables.items()
                for column, count in t.unparseable.items()
                if count
            },
        }

    @classmethod
    def from_frames(cls, schema: Schema, frames: dict[str, pd.DataFrame]) -> "Database":
        """Build a database from raw string frames, one per schema table."""
        tables = {}
        for spec in schema.tables:
            if spec.name not in frames:
                raise DataError(f"No data for table {spec.name!r}")
            tables[spec.name] = _build_table(spec, frames[spec.name])

        relations = []
        for spec in schema.tables:
            frame = tables[spec.name].frame
            for fk in spec.foreign_keys:
                values = frame[fk.column]
                nulls = int(values.isna().sum())
                resolved = tables[fk.references_table].rows_of(values)
                dangling = int(((resolved < 0) & values.notna().to_numpy()).sum())
                relations.append(RelationDiagnostics(spec.name, fk.column, fk.references_table, nulls, dangling))
                if dangling:
                    logger.warning(
                        "%d dangling foreign keys in %s.%s -> %s", dangling, spec.name, fk.column, fk.references_table
                    )

        return cls(schema=schema, tables=tables, relations=relations)


def _build_table(spec: TableSpec, raw: pd.DataFrame) -> Table:
    raw = raw.reset_index(drop=True)
    missing = [name for name in spec.required_columns if name not in raw.columns]
    if missing:
        raise MissingColumn(f"Table {spec.name!r} is missing columns: {', '.join(missing)}")

    extra = [name for name in raw.columns if name not in spec.required_columns]
    if extra:
        logger.warning("Ignoring undeclared columns in %s: %s", spec.name, ", ".join(map(str, extra)))

    frame = pd.DataFrame(index=pd.RangeIndex(len(raw)))
    unparseable: dict[str, int] = {}

    for name in spec.required_columns:
        column = raw[name].astype("object").map(_normalize_key)
        if name in spec.key_columns or spec.column_kind(name) != "numeric":
            frame[name] = column
            continue

        numeric = pd.to_numeric(column, errors="coerce")
        failed = int((numeric.isna() & column.notna()).sum())
        if failed:
            logger.warning("%d unparseable numeric cells in %s.%s recorded as null", failed, spec.name, name)
        unparseable[name] = failed
        frame[name] = numeric.astype("float64")

    pk = frame[spec.primary_key]
    if pk.isna().any():
        raise DataError(f"Table {spec.name!r} has null primary key values")
    duplicated = pk[pk.duplicated()]
    if len(duplicated):
        raise DuplicatePrimaryKey(f"Duplicate primary key {duplicated.iloc[0]!r} in table {spec.name!r}")

    timestamps = None
    if spec.time_column:
        timestamps = parse_timestamps(frame[spec.time_column], spec.time_format)

    return Table(spec=spec, frame=frame, pk_index=pd.Index(pk), timestamps=timestamps, unparseable=unparseable)


def load_database(schema: Schema, directory: Path | str) -> Database:
    """Load every table file of `schema` from `directory`."""
    directory = Path(directory)
    frames = {}
    for spec in schema.tables:
        path = directory / spec.file
        if not path.is_file():
            raise DataError(f"Table file {path} does not exist")
        frames[spec.name] = pd.read_csv(
            path, dtype=str, keep_default_na=False, na_filter=False, encoding="utf-8", skipinitialspace=False
        )
        logger.debug("Read %d rows from %s", len(frames[spec.name]), path)

    return Database.from_frames(schema, frames)
