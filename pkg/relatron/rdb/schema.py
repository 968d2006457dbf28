"""Schema descriptors for a relational database export."""

import json
import logging
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, Field, ValidationError

from ..errors import DuplicateTable, MissingColumn, SchemaError, UnknownColumnKind, UnknownTable

__all__ = "COLUMN_KINDS", "ColumnSpec", "ForeignKey", "TableSpec", "Schema", "load_schema"

logger = logging.getLogger(__name__)

COLUMN_KINDS = ("numeric", "categorical", "text")


class ColumnSpec(BaseModel):
    """A declared column and its kind."""

    model_config = {"frozen": True, "extra": "forbid"}

    name: str
    kind: Literal["numeric", "categorical", "text"]


class ForeignKey(BaseModel):
    """A foreign-key column and the table whose primary key it references."""

    model_config = {"frozen": True, "extra": "forbid"}

    column: str
    references_table: str


class TableSpec(BaseModel):
    """Table metadata: file, keys, time column and declared columns."""

    model_config = {"frozen": True, "extra": "forbid"}

    name: str = Field(..., pattern=r"^[A-Za-z_][A-Za-z0-9_]*$")
    file: str
    primary_key: str
    time_column: str | None = None
    time_format: Literal["iso", "epoch"] = "iso"
    foreign_keys: tuple[ForeignKey, ...] = ()
    columns: tuple[ColumnSpec, ...] = ()

    @property
    def fk_columns(self) -> tuple[str, ...]:
        return tuple(fk.column for fk in self.foreign_keys)

    @property
    def key_columns(self) -> set[str]:
        """Identifier columns that never become features."""
        keys = {self.primary_key, *self.fk_columns}
        if self.time_column:
            keys.add(self.time_column)
        return keys

    @property
    def required_columns(self) -> list[str]:
        """Every column the table file must provide, in declaration order."""
        names = [c.name for c in self.columns]
        for extra in (*self.fk_columns, self.time_column):
            if extra and extra not in names:
                names.append(extra)
        return names

    def column_kind(self, name: str) -> str | None:
        for column in self.columns:
            if column.name == name:
                return column.kind
        return None


class Schema(BaseModel):
    """Validated collection of table specs."""

    model_config = {"frozen": True, "extra": "forbid"}

    tables: tuple[TableSpec, ...]

    def table(self, name: str) -> TableSpec:
        for table in self.tables:
            if table.name == name:
                return table
        raise UnknownTable(f"Unknown table {name!r}")

    @property
    def table_names(self) -> list[str]:
        return [t.name for t in self.tables]

    @classmethod
    def from_dict(cls, data: dict) -> "Schema":
        """Validate a raw descriptor, raising the package's schema errors."""
        if not isinstance(data, dict) or not isinstance(data.get("tables"), list):
            raise SchemaError("Schema descriptor must be an object with a 'tables' array")

        for table in data["tables"]:
            for column in (table or {}).get("columns", []) or []:
                kind = (column or {}).get("kind")
                if kind not in COLUMN_KINDS:
                    raise UnknownColumnKind(
                        f"Column {table.get('name')}.{column.get('name')} has unknown kind {kind!r}; "
                        f"expected one of {', '.join(COLUMN_KINDS)}"
                    )

        try:
            schema = cls.model_validate(data)
        except ValidationError as e:
            raise SchemaError(f"Invalid schema descriptor: {e}") from e

        schema.check()
        return schema

    def check(self) -> None:
        """Check cross-table invariants."""
        seen: set[str] = set()
        for table in self.tables:
            if table.name in seen:
                raise DuplicateTable(f"Duplicate table name {table.name!r}")
            seen.add(table.name)

        for table in self.tables:
            column_names = {c.name for c in table.columns}
            if table.primary_key not in column_names:
                raise MissingColumn(f"Primary key {table.name}.{table.primary_key} is not a declared column")
            if table.time_column and table.time_column == table.primary_key:
                raise SchemaError(f"Table {table.name!r} uses its primary key as time column")
            for fk in table.foreign_keys:
                if fk.references_table not in seen:
                    raise UnknownTable(
                        f"Foreign key {table.name}.{fk.column} references unknown table {fk.references_table!r}"
                    )
                if fk.column == table.primary_key:
                    raise SchemaError(f"Foreign key {table.name}.{fk.column} is the table's own primary key")
            if len(set(table.fk_columns)) != len(table.fk_columns):
                raise SchemaError(f"Table {table.name!r} declares the same foreign key column twice")


def load_schema(path: Path | str) -> Schema:
    """Load and validate a `schema.json` descriptor."""
    path = Path(path)
    if not path.is_file():
        raise SchemaError(f"Schema file {path} does not exist")

    try:
        with path.open("r", encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise SchemaError(f"Schema file {path} is not valid JSON: {e}") from e

    schema = Schema.from_dict(data)
    logger.debug("Loaded schema %s with %d tables", path, len(schema.tables))
    return schema
