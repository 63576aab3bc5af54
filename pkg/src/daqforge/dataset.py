"""Columnar tables loaded from CSV or JSON files.

Cells are plain Python values tagged by their runtime type: None (null),
str (text), int, float, bool, and datetime.date.  Columns are typed by the
source's declared metadata; a cell that cannot be coerced to its declared
type becomes null and bumps the column's parse-warning counter.

Coercion rules:
  CSV    an empty field is null; integer/number/boolean/date fields are
         parsed from the trimmed text (booleans accept true/false in any
         case, dates are ISO-8601 calendar dates); string keeps the raw
         field.
  JSON   the document must be an array of flat objects; a missing key and
         an explicit null both load as null; values must already have the
         declared type (ints are accepted into number columns and become
         floats; booleans never pass as integers or numbers; dates are
         ISO-8601 strings).
"""

from __future__ import annotations

import csv
import datetime
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

from daqforge.model import ColumnMeta, ColumnType, SourceKind

Cell = Union[None, str, int, float, bool, datetime.date]


class DataError(Exception):
    """Table loading failed: C001 missing column, C002 malformed file."""

    def __init__(self, code: str, message: str):
        self.code = code
        super().__init__(message)


@dataclass
class Dataset:
    name: str
    columns: dict[str, list[Cell]] = field(default_factory=dict)
    parse_warnings: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        lengths = {len(cells) for cells in self.columns.values()}
        if len(lengths) > 1:
            raise ValueError(f"ragged dataset: column lengths {sorted(lengths)}")

    @property
    def row_count(self) -> int:
        for cells in self.columns.values():
            return len(cells)
        return 0

    def column(self, name: str) -> list[Cell]:
        return self.columns[name]


def _coerce_csv(raw: str, ctype: ColumnType) -> tuple[Cell, bool]:
    """(value, ok); an empty field is a null, never a warning."""
    if raw == "":
        return None, True
    if ctype is ColumnType.STRING:
        return raw, True
    text = raw.strip()
    try:
        if ctype is ColumnType.INTEGER:
            return int(text), True
        if ctype is ColumnType.NUMBER:
            return float(text), True
        if ctype is ColumnType.BOOLEAN:
            lowered = text.lower()
            if lowered in ("true", "false"):
                return lowered == "true", True
            return None, False
        if ctype is ColumnType.DATE:
            return datetime.date.fromisoformat(text), True
    except ValueError:
        return None, False
    raise AssertionError(ctype)


def _coerce_json(value, ctype: ColumnType) -> tuple[Cell, bool]:
    if value is None:
        return None, True
    if ctype is ColumnType.STRING:
        return (value, True) if isinstance(value, str) else (None, False)
    if ctype is ColumnType.BOOLEAN:
        return (value, True) if isinstance(value, bool) else (None, False)
    if ctype is ColumnType.INTEGER:
        if isinstance(value, int) and not isinstance(value, bool):
            return value, True
        return None, False
    if ctype is ColumnType.NUMBER:
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            return float(value), True
        return None, False
    if ctype is ColumnType.DATE:
        if isinstance(value, str):
            try:
                return datetime.date.fromisoformat(value.strip()), True
            except ValueError:
                return None, False
        return None, False
    raise AssertionError(ctype)


def load_table(path: Union[str, Path], kind: SourceKind,
               metadata: list[ColumnMeta],
               name: Optional[str] = None) -> Dataset:
    """Load and type a table according to the declared column metadata."""
    path = Path(path)
    dataset_name = name if name is not None else path.stem
    if kind is SourceKind.CSVFILE:
        return _load_csv(path, metadata, dataset_name)
    if kind is SourceKind.JSONFILE:
        return _load_json(path, metadata, dataset_name)
    raise DataError("C002", f"source kind '{kind.value}' cannot be loaded "
                    "from a file")


def _load_csv(path: Path, metadata: list[ColumnMeta], name: str) -> Dataset:
    try:
        with open(path, newline="", encoding="utf-8") as handle:
            rows = list(csv.reader(handle))
    except (OSError, UnicodeDecodeError, csv.Error) as exc:
        raise DataError("C002", f"cannot read {path}: {exc}") from exc
    if not rows:
        raise DataError("C002", f"{path}: empty file, header row required")

    header = rows[0]
    positions: dict[str, int] = {}
    for col in metadata:
        if col.name not in header:
            raise DataError("C001", f"{path}: declared column '{col.name}' "
                            "missing from header")
        positions[col.name] = header.index(col.name)

    columns: dict[str, list[Cell]] = {col.name: [] for col in metadata}
    warnings = {col.name: 0 for col in metadata}
    for row in rows[1:]:
        for col in metadata:
            pos = positions[col.name]
            raw = row[pos] if pos < len(row) else ""
            value, ok = _coerce_csv(raw, col.type)
            if not ok:
                warnings[col.name] += 1
            columns[col.name].append(value)
    return Dataset(name=name, columns=columns, parse_warnings=warnings)


def _load_json(path: Path, metadata: list[ColumnMeta], name: str) -> Dataset:
    try:
        with open(path, encoding="utf-8") as handle:
            doc = json.load(handle)
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise DataError("C002", f"cannot read {path}: {exc}") from exc
    if not isinstance(doc, list):
        raise DataError("C002", f"{path}: top level must be an array of objects")

    columns: dict[str, list[Cell]] = {col.name: [] for col in metadata}
    warnings = {col.name: 0 for col in metadata}
    for i, item in enumerate(doc):
        if not isinstance(item, dict):
            raise DataError("C002", f"{path}: array item {i} is not an object")
        for col in metadata:
            value, ok = _coerce_json(item.get(col.name), col.type)
            if not ok:
                warnings[col.name] += 1
            columns[col.name].append(value)
    return Dataset(name=name, columns=columns, parse_warnings=warnings)
