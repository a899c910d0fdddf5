"""CSV ingestion with row-accurate diagnostics.

Row numbers in errors are file line numbers: the header is line 1.
"""

from __future__ import annotations

import hashlib
import logging
import math
from collections.abc import Iterator, Mapping
from dataclasses import dataclass
from pathlib import Path

import pandas as pd

from .errors import GapInYears, IoFailure, SchemaError
from .series import Series

logger = logging.getLogger(__name__)

YEAR_COLUMN = "year"


@dataclass(frozen=True)
class Dataset:
    """Series read from one CSV file, keyed by series name."""

    series: Mapping[str, Series]
    sha256: str
    source: Path

    def __getitem__(self, name: str) -> Series:
        try:
            return self.series[name]
        except KeyError:
            raise KeyError(f"no series {name!r} in {self.source}; have {sorted(self.series)}") from None

    def __iter__(self) -> Iterator[str]:
        return iter(self.series)

    def __len__(self) -> int:
        return len(self.series)

    @property
    def start_year(self) -> int:
        return next(iter(self.series.values())).start_year

    @property
    def end_year(self) -> int:
        return next(iter(self.series.values())).end_year


def file_sha256(path: Path) -> str:
    try:
        return hashlib.sha256(Path(path).read_bytes()).hexdigest()
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc


def _parse_years(raw: pd.Series) -> list[int]:
    years = []
    for index, cell in raw.items():
        line = int(index) + 2
        try:
            years.append(int(str(cell).strip()))
        except ValueError:
            raise SchemaError(f"year {cell!r} is not an integer", row=line, column=YEAR_COLUMN) from None
    seen: dict[int, int] = {}
    for index, year in enumerate(years):
        if year in seen:
            raise SchemaError(f"year {year} repeats line {seen[year]}", row=index + 2, column=YEAR_COLUMN)
        seen[year] = index + 2
    for index in range(1, len(years)):
        if years[index] < years[index - 1]:
            raise SchemaError("years are not increasing", row=index + 2, column=YEAR_COLUMN)
        if years[index] != years[index - 1] + 1:
            raise GapInYears(years[index - 1] + 1)
    return years


def _parse_values(raw: pd.Series, column: str) -> list[float]:
    values = []
    for index, cell in raw.items():
        text = str(cell).strip()
        try:
            value = float(text)
        except ValueError:
            raise SchemaError(f"value {text!r} is not numeric", row=int(index) + 2, column=column) from None
        if not math.isfinite(value):
            raise SchemaError(f"value {text!r} is not finite", row=int(index) + 2, column=column)
        values.append(value)
    return values


def ingest_csv(path: Path | str, schema: Mapping[str, str] | None = None) -> Dataset:
    """Read ``path`` into one :class:`Series` per mapped column.

    ``schema`` maps series names to CSV column names; without it every
    column except ``year`` becomes a series under its own name.
    """
    path = Path(path)
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, skipinitialspace=True, encoding="utf-8")
    except FileNotFoundError as exc:
        raise IoFailure(f"data file {path} does not exist") from exc
    except (OSError, UnicodeDecodeError) as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    except pd.errors.ParserError as exc:
        raise SchemaError(f"malformed CSV: {exc}") from exc
    except pd.errors.EmptyDataError as exc:
        raise SchemaError(f"{path} is empty") from exc

    frame.columns = [str(c).strip() for c in frame.columns]
    if YEAR_COLUMN not in frame.columns:
        raise SchemaError(f"header has no {YEAR_COLUMN!r} column", row=1)
    if frame.empty:
        raise SchemaError(f"{path} has a header but no data rows", row=2)
    if schema is None:
        schema = {c: c for c in frame.columns if c != YEAR_COLUMN}
    missing = [column for column in schema.values() if column not in frame.columns]
    if missing:
        raise SchemaError(f"header lacks columns {missing}", row=1, column=missing[0])

    years = _parse_years(frame[YEAR_COLUMN])
    series = {
        name: Series(name, years[0], _parse_values(frame[column], column)) for name, column in schema.items()
    }
    digest = file_sha256(path)
    logger.info(
        "Read %d series over %d-%d from %s (sha256 %s)",
        len(series),
        years[0],
        years[-1],
        path,
        digest[:12],
    )
    return Dataset(series=series, sha256=digest, source=path)
