"""CSV ingestion and export for annual series.

Schema: two columns ``year,value`` with a header row, UTF-8, integer years,
decimal values, and ``NA`` for missing entries. Exported files re-parse to an
equal series (floats are written in round-trip precision).
"""

from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

from .exceptions import CsvParseError, DuplicateYearError
from .series import TimeSeries


def load_csv(path, name: str | None = None, unit: str = "unknown") -> TimeSeries:
    """Parse one ``year,value`` CSV into a TimeSeries.

    ``name`` defaults to the file stem. Raises :class:`CsvParseError` with the
    offending line number on malformed input and :class:`DuplicateYearError`
    if a year appears twice.
    """
    path = Path(path)
    years: list[int] = []
    values: list[float] = []
    seen: dict[int, int] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CsvParseError(f"{path}: empty file", line_number=1) from None
        if [h.strip().lower() for h in header[:2]] != ["year", "value"]:
            raise CsvParseError(
                f"{path}: expected header 'year,value', got {','.join(header)!r}",
                line_number=1,
            )
        for line_no, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 2:
                raise CsvParseError(
                    f"{path}: expected 2 fields on line {line_no}, got {len(row)}",
                    line_number=line_no,
                )
            try:
                year = int(row[0])
            except ValueError:
                raise CsvParseError(
                    f"{path}: bad year {row[0]!r} on line {line_no}",
                    line_number=line_no,
                ) from None
            raw = row[1].strip()
            if raw.upper() in ("NA", "NAN", ""):
                value = math.nan
            else:
                try:
                    value = float(raw)
                except ValueError:
                    raise CsvParseError(
                        f"{path}: bad value {row[1]!r} on line {line_no}",
                        line_number=line_no,
                    ) from None
            if year in seen:
                raise DuplicateYearError(
                    f"{path}: year {year} on line {line_no} already appeared "
                    f"on line {seen[year]}"
                )
            seen[year] = line_no
            years.append(year)
            values.append(value)
    if not years:
        raise CsvParseError(f"{path}: no data rows", line_number=2)
    order = np.argsort(years)
    return TimeSeries(
        name=name or path.stem,
        unit=unit,
        times=np.asarray(years)[order],
        values=np.asarray(values)[order],
    )


def write_csv(series: TimeSeries, path) -> None:
    """Write a series in the standard schema; NaN becomes ``NA``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["year", "value"])
        for year, value in zip(series.times, series.values):
            writer.writerow([int(year), "NA" if math.isnan(value) else repr(float(value))])
