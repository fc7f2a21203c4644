"""Price-series CSV ingestion and moment estimation from daily changes."""

from __future__ import annotations

import csv
import math
import statistics
from dataclasses import dataclass
from pathlib import Path

from .core import MomentSpec
from .errors import ParseError, TooFewRows


@dataclass(frozen=True)
class PriceSeries:
    dates: tuple[str, ...]
    closes: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.dates) != len(self.closes):
            raise ValueError("dates and closes differ in length")
        if len(self.closes) < 2:
            raise TooFewRows(f"need at least 2 rows, got {len(self.closes)}")

    @property
    def daily_changes(self) -> tuple[float, ...]:
        return tuple(b - a for a, b in zip(self.closes[:-1], self.closes[1:]))


def read_price_csv(path: str | Path, date_column: str = "date", close_column: str = "close") -> PriceSeries:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for col in (date_column, close_column):
            if col not in header:
                raise ParseError(f"missing column {col!r}; header is {header}", row=1, column=col)
        dates: list[str] = []
        closes: list[float] = []
        for row_no, row in enumerate(reader, start=2):
            date = (row.get(date_column) or "").strip()
            raw = (row.get(close_column) or "").strip()
            if not date:
                raise ParseError("empty date", row=row_no, column=date_column)
            try:
                close = float(raw)
            except ValueError:
                raise ParseError(f"non-numeric close {raw!r}", row=row_no, column=close_column) from None
            if not math.isfinite(close):
                raise ParseError(f"non-finite close {raw!r}", row=row_no, column=close_column)
            if dates and date <= dates[-1]:
                raise ParseError(f"date {date!r} does not increase", row=row_no, column=date_column)
            dates.append(date)
            closes.append(close)
    return PriceSeries(tuple(dates), tuple(closes))


def estimate_moments(series: PriceSeries, population: bool = False) -> MomentSpec:
    """Mean and standard deviation of the daily changes (sample std unless ``population``)."""
    changes = series.daily_changes
    if not population and len(changes) < 2:
        raise TooFewRows("sample standard deviation needs at least 3 prices")
    mean = statistics.fmean(changes)
    std = statistics.pstdev(changes) if population else statistics.stdev(changes)
    return MomentSpec(mean, std)


def ingest_prices(
    path: str | Path, date_column: str = "date", close_column: str = "close", population: bool = False
) -> tuple[PriceSeries, MomentSpec]:
    series = read_price_csv(path, date_column, close_column)
    return series, estimate_moments(series, population)
