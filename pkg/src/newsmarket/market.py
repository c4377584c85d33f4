"""Closing-price series and the trading calendar they imply."""

from __future__ import annotations

import csv
import datetime as dt
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Union

import numpy as np

from .exceptions import DataValidationError

DateLike = Union[dt.date, str]


def parse_date(value: DateLike) -> dt.date:
    if isinstance(value, dt.datetime):
        return value.date()
    if isinstance(value, dt.date):
        return value
    try:
        return dt.date.fromisoformat(str(value).strip())
    except ValueError as exc:
        raise DataValidationError(f"unparseable date {value!r}") from exc


@dataclass(frozen=True)
class PricePoint:
    date: dt.date
    close: float

    def __post_init__(self):
        if not isinstance(self.date, dt.date):
            raise DataValidationError(f"invalid date {self.date!r}")
        if not np.isfinite(self.close) or self.close <= 0:
            raise DataValidationError(f"non-positive close {self.close!r} on {self.date}")


@dataclass(frozen=True)
class PriceSeries:
    """Immutable, strictly date-increasing sequence of closes.

    Lags are counted in trading days (positions in the series), never in
    calendar days. Dates absent from the series are non-trading dates.
    """

    points: tuple[PricePoint, ...]
    _index: dict = field(init=False, repr=False, compare=False)
    _closes: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        points = tuple(self.points)
        if not points:
            raise DataValidationError("price series is empty")
        index = {}
        for pos, point in enumerate(points):
            if point.date in index:
                raise DataValidationError(f"duplicate date {point.date.isoformat()}")
            if pos and point.date < points[pos - 1].date:
                raise DataValidationError(
                    f"out-of-order date {point.date.isoformat()} after "
                    f"{points[pos - 1].date.isoformat()}"
                )
            index[point.date] = pos
        closes = np.array([p.close for p in points], dtype=float)
        closes.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_closes", closes)

    def __len__(self) -> int:
        return len(self.points)

    @property
    def dates(self) -> tuple[dt.date, ...]:
        return tuple(p.date for p in self.points)

    @property
    def closes(self) -> np.ndarray:
        """Read-only float array of closes in date order."""
        return self._closes

    def position(self, date: DateLike) -> Optional[int]:
        """Trading-day index of ``date``, or None for a non-trading date."""
        return self._index.get(parse_date(date))

    def close_at(self, date: DateLike) -> Optional[float]:
        return close_at(self, date)

    def lag_close(self, date: DateLike, lag: int) -> Optional[float]:
        return lag_close(self, date, lag)


def load_prices(records: Iterable) -> PriceSeries:
    """Build a series from ``(date, close)`` records that are already sorted.

    Out-of-order or duplicate dates are rejected rather than re-sorted.
    """
    points = []
    for rec in records:
        if isinstance(rec, dict):
            raw_date, raw_close = rec["date"], rec["close"]
        else:
            raw_date, raw_close = rec
        try:
            close = float(raw_close)
        except (TypeError, ValueError) as exc:
            raise DataValidationError(f"non-numeric close {raw_close!r}") from exc
        points.append(PricePoint(parse_date(raw_date), close))
    return PriceSeries(tuple(points))


def read_prices_csv(path: Union[str, Path]) -> PriceSeries:
    """Read a ``date,close`` CSV with a header row."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"date", "close"} <= set(reader.fieldnames):
            raise DataValidationError(f"{path}: header must contain 'date,close'")
        return load_prices(reader)


def write_prices_csv(series: PriceSeries, path: Union[str, Path]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["date", "close"])
        for p in series.points:
            writer.writerow([p.date.isoformat(), repr(p.close)])


def close_at(series: PriceSeries, date: DateLike) -> Optional[float]:
    """The close on ``date``; None on weekends, holidays and out-of-range dates."""
    pos = series.position(date)
    return None if pos is None else float(series.closes[pos])


def lag_close(series: PriceSeries, date: DateLike, lag: int) -> Optional[float]:
    """The close ``lag`` trading days before ``date``."""
    if lag < 1:
        raise ValueError(f"lag must be >= 1, got {lag}")
    pos = series.position(date)
    if pos is None or pos < lag:
        return None
    return float(series.closes[pos - lag])
