"""Return series container, CSV ingestion, chronological splits and back-casting."""

from __future__ import annotations

import csv
import datetime as _dt
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .exceptions import DegenerateSplit, DuplicateDate, EmptySeries, ParseError

VARIANCE_FLOOR = 1e-8


@dataclass(frozen=True, eq=False)
class ReturnSeries:
    """Dated log returns (percent units by convention), oldest first.

    Returns are used as-given: the conditional mean is taken to be zero, so
    each return is also the model innovation.
    """

    dates: np.ndarray
    returns: np.ndarray
    name: str = ""

    def __post_init__(self):
        dates = np.asarray(self.dates, dtype="datetime64[D]")
        returns = np.asarray(self.returns, dtype=float)
        if dates.ndim != 1 or returns.ndim != 1 or dates.shape != returns.shape:
            raise ValueError("dates and returns must be 1-D and of equal length")
        if len(returns) == 0:
            raise EmptySeries("a return series needs at least one observation")
        if not np.all(np.isfinite(returns)):
            raise ValueError("returns must be finite")
        if len(dates) > 1 and not np.all(dates[1:] > dates[:-1]):
            raise ValueError("dates must be strictly increasing")
        dates.flags.writeable = False
        returns.flags.writeable = False
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "returns", returns)

    def __len__(self) -> int:
        return len(self.returns)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ReturnSeries):
            return NotImplemented
        return (
            np.array_equal(self.dates, other.dates)
            and np.array_equal(self.returns, other.returns)
        )

    @classmethod
    def from_array(cls, returns, start: str = "2000-01-03", name: str = "") -> "ReturnSeries":
        """Wrap raw returns with consecutive business-day dates."""
        returns = np.asarray(returns, dtype=float)
        dates = np.busday_offset(np.datetime64(start, "D"), np.arange(len(returns)), roll="forward")
        return cls(dates, returns, name)

    def slice(self, start: int, stop: int | None = None) -> "ReturnSeries":
        return ReturnSeries(self.dates[start:stop], self.returns[start:stop], self.name)


def _parse_date(text: str) -> np.datetime64:
    return np.datetime64(_dt.date.fromisoformat(text.strip()), "D")


def load_returns(
    path,
    date_column: str = "date",
    return_column: str = "return",
    name: str | None = None,
) -> ReturnSeries:
    """Read a CSV with a header row into a date-sorted :class:`ReturnSeries`.

    Raises
    ------
    FileNotFoundError
        If ``path`` does not exist.
    ParseError
        On a missing column or an unparseable row (1-based data row number).
    DuplicateDate
        If two rows carry the same date.
    EmptySeries
        If the file has no data rows.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(path)
    dates, values = [], []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for col in (date_column, return_column):
            if col not in header:
                raise ParseError(0, f"missing column {col!r}")
        for row_no, row in enumerate(reader, start=1):
            try:
                d = _parse_date(row[date_column])
            except (TypeError, ValueError):
                raise ParseError(row_no, f"bad date {row[date_column]!r}") from None
            try:
                v = float(row[return_column])
            except (TypeError, ValueError):
                raise ParseError(row_no, f"non-numeric return {row[return_column]!r}") from None
            if not math.isfinite(v):
                raise ParseError(row_no, f"non-finite return {row[return_column]!r}")
            dates.append(d)
            values.append(v)
    if not values:
        raise EmptySeries(f"{path} has no data rows")
    dates = np.array(dates, dtype="datetime64[D]")
    values = np.array(values)
    order = np.argsort(dates, kind="stable")
    dates, values = dates[order], values[order]
    dup = np.nonzero(dates[1:] == dates[:-1])[0]
    if len(dup):
        raise DuplicateDate(str(dates[dup[0]]))
    return ReturnSeries(dates, values, name if name is not None else path.stem)


def write_returns(
    series: ReturnSeries,
    path,
    date_column: str = "date",
    return_column: str = "return",
) -> None:
    """Write ``series`` in the format read by :func:`load_returns`."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([date_column, return_column])
        for d, r in zip(series.dates, series.returns):
            # repr round-trips floats exactly
            writer.writerow([str(d), repr(float(r))])


def prices_to_returns(prices: Sequence[float], dates=None, scale: float = 100.0, name: str = ""):
    """Percent log returns ``scale * diff(log p)``; drops the first date."""
    prices = np.asarray(prices, dtype=float)
    if np.any(prices <= 0):
        raise ValueError("prices must be positive")
    rets = scale * np.diff(np.log(prices))
    if dates is None:
        return ReturnSeries.from_array(rets, name=name)
    return ReturnSeries(np.asarray(dates, dtype="datetime64[D]")[1:], rets, name)


def split_train_test(series: ReturnSeries, train_fraction: float = 0.75):
    """Chronological split: the first ``floor(T * train_fraction)`` points train."""
    if not 0.0 < train_fraction < 1.0:
        raise ValueError("train_fraction must lie in (0, 1)")
    n_train = int(math.floor(len(series) * train_fraction))
    if n_train < 1 or n_train >= len(series):
        raise DegenerateSplit(
            f"T={len(series)} with fraction {train_fraction} leaves an empty part"
        )
    return series.slice(0, n_train), series.slice(n_train)


def backcast_variance(series, n_lags: int = 1) -> float:
    """Mean squared return over the whole series, floored at ``VARIANCE_FLOOR``.

    ``n_lags`` is the number of pre-sample slots the value fills; the value
    itself does not depend on it.
    """
    if n_lags < 1:
        raise ValueError("n_lags must be positive")
    r = series.returns if isinstance(series, ReturnSeries) else np.asarray(series, dtype=float)
    if len(r) == 0:
        raise EmptySeries("cannot back-cast an empty series")
    value = float(np.mean(r * r))
    return value if value > 0.0 else VARIANCE_FLOOR
