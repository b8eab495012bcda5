"""Tick-data ingestion and serialization.

File format: CSV with header ``day,timestamp,log_price``; timestamps are
seconds from the open and must be strictly increasing within a day after
deduplication.  Lines starting with ``#`` are comments (output files carry a
convention note there).  Floats are written with 17 significant digits so a
write/read round trip is exact.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

__all__ = ["TickDay", "IngestResult", "ingest_csv", "write_csv", "fmt_float"]

HEADER = ("day", "timestamp", "log_price")


def fmt_float(x: float) -> str:
    """Format with 17 significant digits (round-trip exact for float64)."""
    return format(float(x), ".17g")


@dataclass(frozen=True)
class TickDay:
    """One day of ticks: identifier plus parallel timestamp/log-price arrays."""

    day: str
    timestamps: np.ndarray
    log_prices: np.ndarray

    def __post_init__(self):
        ts = np.asarray(self.timestamps, dtype=float)
        lp = np.asarray(self.log_prices, dtype=float)
        if ts.shape != lp.shape or ts.ndim != 1:
            raise ValueError("timestamps and log_prices must be 1-d and same length")
        if ts.size and np.any(np.diff(ts) <= 0):
            raise ValueError(f"day {self.day}: timestamps not strictly increasing")
        if not (np.all(np.isfinite(ts)) and np.all(np.isfinite(lp))):
            raise ValueError(f"day {self.day}: non-finite entries")
        object.__setattr__(self, "timestamps", ts)
        object.__setattr__(self, "log_prices", lp)

    def __len__(self) -> int:
        return self.timestamps.size


class IngestResult(NamedTuple):
    days: list[TickDay]
    n_duplicates: int


def ingest_csv(path: str) -> IngestResult:
    """Read tick data grouped by day.

    Rows are grouped by day identifier and stably sorted by timestamp;
    duplicate timestamps within a day keep the last row read and are counted
    in ``n_duplicates``.  Malformed rows raise ``ValueError`` with the line
    number; an empty file yields an empty list.
    """
    per_day: dict[str, dict[float, float]] = {}
    order: list[str] = []
    n_dup = 0
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header_seen = False
        for lineno, row in enumerate(reader, start=1):
            if not row or (row[0].lstrip().startswith("#")):
                continue
            if not header_seen:
                if tuple(c.strip() for c in row) != HEADER:
                    raise ValueError(
                        f"line {lineno}: expected header {','.join(HEADER)!r}, got {','.join(row)!r}"
                    )
                header_seen = True
                continue
            if len(row) != 3:
                raise ValueError(f"line {lineno}: expected 3 fields, got {len(row)}")
            day = row[0].strip()
            try:
                ts = float(row[1])
                lp = float(row[2])
            except ValueError as err:
                raise ValueError(f"line {lineno}: {err}") from None
            if not (np.isfinite(ts) and np.isfinite(lp)):
                raise ValueError(f"line {lineno}: non-finite value")
            if day not in per_day:
                per_day[day] = {}
                order.append(day)
            if ts in per_day[day]:
                n_dup += 1
            per_day[day][ts] = lp
    days = []
    for day in order:
        items = sorted(per_day[day].items())
        ts = np.array([t for t, _ in items])
        lp = np.array([p for _, p in items])
        days.append(TickDay(day=day, timestamps=ts, log_prices=lp))
    return IngestResult(days=days, n_duplicates=n_dup)


def write_csv(path: str, days: Iterable[TickDay], notes: Iterable[str] = ()) -> None:
    """Write tick data; ``notes`` become leading ``#`` comment lines."""
    with open(path, "w", newline="") as fh:
        for note in notes:
            fh.write(f"# {note}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(HEADER)
        for d in days:
            for ts, lp in zip(d.timestamps, d.log_prices):
                writer.writerow([d.day, fmt_float(ts), fmt_float(lp)])
