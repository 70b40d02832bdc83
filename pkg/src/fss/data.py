"""Sales and calendar ingestion producing validated per-product daily series.

Dates are ISO-8601 strings in files and day-ordinal integers internally
(``datetime.date.toordinal``), which keeps day-of-week and day-of-year
arithmetic unambiguous.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass
from datetime import date
from pathlib import Path
from typing import Iterable, Iterator, Mapping

import numpy as np

from .errors import ParseError, ValidationError

SALES_HEADER = ("product_id", "date", "sales")
CALENDAR_HEADER = ("date", "event_1", "event_2")
MAX_EVENTS_PER_DATE = 2
DEFAULT_HORIZON_DAYS = 14


class DuplicateDateWarning(UserWarning):
    """A calendar date appeared on more than one row; the last row wins."""


def day_from_iso(text: str) -> int:
    return date.fromisoformat(text).toordinal()


def iso_from_day(day: int) -> str:
    return date.fromordinal(int(day)).isoformat()


def weekday_of(day: int | np.ndarray):
    """Weekday for a day ordinal, Monday = 0 (ordinal 1 is a Monday)."""
    return (day - 1) % 7


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Consecutive daily sales observations for one product."""

    product_id: str
    start_day: int
    sales: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.sales, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise ValidationError(f"{self.product_id}: series must be a non-empty 1-d sequence")
        if not np.all(np.isfinite(arr)):
            raise ValidationError(f"{self.product_id}: sales contain non-finite values")
        if np.any(arr < 0):
            raise ValidationError(f"{self.product_id}: negative sales value")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "sales", arr)
        object.__setattr__(self, "start_day", int(self.start_day))

    def __len__(self) -> int:
        return int(self.sales.size)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TimeSeries):
            return NotImplemented
        return (
            self.product_id == other.product_id
            and self.start_day == other.start_day
            and np.array_equal(self.sales, other.sales)
        )

    @property
    def end_day(self) -> int:
        return self.start_day + len(self) - 1

    @property
    def days(self) -> np.ndarray:
        return np.arange(self.start_day, self.start_day + len(self))

    def slice(self, start: int, stop: int) -> "TimeSeries":
        """Positional sub-series covering ``sales[start:stop]``."""
        if not 0 <= start < stop <= len(self):
            raise ValidationError(f"{self.product_id}: invalid slice [{start}:{stop}]")
        return TimeSeries(self.product_id, self.start_day + start, self.sales[start:stop])

    def iter_points(self) -> Iterator[tuple[int, float]]:
        for i, value in enumerate(self.sales):
            yield self.start_day + i, float(value)


@dataclass(frozen=True)
class EventCalendar:
    """Map from day ordinal to the (at most two) event names on that day."""

    entries: Mapping[int, tuple[str, ...]]

    def __post_init__(self):
        checked: dict[int, tuple[str, ...]] = {}
        for day, names in self.entries.items():
            names = tuple(names)
            if not names:
                continue
            if len(names) > MAX_EVENTS_PER_DATE:
                raise ValidationError(
                    f"{iso_from_day(day)}: {len(names)} events, at most {MAX_EVENTS_PER_DATE} allowed"
                )
            if any(not n for n in names):
                raise ValidationError(f"{iso_from_day(day)}: empty event name")
            checked[int(day)] = names
        object.__setattr__(self, "entries", checked)

    def events_on(self, day: int) -> tuple[str, ...]:
        return self.entries.get(int(day), ())

    def names_within(self, days: Iterable[int]) -> tuple[str, ...]:
        """Sorted distinct event names occurring on the given days."""
        found = {name for day in days for name in self.events_on(day)}
        return tuple(sorted(found))

    def occurrences(self, name: str) -> tuple[int, ...]:
        return tuple(sorted(d for d, names in self.entries.items() if name in names))


@dataclass(frozen=True, eq=False)
class ForecastTask:
    """A history to extrapolate plus the held-out actuals for the horizon."""

    history: TimeSeries
    horizon_days: int
    truth: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.truth, dtype=float)
        if self.horizon_days < 1 or arr.size != self.horizon_days:
            raise ValidationError("horizon_days must be positive and equal to len(truth)")
        if not np.all(np.isfinite(arr)):
            raise ValidationError("truth contains non-finite values")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "truth", arr)
        object.__setattr__(self, "horizon_days", int(self.horizon_days))

    @property
    def truth_days(self) -> np.ndarray:
        start = self.history.end_day + 1
        return np.arange(start, start + self.horizon_days)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ForecastTask):
            return NotImplemented
        return (
            self.history == other.history
            and self.horizon_days == other.horizon_days
            and np.array_equal(self.truth, other.truth)
        )


def split_task(series: TimeSeries, horizon_days: int = DEFAULT_HORIZON_DAYS) -> ForecastTask:
    """Split off the last ``horizon_days`` observations as held-out truth."""
    if horizon_days < 1:
        raise ValidationError("horizon_days must be positive")
    if len(series) <= horizon_days:
        raise ValidationError(
            f"{series.product_id}: series of length {len(series)} too short for a "
            f"{horizon_days}-day horizon"
        )
    cut = len(series) - horizon_days
    return ForecastTask(series.slice(0, cut), horizon_days, series.sales[cut:])


def _parse_day(text: str, line: int) -> int:
    try:
        return day_from_iso(text)
    except ValueError as exc:
        raise ParseError(f"bad date {text!r}: {exc}", line=line) from None


def load_sales_csv(path: str | Path) -> list[TimeSeries]:
    """Load long-format sales rows, grouped per product and date-sorted.

    Gaps in the daily grid are a hard error: the model assumes consecutive
    observations, and silent imputation would corrupt the fit.
    """
    path = Path(path)
    per_product: dict[str, list[tuple[int, float]]] = {}
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != SALES_HEADER:
            raise ParseError(f"expected header {','.join(SALES_HEADER)}", line=1)
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise ParseError(f"expected 3 fields, got {len(row)}", line=line_no)
            product, date_text, sales_text = (cell.strip() for cell in row)
            if not product:
                raise ParseError("empty product_id", line=line_no)
            day = _parse_day(date_text, line_no)
            try:
                value = float(sales_text)
            except ValueError:
                raise ParseError(f"bad sales value {sales_text!r}", line=line_no) from None
            if not np.isfinite(value) or value < 0:
                raise ValidationError(
                    f"{product} {date_text}: sales must be a non-negative number, got {sales_text}"
                )
            per_product.setdefault(product, []).append((day, value))

    out: list[TimeSeries] = []
    for product in sorted(per_product):
        points = sorted(per_product[product])
        days = [d for d, _ in points]
        for prev, cur in zip(days, days[1:]):
            if cur == prev:
                raise ValidationError(f"{product}: duplicate date {iso_from_day(cur)}")
            if cur != prev + 1:
                raise ValidationError(
                    f"{product}: gap in dates after {iso_from_day(prev)} "
                    f"(next observation {iso_from_day(cur)})"
                )
        out.append(TimeSeries(product, days[0], np.array([v for _, v in points])))
    return out


def _format_sales(value: float) -> str:
    if float(value).is_integer():
        return str(int(value))
    return repr(float(value))


def dump_sales_csv(series: Iterable[TimeSeries], path: str | Path) -> None:
    """Write series back to the canonical long format (round-trips losslessly)."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(SALES_HEADER)
        for ts in series:
            for day, value in ts.iter_points():
                writer.writerow([ts.product_id, iso_from_day(day), _format_sales(value)])


def load_calendar_csv(path: str | Path) -> EventCalendar:
    """Load the event calendar; duplicate date rows are replaced (last wins)."""
    path = Path(path)
    entries: dict[int, tuple[str, ...]] = {}
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != CALENDAR_HEADER:
            raise ParseError(f"expected header {','.join(CALENDAR_HEADER)}", line=1)
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise ParseError(f"expected 3 fields, got {len(row)}", line=line_no)
            day = _parse_day(row[0].strip(), line_no)
            names = tuple(cell.strip() for cell in row[1:] if cell.strip())
            if day in entries:
                warnings.warn(
                    DuplicateDateWarning(
                        f"{path.name} line {line_no}: duplicate calendar date "
                        f"{iso_from_day(day)}, last row wins"
                    ),
                    stacklevel=2,
                )
                entries.pop(day)
            if names:
                entries[day] = names
    return EventCalendar(entries)


def dump_calendar_csv(calendar: EventCalendar, path: str | Path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CALENDAR_HEADER)
        for day in sorted(calendar.entries):
            names = list(calendar.entries[day]) + ["", ""]
            writer.writerow([iso_from_day(day), names[0], names[1]])


def convert_m5_sales(
    sales_path: str | Path,
    calendar_path: str | Path,
    out_path: str | Path,
    items: Iterable[str] | None = None,
) -> int:
    """Melt an M5-style wide sales file (columns ``d_1..d_N``) to long format.

    ``items`` filters by the wide file's ``id`` or ``item_id`` column. Returns
    the number of long rows written. The M5 calendar supplies the d-column to
    calendar-date mapping.
    """
    wanted = set(items) if items is not None else None
    day_dates: dict[str, str] = {}
    with Path(calendar_path).open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "d" not in reader.fieldnames or "date" not in reader.fieldnames:
            raise ParseError("M5 calendar must have 'date' and 'd' columns", line=1)
        for row in reader:
            day_dates[row["d"]] = row["date"]

    written = 0
    with Path(sales_path).open(newline="", encoding="utf-8") as src, Path(out_path).open(
        "w", newline="", encoding="utf-8"
    ) as dst:
        reader = csv.reader(src)
        header = next(reader, None)
        if header is None or "id" not in header:
            raise ParseError("M5 sales file must have an 'id' column", line=1)
        id_col = header.index("id")
        item_col = header.index("item_id") if "item_id" in header else None
        day_cols = [(i, name) for i, name in enumerate(header) if name.startswith("d_")]
        if not day_cols:
            raise ParseError("M5 sales file has no d_* day columns", line=1)
        writer = csv.writer(dst)
        writer.writerow(SALES_HEADER)
        for row in reader:
            keys = {row[id_col]}
            if item_col is not None:
                keys.add(row[item_col])
            if wanted is not None and not (keys & wanted):
                continue
            product = row[id_col]
            for i, name in day_cols:
                writer.writerow([product, day_dates[name], row[i]])
                written += 1
    return written


def convert_m5_calendar(calendar_path: str | Path, out_path: str | Path) -> int:
    """Extract ``date,event_1,event_2`` rows from an M5 calendar file."""
    written = 0
    with Path(calendar_path).open(newline="", encoding="utf-8") as src, Path(out_path).open(
        "w", newline="", encoding="utf-8"
    ) as dst:
        reader = csv.DictReader(src)
        writer = csv.writer(dst)
        writer.writerow(CALENDAR_HEADER)
        for row in reader:
            events = [row.get("event_name_1", "").strip(), row.get("event_name_2", "").strip()]
            if any(events):
                writer.writerow([row["date"], events[0], events[1]])
                written += 1
    return written
