"""Synthetic retail-style demo data so the service and harness run out of the box."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .data import (
    EventCalendar,
    TimeSeries,
    day_from_iso,
    dump_calendar_csv,
    dump_sales_csv,
)

EVENT_NAMES = ("Promo Day", "Founders Day")


def synth_series(
    product_id: str,
    start_day: int,
    n_days: int,
    rng: np.random.Generator,
    event_days: dict[int, float],
) -> TimeSeries:
    t = np.arange(n_days, dtype=float)
    level = rng.uniform(60, 160) + rng.uniform(-0.05, 0.05) * t
    kink = int(rng.integers(n_days // 3, 2 * n_days // 3))
    level += rng.uniform(-0.08, 0.08) * np.maximum(0.0, t - kink)
    weekly_pattern = rng.normal(0, rng.uniform(3, 12), size=7)
    weekly_pattern -= weekly_pattern.mean()
    weekly = weekly_pattern[(np.arange(start_day, start_day + n_days) - 1) % 7]
    yearly = rng.uniform(5, 25) * np.sin(
        2 * np.pi * (np.arange(start_day, start_day + n_days) % 365.25) / 365.25
        + rng.uniform(0, 2 * np.pi)
    )
    events = np.zeros(n_days)
    for day, boost in event_days.items():
        idx = day - start_day
        if 0 <= idx < n_days:
            events[idx] = boost
    noise = rng.normal(0, rng.uniform(2, 6), size=n_days)
    values = np.maximum(0.0, np.round(level + weekly + yearly + events + noise))
    return TimeSeries(product_id, start_day, values)


def synth_dataset(
    out_dir: str | Path,
    n_products: int = 3,
    n_days: int = 420,
    seed: int = 7,
    start: str = "2015-01-01",
) -> tuple[Path, Path]:
    """Write ``sales.csv`` and ``calendar.csv`` for a small synthetic shop."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    start_day = day_from_iso(start)

    entries: dict[int, tuple[str, ...]] = {}
    event_days: dict[int, float] = {}
    for i, name in enumerate(EVENT_NAMES):
        offset = 30 + 45 * i
        for day in range(start_day + offset, start_day + n_days, 90):
            entries.setdefault(day, ())
            entries[day] = entries[day] + (name,)
            event_days[day] = event_days.get(day, 0.0) + rng.uniform(25, 50)
    calendar = EventCalendar(entries)

    series = [
        synth_series(f"PRODUCT_{i + 1:02d}", start_day, n_days, rng, event_days)
        for i in range(n_products)
    ]
    sales_path = out_dir / "sales.csv"
    calendar_path = out_dir / "calendar.csv"
    dump_sales_csv(series, sales_path)
    dump_calendar_csv(calendar, calendar_path)
    return sales_path, calendar_path
