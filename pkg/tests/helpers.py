"""Shared test fixtures: synthetic generators and independent oracles.

The oracles here deliberately avoid the package's vectorized code paths:
the fit oracle builds its design matrix with plain loops and solves the
normal equations directly, and the metric oracle is straight-from-formula
Python arithmetic.
"""

from __future__ import annotations

import math

import numpy as np

from fss.data import EventCalendar, ForecastTask, TimeSeries, day_from_iso, split_task
from fss.model import FittedModel, ModelSpec, fourier_columns

WEEKLY_PERIOD = 7.0
YEARLY_PERIOD = 365.25

MONDAY_2014 = "2014-01-06"  # a Monday, so weekday arithmetic is easy to eyeball


def make_series(values, product: str = "P", start: str = MONDAY_2014) -> TimeSeries:
    return TimeSeries(product, day_from_iso(start), np.asarray(values, dtype=float))


def make_task(values, horizon: int = 14, **kwargs) -> ForecastTask:
    return split_task(make_series(values, **kwargs), horizon)


# ---------------------------------------------------------------------------
# Synthetic data generators


def recovery_series(
    seed: int,
    n_days: int = 744,  # two years of history plus a 14-day horizon
    level: float = 100.0,
    weekly_amp: float = 10.0,
    yearly_amp: float = 20.0,
    event_effect: float = 40.0,
    noise_sigma: float = 1.0,
) -> tuple[TimeSeries, EventCalendar, np.ndarray, str, float]:
    """Additive ground truth: flat level, +/- weekly, yearly sine, one event.

    Returns (series, calendar, true_weekly_by_weekday, event_name, effect).
    """
    rng = np.random.default_rng(seed)
    start = day_from_iso(MONDAY_2014)
    days = np.arange(start, start + n_days)

    weekly_true = np.zeros(7)
    weekly_true[5] = weekly_amp  # Saturday up
    weekly_true[0] = -weekly_amp  # Monday down
    weekly = weekly_true[(days - 1) % 7]
    yearly = yearly_amp * np.sin(2 * np.pi * (days % YEARLY_PERIOD) / YEARLY_PERIOD)

    event_name = "Promo"
    step = max(30, (n_days - 60) // 5)
    event_days = list(range(start + 40, start + n_days - 20, step))
    assert len(event_days) >= 3
    events = np.isin(days, event_days) * event_effect

    values = level + weekly + yearly + events + rng.normal(0, noise_sigma, n_days)
    series = TimeSeries("RECOVERY", start, np.maximum(values, 0.0))
    calendar = EventCalendar({d: (event_name,) for d in event_days})
    return series, calendar, weekly_true, event_name, event_effect


def seasonal_series(seed: int, n_days: int = 164) -> TimeSeries:
    """Strong weekly cycle over a flat level: easy for the model, hard for SES."""
    rng = np.random.default_rng(seed)
    start = day_from_iso(MONDAY_2014)
    days = np.arange(start, start + n_days)
    pattern = np.array([-20.0, -10.0, 0.0, 5.0, 10.0, 25.0, -10.0])
    values = 120.0 + pattern[(days - 1) % 7] + rng.normal(0, 3.0, n_days)
    return TimeSeries("SEASONAL", start, np.maximum(values, 0.0))


def random_walk_series(seed: int, n_days: int = 164) -> TimeSeries:
    """Pure-level random walk: SES territory."""
    rng = np.random.default_rng(seed)
    values = 200.0 + np.cumsum(rng.normal(0, 3.0, n_days))
    return TimeSeries("WALK", day_from_iso(MONDAY_2014), np.maximum(values, 0.0))


# ---------------------------------------------------------------------------
# Figure-style forced model: exact component values on one date


def forced_component_model(
    date_iso: str = "2016-05-30",
    level: float = 72.0,
    weekly_effect: float = -16.5,
    yearly_effect: float = -28.4,
    event_name: str = "Memorial Day",
    event_effect: float = 43.1,
) -> tuple[FittedModel, EventCalendar, int]:
    """A FittedModel whose components hit the given values on the given date."""
    day = day_from_iso(date_iso)

    # zero-mean weekly pattern with the target value on this date's weekday
    dow = (day - 1) % 7
    pattern = np.full(7, -weekly_effect / 6.0)
    pattern[dow] = weekly_effect
    basis7 = fourier_columns(np.arange(7, dtype=float), WEEKLY_PERIOD, 3)
    weekly_coeffs, *_ = np.linalg.lstsq(basis7, pattern, rcond=None)

    # order-1 yearly tuned to hit the target at this date's cycle position
    theta = 2 * np.pi * (day % YEARLY_PERIOD) / YEARLY_PERIOD
    yearly_coeffs = np.array([yearly_effect * np.cos(theta), yearly_effect * np.sin(theta)])

    model = FittedModel(
        origin_day=day - 100,
        base_intercept=level,
        base_slope=0.0,
        changepoint_days=np.empty(0, dtype=int),
        slope_deltas=np.empty(0),
        weekly_order=3,
        weekly_coeffs=weekly_coeffs,
        yearly_order=1,
        yearly_coeffs=yearly_coeffs,
        event_effects={event_name: event_effect},
        residual_std=0.0,
    )
    calendar = EventCalendar({day: (event_name,)})
    return model, calendar, day


# ---------------------------------------------------------------------------
# Independent oracles


def oracle_fit_parameters(task: ForecastTask, calendar: EventCalendar, spec: ModelSpec) -> np.ndarray:
    """Brute-force normal-equations solution of the same penalized problem.

    Built with explicit loops and solved as (X'X + D) b = X'y; shares no code
    with the production fit path beyond numpy's linear solver.
    """
    history = task.history
    n = len(history)
    days = [history.start_day + i for i in range(n)]

    eligible = math.floor(n * spec.changepoint_range)
    changepoints: list[int] = []
    if spec.n_changepoints > 0 and eligible >= 2:
        for j in range(1, spec.n_changepoints + 1):
            pos = round(j * (eligible - 1) / (spec.n_changepoints))
            if pos > 0 and pos not in changepoints:
                changepoints.append(pos)

    event_names = sorted({name for d in days for name in calendar.events_on(d)})

    rows = []
    for day in days:
        tau = day - history.start_day
        row = [1.0, float(tau)]
        for cp in changepoints:
            row.append(float(max(0, tau - cp)))
        for k in range(1, spec.weekly_order + 1):
            row.append(math.cos(2 * math.pi * k * ((day - 1) % 7) / 7.0))
        for k in range(1, spec.weekly_order + 1):
            row.append(math.sin(2 * math.pi * k * ((day - 1) % 7) / 7.0))
        for k in range(1, spec.yearly_order + 1):
            row.append(math.cos(2 * math.pi * k * (day % 365.25) / 365.25))
        for k in range(1, spec.yearly_order + 1):
            row.append(math.sin(2 * math.pi * k * (day % 365.25) / 365.25))
        present = calendar.events_on(day)
        for name in event_names:
            row.append(1.0 if name in present else 0.0)
        rows.append(row)

    design = np.array(rows)
    penalties = (
        [0.0, 0.0]
        + [spec.trend_penalty] * len(changepoints)
        + [spec.seasonal_penalty] * (2 * spec.weekly_order + 2 * spec.yearly_order)
        + [spec.event_penalty] * len(event_names)
    )
    lhs = design.T @ design + np.diag(penalties)
    rhs = design.T @ np.asarray(history.sales)
    return np.linalg.solve(lhs, rhs)


def flatten_model_parameters(model: FittedModel) -> np.ndarray:
    """Model parameters in the oracle's column order."""
    events = [model.event_effects[name] for name in sorted(model.event_effects)]
    w = model.weekly_coeffs
    y = model.yearly_coeffs
    return np.concatenate(
        [
            [model.base_intercept, model.base_slope],
            model.slope_deltas,
            w,
            y,
            events,
        ]
    )


def oracle_metrics(model, final, truth) -> tuple[float, float, float]:
    """Straight-from-formula AV, rMAE, MAPE with plain Python arithmetic."""
    t = len(model)
    adj = sum(abs(model[i] - final[i]) for i in range(t))
    need = sum(abs(model[i] - truth[i]) for i in range(t))
    av = adj / need
    final_mae = sum(abs(final[i] - truth[i]) for i in range(t)) / t
    model_mae = sum(abs(model[i] - truth[i]) for i in range(t)) / t
    r = final_mae / model_mae
    terms = [abs(truth[i] - final[i]) / truth[i] for i in range(t) if truth[i] != 0]
    m = sum(terms) / len(terms)
    return av, r, m
