"""Decomposable additive forecasting model fit by penalized least squares.

The forecast for a date is the sum of four interpretable parts: a piecewise
linear level, a weekly cycle, a yearly cycle, and per-event effects. Trend
flexibility comes from slope changes at a grid of changepoints; both cycles
are low-order Fourier series. Everything is estimated in one ridge-style
linear solve, so fits are deterministic and fast enough to precompute for
every product at service start.
"""

from __future__ import annotations

import math
import sys
import warnings
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .data import EventCalendar, ForecastTask, iso_from_day, weekday_of
from .errors import FitError, ValidationError

WEEKLY_PERIOD = 7.0
YEARLY_PERIOD = 365.25
MIN_HISTORY_DAYS = 14  # two full weeks


@dataclass(frozen=True)
class ModelSpec:
    """Structural and regularization choices for one fit."""

    n_changepoints: int = 25
    changepoint_range: float = 0.8
    weekly_order: int = 3
    yearly_order: int = 10
    trend_penalty: float = 10.0
    seasonal_penalty: float = 1.0
    event_penalty: float = 1.0

    def __post_init__(self):
        if self.n_changepoints < 0:
            raise ValidationError("n_changepoints must be >= 0")
        if not 0 < self.changepoint_range <= 1:
            raise ValidationError("changepoint_range must be in (0, 1]")
        if self.weekly_order < 1 or self.yearly_order < 1:
            raise ValidationError("Fourier orders must be >= 1")
        if min(self.trend_penalty, self.seasonal_penalty, self.event_penalty) < 0:
            raise ValidationError("penalties must be non-negative")

    @property
    def penalty_sum(self) -> float:
        return self.trend_penalty + self.seasonal_penalty + self.event_penalty

    @classmethod
    def from_mapping(cls, mapping: dict) -> "ModelSpec":
        known = {f.name for f in fields(cls)}
        unknown = set(mapping) - known
        if unknown:
            raise ValidationError(f"unknown model spec fields: {sorted(unknown)}")
        return cls(**mapping)


def load_model_spec(path: str | Path) -> ModelSpec:
    """Read a ModelSpec from a TOML file mapping field names to values."""
    if sys.version_info >= (3, 11):
        import tomllib
    else:
        import tomli as tomllib
    with Path(path).open("rb") as fh:
        raw = tomllib.load(fh)
    return ModelSpec.from_mapping(raw.get("model", raw))


def weekly_phase(days) -> np.ndarray:
    return np.asarray(weekday_of(np.asarray(days)), dtype=float)


def yearly_phase(days) -> np.ndarray:
    return np.asarray(days, dtype=float) % YEARLY_PERIOD


def fourier_columns(phase: np.ndarray, period: float, order: int) -> np.ndarray:
    """Columns cos(2*pi*k*phase/period), sin(...) for k = 1..order."""
    k = np.arange(1, order + 1, dtype=float)
    angles = (2.0 * np.pi / period) * np.outer(np.asarray(phase, dtype=float), k)
    return np.hstack([np.cos(angles), np.sin(angles)])


def changepoint_grid(n_points: int, n_changepoints: int, changepoint_range: float) -> np.ndarray:
    """Uniform changepoint day-offsets over the first ``changepoint_range`` of history."""
    if n_changepoints == 0:
        return np.empty(0, dtype=int)
    eligible = math.floor(n_points * changepoint_range)
    if eligible < 2:
        return np.empty(0, dtype=int)
    idx = [round(j * (eligible - 1) / n_changepoints) for j in range(1, n_changepoints + 1)]
    return np.array(sorted({i for i in idx if i > 0}), dtype=int)


def trend_columns(tau: np.ndarray, changepoints: np.ndarray) -> np.ndarray:
    """[1, tau, relu(tau - cp_j)...]: a continuous piecewise-linear basis."""
    tau = np.asarray(tau, dtype=float)
    cols = [np.ones_like(tau), tau]
    for cp in changepoints:
        cols.append(np.maximum(0.0, tau - float(cp)))
    return np.column_stack(cols)


def event_columns(days: Sequence[int], calendar: EventCalendar, names: Sequence[str]) -> np.ndarray:
    mat = np.zeros((len(days), len(names)))
    index = {name: j for j, name in enumerate(names)}
    for i, day in enumerate(days):
        for name in calendar.events_on(int(day)):
            j = index.get(name)
            if j is not None:
                mat[i, j] = 1.0
    return mat


@dataclass(frozen=True, eq=False)
class FittedModel:
    """Parameters of the additive model; immutable once constructed."""

    origin_day: int
    base_intercept: float
    base_slope: float
    changepoint_days: np.ndarray  # day offsets from origin_day
    slope_deltas: np.ndarray
    weekly_order: int
    weekly_coeffs: np.ndarray
    yearly_order: int
    yearly_coeffs: np.ndarray
    event_effects: dict[str, float]
    residual_std: float

    def __post_init__(self):
        if len(self.changepoint_days) != len(self.slope_deltas):
            raise ValidationError("one slope delta required per changepoint")
        for name in ("changepoint_days", "slope_deltas", "weekly_coeffs", "yearly_coeffs"):
            arr = np.asarray(getattr(self, name))
            arr = arr.copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FittedModel):
            return NotImplemented
        return (
            self.origin_day == other.origin_day
            and self.base_intercept == other.base_intercept
            and self.base_slope == other.base_slope
            and np.array_equal(self.changepoint_days, other.changepoint_days)
            and np.array_equal(self.slope_deltas, other.slope_deltas)
            and self.weekly_order == other.weekly_order
            and np.array_equal(self.weekly_coeffs, other.weekly_coeffs)
            and self.yearly_order == other.yearly_order
            and np.array_equal(self.yearly_coeffs, other.yearly_coeffs)
            and self.event_effects == other.event_effects
            and self.residual_std == other.residual_std
        )

    def trend_at(self, days) -> np.ndarray:
        tau = np.asarray(days, dtype=float) - self.origin_day
        basis = trend_columns(tau, self.changepoint_days)
        coeffs = np.concatenate([[self.base_intercept, self.base_slope], self.slope_deltas])
        return basis @ coeffs

    def weekly_at(self, days) -> np.ndarray:
        basis = fourier_columns(weekly_phase(days), WEEKLY_PERIOD, self.weekly_order)
        return basis @ self.weekly_coeffs

    def yearly_at(self, days) -> np.ndarray:
        basis = fourier_columns(yearly_phase(days), YEARLY_PERIOD, self.yearly_order)
        return basis @ self.yearly_coeffs

    def events_at(self, days, calendar: EventCalendar) -> np.ndarray:
        out = np.zeros(len(days))
        for i, day in enumerate(np.asarray(days)):
            out[i] = sum(self.event_effects.get(name, 0.0) for name in calendar.events_on(int(day)))
        return out

    def weekly_effects(self) -> np.ndarray:
        """Effect per weekday, Monday first."""
        basis = fourier_columns(np.arange(7, dtype=float), WEEKLY_PERIOD, self.weekly_order)
        return basis @ self.weekly_coeffs

    def yearly_curve(self, samples: int = 366) -> tuple[np.ndarray, np.ndarray]:
        """The yearly cycle sampled over one full period, as (phase, value)."""
        phase = np.arange(samples) * (YEARLY_PERIOD / samples)
        basis = fourier_columns(phase, YEARLY_PERIOD, self.yearly_order)
        return phase, basis @ self.yearly_coeffs


@dataclass(frozen=True, eq=False)
class DecomposedForecast:
    """Per-date components and their total; total is the exact component sum."""

    days: np.ndarray
    level: np.ndarray
    weekly: np.ndarray
    yearly: np.ndarray
    events: np.ndarray
    total: np.ndarray

    ADDITIVITY_TOL = 1e-9

    def __post_init__(self):
        n = len(self.days)
        for name in ("days", "level", "weekly", "yearly", "events", "total"):
            arr = np.asarray(getattr(self, name))
            if arr.shape != (n,):
                raise ValidationError(f"component {name} has wrong length")
            arr = arr.copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        gap = np.abs(self.total - (self.level + self.weekly + self.yearly + self.events))
        if n and float(gap.max()) >= self.ADDITIVITY_TOL:
            raise ValidationError("total does not equal the sum of components")

    @classmethod
    def from_components(cls, days, level, weekly, yearly, events) -> "DecomposedForecast":
        level = np.asarray(level, dtype=float)
        weekly = np.asarray(weekly, dtype=float)
        yearly = np.asarray(yearly, dtype=float)
        events = np.asarray(events, dtype=float)
        total = level + weekly + yearly + events
        return cls(np.asarray(days), level, weekly, yearly, events, total)

    def __len__(self) -> int:
        return int(self.days.size)

    def index_of(self, day: int) -> int:
        pos = int(np.searchsorted(self.days, day))
        if pos >= len(self) or self.days[pos] != day:
            raise ValidationError(f"day {iso_from_day(day)} not in forecast range")
        return pos

    def write_csv(self, path: str | Path) -> None:
        import csv

        with Path(path).open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["date", "level", "weekly", "yearly", "events", "total"])
            for i in range(len(self)):
                writer.writerow(
                    [
                        iso_from_day(int(self.days[i])),
                        repr(float(self.level[i])),
                        repr(float(self.weekly[i])),
                        repr(float(self.yearly[i])),
                        repr(float(self.events[i])),
                        repr(float(self.total[i])),
                    ]
                )


def _design_matrix(
    days: np.ndarray,
    origin_day: int,
    changepoints: np.ndarray,
    calendar: EventCalendar,
    event_names: Sequence[str],
    spec: ModelSpec,
) -> np.ndarray:
    tau = np.asarray(days, dtype=float) - origin_day
    return np.hstack(
        [
            trend_columns(tau, changepoints),
            fourier_columns(weekly_phase(days), WEEKLY_PERIOD, spec.weekly_order),
            fourier_columns(yearly_phase(days), YEARLY_PERIOD, spec.yearly_order),
            event_columns(days, calendar, event_names),
        ]
    )


def _penalty_diagonal(n_changepoints: int, n_events: int, spec: ModelSpec) -> np.ndarray:
    return np.concatenate(
        [
            np.zeros(2),  # intercept and base slope are never shrunk
            np.full(n_changepoints, spec.trend_penalty),
            np.full(2 * spec.weekly_order + 2 * spec.yearly_order, spec.seasonal_penalty),
            np.full(n_events, spec.event_penalty),
        ]
    )


def fit(task: ForecastTask, calendar: EventCalendar, spec: ModelSpec) -> FittedModel:
    """Fit the additive model to the task history by penalized least squares.

    Minimizes the sum of squared residuals plus L2 penalties: ``trend_penalty``
    on the changepoint slope deltas, ``seasonal_penalty`` on all Fourier
    coefficients, and ``event_penalty`` on event effects. Deterministic for
    fixed inputs.
    """
    history = task.history
    n = len(history)
    if n < MIN_HISTORY_DAYS:
        raise ValidationError(f"history must cover at least {MIN_HISTORY_DAYS} days, got {n}")
    days = history.days
    origin = history.start_day
    changepoints = changepoint_grid(n, spec.n_changepoints, spec.changepoint_range)
    event_names = calendar.names_within(days)

    design = _design_matrix(days, origin, changepoints, calendar, event_names, spec)
    penalties = _penalty_diagonal(len(changepoints), len(event_names), spec)
    p = design.shape[1]

    # min ||X b - y||^2 + b' D b  via the augmented system [X; sqrt(D)] b = [y; 0]
    augmented = np.vstack([design, np.diag(np.sqrt(penalties))])
    target = np.concatenate([history.sales, np.zeros(p)])
    solution, _, rank, _ = np.linalg.lstsq(augmented, target, rcond=None)
    if rank < p:
        raise FitError(
            "singular system after regularization; increase penalties or check the data"
        )

    n_cp = len(changepoints)
    n_w = 2 * spec.weekly_order
    n_y = 2 * spec.yearly_order
    pos = 2 + n_cp
    residuals = history.sales - design @ solution
    return FittedModel(
        origin_day=origin,
        base_intercept=float(solution[0]),
        base_slope=float(solution[1]),
        changepoint_days=changepoints,
        slope_deltas=solution[2:pos],
        weekly_order=spec.weekly_order,
        weekly_coeffs=solution[pos : pos + n_w],
        yearly_order=spec.yearly_order,
        yearly_coeffs=solution[pos + n_w : pos + n_w + n_y],
        event_effects={name: float(v) for name, v in zip(event_names, solution[pos + n_w + n_y :])},
        residual_std=float(np.sqrt(np.mean(residuals**2))),
    )


def predict_decomposed(model: FittedModel, days, calendar: EventCalendar) -> DecomposedForecast:
    """Evaluate the model's components over a set of day ordinals.

    The level continues the final trend segment linearly beyond the last
    changepoint; event effects of names the model never saw are zero.
    """
    days = np.asarray(days)
    if days.size == 0:
        raise ValidationError("prediction requires at least one date")
    return DecomposedForecast.from_components(
        days,
        model.trend_at(days),
        model.weekly_at(days),
        model.yearly_at(days),
        model.events_at(days, calendar),
    )


DEFAULT_SES_GRID = tuple(round(i / 100, 2) for i in range(1, 100))


def ses_fit(values: np.ndarray, grid: Sequence[float] = DEFAULT_SES_GRID) -> tuple[float, float]:
    """Grid-search the smoothing parameter minimizing in-sample one-step MAE.

    Returns ``(alpha, final_level)``; ties keep the first (smallest) alpha.
    """
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        raise ValidationError("smoothing requires at least 2 observations")
    if not grid:
        raise ValidationError("empty smoothing grid")
    best_alpha = None
    best_mae = np.inf
    best_level = 0.0
    for alpha in grid:
        level = values[0]
        abs_err = 0.0
        for v in values[1:]:
            abs_err += abs(v - level)
            level += alpha * (v - level)
        mae = abs_err / (values.size - 1)
        if mae < best_mae:
            best_alpha, best_mae, best_level = alpha, mae, level
    return float(best_alpha), float(best_level)


def ses_forecast(task: ForecastTask, grid: Sequence[float] = DEFAULT_SES_GRID) -> np.ndarray:
    """Flat multi-step forecast at the final smoothed level of the history."""
    _, level = ses_fit(task.history.sales, grid)
    return np.full(task.horizon_days, level)


def tune(
    task: ForecastTask,
    calendar: EventCalendar,
    grid: Iterable[ModelSpec],
    folds: int = 3,
    fold_days: int = 14,
) -> ModelSpec:
    """Pick the grid entry minimizing rolling-origin MAE over validation folds.

    Folds are ``fold_days``-long windows ending at the history end and stepping
    backwards; exact ties prefer the larger total penalty (smoother model).
    Falls back to a single fold, with a warning, when the history is too short.
    """
    candidates = list(grid)
    if not candidates:
        raise ValidationError("tuning grid is empty")
    history = task.history
    n = len(history)

    windows = []
    for f in range(folds):
        end = n - f * fold_days
        start = end - fold_days
        if start >= MIN_HISTORY_DAYS:
            windows.append((start, end))
    if not windows:
        raise ValidationError(
            f"history of {n} days cannot support even one {fold_days}-day validation fold"
        )
    if len(windows) < folds:
        warnings.warn(
            f"history of {n} days too short for {folds} folds; tuning on {len(windows)}",
            stacklevel=2,
        )
        windows = windows[:1]

    def score(spec: ModelSpec) -> float:
        maes = []
        for start, end in windows:
            sub = ForecastTask(history.slice(0, start), end - start, history.sales[start:end])
            model = fit(sub, calendar, spec)
            predicted = predict_decomposed(model, sub.truth_days, calendar)
            maes.append(float(np.mean(np.abs(predicted.total - sub.truth))))
        return float(np.mean(maes))

    ranked = sorted(
        ((score(spec), -spec.penalty_sum, i) for i, spec in enumerate(candidates)),
    )
    return candidates[ranked[0][2]]
