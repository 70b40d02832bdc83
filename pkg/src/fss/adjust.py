"""Judgmental adjustments over a decomposed forecast.

An adjustment state is a value: every edit returns a new state. Component
overrides (level, weekly, yearly) replace the corresponding model component
when the final forecast is recomposed; per-date value overrides then pin
individual totals wholesale, taking precedence over everything else.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable, Mapping

import numpy as np

from .data import iso_from_day, weekday_of, EventCalendar, TimeSeries
from .errors import ValidationError
from .model import (
    DecomposedForecast,
    FittedModel,
    YEARLY_PERIOD,
    fourier_columns,
    predict_decomposed,
    yearly_phase,
)

YEARLY_PROJECTION_SAMPLES = 366


class ComponentKind(str, Enum):
    LEVEL = "level"
    WEEKLY = "weekly"
    YEARLY = "yearly"
    VALUES = "values"


def _require_finite(values: Iterable[float], what: str) -> None:
    for v in values:
        if not math.isfinite(v):
            raise ValidationError(f"{what}: non-finite value {v!r}")


def project_periodic_polyline(
    polyline: Iterable[tuple[float, float]],
    order: int,
    period: float = YEARLY_PERIOD,
    samples: int = YEARLY_PROJECTION_SAMPLES,
) -> np.ndarray:
    """Fit ``[constant, Fourier(order)]`` coefficients to a periodic polyline.

    The polyline is linearly interpolated with periodic wrap-around before the
    least-squares projection, so the edited curve stays smooth and periodic.
    The constant term keeps a deliberately off-center redraw (e.g. everything
    +10) from being silently re-centered.
    """
    points = [(float(x), float(v)) for x, v in polyline]
    if len(points) < 2:
        raise ValidationError("a redraw needs at least 2 points")
    xs = np.array([x for x, _ in points])
    vs = np.array([v for _, v in points])
    _require_finite(xs, "redraw positions")
    _require_finite(vs, "redraw values")
    if np.any(np.diff(xs) <= 0):
        raise ValidationError("redraw positions must be strictly increasing")
    if xs[-1] - xs[0] >= period:
        raise ValidationError("redraw spans more than one full cycle")
    grid = np.arange(samples) * (period / samples)
    values = np.interp(grid, xs, vs, period=period)
    basis = np.hstack([np.ones((samples, 1)), fourier_columns(grid, period, order)])
    coeffs, _, _, _ = np.linalg.lstsq(basis, values, rcond=None)
    return coeffs


def evaluate_yearly_override(coeffs, days: np.ndarray, order: int) -> np.ndarray:
    basis = np.hstack(
        [
            np.ones((len(days), 1)),
            fourier_columns(yearly_phase(days), YEARLY_PERIOD, order),
        ]
    )
    return basis @ np.asarray(coeffs)


def yearly_override_curve(
    coeffs, order: int, samples: int = YEARLY_PROJECTION_SAMPLES
) -> tuple[np.ndarray, np.ndarray]:
    """The overridden yearly cycle sampled over one period, as (phase, value)."""
    phase = np.arange(samples) * (YEARLY_PERIOD / samples)
    basis = np.hstack([np.ones((samples, 1)), fourier_columns(phase, YEARLY_PERIOD, order)])
    return phase, basis @ np.asarray(coeffs)


@dataclass(frozen=True)
class AdjustmentState:
    """All of one user's overrides for one product's forecast."""

    horizon_start: int
    horizon_end: int
    yearly_order: int = 10
    level_override: tuple[tuple[int, float], ...] | None = None
    weekly_override: tuple[float, ...] | None = None
    yearly_override: tuple[tuple[float, float], ...] | None = None
    yearly_coeffs: tuple[float, ...] | None = None  # cached projection of yearly_override
    value_overrides: tuple[tuple[int, float], ...] = ()

    @classmethod
    def for_horizon(cls, days, yearly_order: int = 10) -> "AdjustmentState":
        days = np.asarray(days)
        return cls(int(days[0]), int(days[-1]), yearly_order)

    def in_horizon(self, day: int) -> bool:
        return self.horizon_start <= day <= self.horizon_end

    def value_map(self) -> dict[int, float]:
        return dict(self.value_overrides)

    def has_component_overrides(self) -> bool:
        return any(
            override is not None
            for override in (self.level_override, self.weekly_override, self.yearly_override)
        )

    def is_empty(self) -> bool:
        return not self.has_component_overrides() and not self.value_overrides

    def to_payload(self) -> dict:
        """JSON-friendly form; field names match the shipped API schema."""
        payload: dict = {}
        if self.level_override is not None:
            payload["level"] = [[iso_from_day(d), v] for d, v in self.level_override]
        if self.weekly_override is not None:
            payload["weekly"] = list(self.weekly_override)
        if self.yearly_override is not None:
            payload["yearly"] = [[x, v] for x, v in self.yearly_override]
        if self.value_overrides:
            payload["values"] = {iso_from_day(d): v for d, v in self.value_overrides}
        return payload


def apply_weekly_edit(state: AdjustmentState, handles: Iterable[float]) -> AdjustmentState:
    """Replace the weekly cycle with seven handle values, Monday first.

    Handles are absolute effects and are not re-centered: a user who lifts
    every handle has deliberately shifted the level.
    """
    values = tuple(float(h) for h in handles)
    if len(values) != 7:
        raise ValidationError(f"weekly edit needs exactly 7 values, got {len(values)}")
    _require_finite(values, "weekly handles")
    return replace(state, weekly_override=values)


def apply_yearly_redraw(
    state: AdjustmentState, polyline: Iterable[tuple[float, float]]
) -> AdjustmentState:
    """Replace the yearly cycle with a redrawn polyline over the year.

    Points are (day-of-year position in the 365.25-day cycle, value). The
    polyline is re-projected onto the model's yearly Fourier basis so the
    edited component stays periodic and smooth.
    """
    points = tuple((float(x), float(v)) for x, v in polyline)
    coeffs = project_periodic_polyline(points, state.yearly_order)
    return replace(state, yearly_override=points, yearly_coeffs=tuple(float(c) for c in coeffs))


def apply_level_redraw(
    state: AdjustmentState, polyline: Iterable[tuple[int, float]]
) -> AdjustmentState:
    """Replace the level over the drawn date range by daily interpolation.

    Outside the drawn range the model level is kept (the stroke is not
    extrapolated). The range must reach into the forecast horizon; a redraw
    confined to history cannot change any forecast and is rejected.
    """
    points = tuple((int(d), float(v)) for d, v in polyline)
    if len(points) < 2:
        raise ValidationError("a level redraw needs at least 2 points")
    days = [d for d, _ in points]
    _require_finite((v for _, v in points), "level redraw")
    if any(b <= a for a, b in zip(days, days[1:])):
        raise ValidationError("level redraw dates must be strictly increasing")
    if days[-1] < state.horizon_start or days[0] > state.horizon_end:
        raise ValidationError("level redraw does not touch the forecast horizon")
    grid = np.arange(days[0], days[-1] + 1)
    values = np.interp(grid, days, [v for _, v in points])
    daily = tuple((int(d), float(v)) for d, v in zip(grid, values))
    return replace(state, level_override=daily)


def apply_value_edit(state: AdjustmentState, day: int, value: float) -> AdjustmentState:
    """Pin the final forecast of one horizon date to an exact value."""
    day = int(day)
    value = float(value)
    if not state.in_horizon(day):
        raise ValidationError(f"{iso_from_day(day)} is outside the forecast horizon")
    if not math.isfinite(value):
        raise ValidationError("value edit must be finite")
    merged = dict(state.value_overrides)
    merged[day] = value
    return replace(state, value_overrides=tuple(sorted(merged.items())))


def apply_value_edits(state: AdjustmentState, edits: Mapping[int, float]) -> AdjustmentState:
    for day, value in edits.items():
        state = apply_value_edit(state, day, value)
    return state


def reset_component(state: AdjustmentState, kind: ComponentKind) -> AdjustmentState:
    """Clear one override, leaving the others untouched."""
    kind = ComponentKind(kind)
    if kind is ComponentKind.LEVEL:
        return replace(state, level_override=None)
    if kind is ComponentKind.WEEKLY:
        return replace(state, weekly_override=None)
    if kind is ComponentKind.YEARLY:
        return replace(state, yearly_override=None, yearly_coeffs=None)
    return replace(state, value_overrides=())


def reset_all(state: AdjustmentState) -> AdjustmentState:
    return AdjustmentState(state.horizon_start, state.horizon_end, state.yearly_order)


def compose_components(
    model_forecast: DecomposedForecast, state: AdjustmentState
) -> DecomposedForecast:
    """Swap overridden components into the decomposition; totals recomputed.

    Value overrides are deliberately NOT applied here: they pin totals, not
    components, and belong to :func:`compose_final`.
    """
    days = model_forecast.days
    level = model_forecast.level
    weekly = model_forecast.weekly
    yearly = model_forecast.yearly

    if state.level_override is not None:
        level = level.copy()
        override_days = np.array([d for d, _ in state.level_override])
        override_vals = np.array([v for _, v in state.level_override])
        mask = np.isin(days, override_days)
        if mask.any():
            positions = np.searchsorted(override_days, days[mask])
            level[mask] = override_vals[positions]

    if state.weekly_override is not None:
        pattern = np.asarray(state.weekly_override)
        weekly = pattern[weekday_of(days)]

    if state.yearly_override is not None:
        yearly = evaluate_yearly_override(state.yearly_coeffs, days, state.yearly_order)

    return DecomposedForecast.from_components(days, level, weekly, yearly, model_forecast.events)


def compose_final(model_forecast: DecomposedForecast, state: AdjustmentState) -> np.ndarray:
    """The user's final forecast: component overrides, then value pins."""
    if state.is_empty():
        return model_forecast.total.copy()
    total = compose_components(model_forecast, state).total.copy()
    for day, value in state.value_overrides:
        idx = np.searchsorted(model_forecast.days, day)
        if idx < len(total) and model_forecast.days[idx] == day:
            total[idx] = value
    return total


def weekly_residual_view(
    model: FittedModel,
    history: TimeSeries,
    calendar: EventCalendar,
    weeks_shown: int,
) -> list[tuple[int, int, float]]:
    """Fluctuation points for the weekly edit screen.

    For each weekday, the residual of each of the most recent ``weeks_shown``
    weeks: observed minus the fit with its weekly part removed. Rows are
    (weekday, day, residual), grouped by weekday and date-ascending within it.
    """
    if weeks_shown < 1:
        raise ValidationError("weeks_shown must be >= 1")
    n_days = min(weeks_shown * 7, len(history) // 7 * 7)
    if n_days == 0:
        raise ValidationError("history shorter than one week")
    tail = history.slice(len(history) - n_days, len(history))
    fitted = predict_decomposed(model, tail.days, calendar)
    residuals = tail.sales - (fitted.total - fitted.weekly)
    rows = [
        (int(weekday_of(int(day))), int(day), float(r))
        for day, r in zip(tail.days, residuals)
    ]
    rows.sort(key=lambda row: (row[0], row[1]))
    return rows


def yearly_residual_view(
    model: FittedModel,
    history: TimeSeries,
    calendar: EventCalendar,
    points_shown: int,
) -> list[tuple[float, int, float]]:
    """Fluctuation points for the yearly edit screen, grouped by cycle position.

    Requires more than one year of history so a full cycle is on display.
    Rows are (day-of-year position, day, residual).
    """
    if points_shown < 1:
        raise ValidationError("points_shown must be >= 1")
    if len(history) <= int(YEARLY_PERIOD):
        raise ValidationError("yearly view requires more than one year of history")
    n_days = min(points_shown, len(history))
    tail = history.slice(len(history) - n_days, len(history))
    fitted = predict_decomposed(model, tail.days, calendar)
    residuals = tail.sales - (fitted.total - fitted.yearly)
    rows = [
        (float(yearly_phase(np.array([day]))[0]), int(day), float(r))
        for day, r in zip(tail.days, residuals)
    ]
    rows.sort(key=lambda row: (row[0], row[1]))
    return rows
