"""Forecasting support system: decomposable forecasts, judgmental adjustments,
experiment service, metrics, and a simulated-judge harness."""

__version__ = "0.1.0"

from .data import EventCalendar, ForecastTask, TimeSeries, split_task
from .model import DecomposedForecast, FittedModel, ModelSpec, fit, predict_decomposed, ses_forecast, tune
from .adjust import AdjustmentState, ComponentKind, compose_final
from .metrics import (
    ForecastTriple,
    MetricRecord,
    adjustment_frequency,
    adjustment_volume,
    bonus,
    mape,
    resample_balanced,
    rmae,
    satisfaction_scale,
    summarize_treatment,
)

__all__ = [
    "EventCalendar",
    "ForecastTask",
    "TimeSeries",
    "split_task",
    "DecomposedForecast",
    "FittedModel",
    "ModelSpec",
    "fit",
    "predict_decomposed",
    "ses_forecast",
    "tune",
    "AdjustmentState",
    "ComponentKind",
    "compose_final",
    "ForecastTriple",
    "MetricRecord",
    "adjustment_frequency",
    "adjustment_volume",
    "bonus",
    "mape",
    "resample_balanced",
    "rmae",
    "satisfaction_scale",
    "summarize_treatment",
]
