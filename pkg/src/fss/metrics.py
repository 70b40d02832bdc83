"""Accuracy and adjustment metrics, the bonus rule, and treatment summaries."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from decimal import Decimal, ROUND_HALF_UP
from typing import Iterable, Sequence

import numpy as np

from .errors import UndefinedMetricError, ValidationError

# Numerical dust below this threshold does not count as an adjustment.
AV_EPSILON = 1e-9

BONUS_PER_POINT = Decimal("0.20")
BONUS_CAP_PER_PRODUCT = Decimal("1.00")
BONUS_CAP_PER_SESSION = Decimal("3.00")


@dataclass(frozen=True, eq=False)
class ForecastTriple:
    """Aligned model, final (post-adjustment), and actual values for one task."""

    model: np.ndarray
    final: np.ndarray
    truth: np.ndarray

    def __post_init__(self):
        model = np.asarray(self.model, dtype=float)
        final = np.asarray(self.final, dtype=float)
        truth = np.asarray(self.truth, dtype=float)
        if not (model.shape == final.shape == truth.shape) or model.ndim != 1 or model.size < 1:
            raise ValidationError("model, final, and truth must be equal-length 1-d arrays")
        for name, arr in (("model", model), ("final", final), ("truth", truth)):
            if not np.all(np.isfinite(arr)):
                raise ValidationError(f"{name} contains non-finite values")
            arr = arr.copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


def adjustment_volume(triple: ForecastTriple) -> float:
    """Total absolute adjustment relative to the adjustment needed for 100% accuracy."""
    denom = float(np.sum(np.abs(triple.model - triple.truth)))
    if denom == 0.0:
        raise UndefinedMetricError("model equals truth exactly; adjustment volume undefined")
    return float(np.sum(np.abs(triple.model - triple.final))) / denom


def adjustment_frequency(volumes: Sequence[float]) -> float:
    """Fraction of forecasts that were adjusted at all."""
    if len(volumes) < 1:
        raise ValidationError("adjustment frequency needs at least one volume")
    return sum(1 for v in volumes if v > AV_EPSILON) / len(volumes)


def rmae(triple: ForecastTriple) -> float:
    """MAE of the final forecast divided by MAE of the model forecast."""
    denom = float(np.sum(np.abs(triple.model - triple.truth)))
    if denom == 0.0:
        raise UndefinedMetricError("model forecast has zero MAE; rMAE undefined")
    return float(np.sum(np.abs(triple.final - triple.truth))) / denom


class MapeValue(float):
    """A MAPE that also reports how many zero-actual dates were excluded."""

    excluded_zero_days: int

    def __new__(cls, value: float, excluded_zero_days: int):
        obj = super().__new__(cls, value)
        obj.excluded_zero_days = excluded_zero_days
        return obj


def mape(actual, forecast) -> MapeValue:
    """Mean absolute percentage error, skipping dates where the actual is zero.

    Intermittent demand makes zero actuals common, and the percentage error is
    undefined there; the number of excluded dates rides along on the result.
    """
    actual = np.asarray(actual, dtype=float)
    forecast = np.asarray(forecast, dtype=float)
    if actual.shape != forecast.shape or actual.ndim != 1 or actual.size < 1:
        raise ValidationError("actual and forecast must be equal-length 1-d arrays")
    mask = actual != 0
    excluded = int(np.sum(~mask))
    if not mask.any():
        raise UndefinedMetricError("all actual values are zero; MAPE undefined")
    value = float(np.mean(np.abs(actual[mask] - forecast[mask]) / actual[mask]))
    return MapeValue(value, excluded)


def bonus(rmae_value: float) -> float:
    """Payout for one product: 0.20 per percentage point of improvement.

    Improvement is (1 - rMAE) in percentage points, floored at zero, capped at
    1.00 per product, and rounded to cents half-up.
    """
    rmae_value = float(rmae_value)
    if not rmae_value > 0:
        raise ValidationError("rMAE must be positive")
    points = (Decimal(1) - Decimal(repr(rmae_value))) * 100
    amount = BONUS_PER_POINT * max(Decimal(0), points)
    amount = min(amount, BONUS_CAP_PER_PRODUCT)
    return float(amount.quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


def cap_session_total(bonuses: Iterable[float]) -> float:
    """Sum per-product bonuses, capped at the per-session maximum."""
    total = min(Decimal(repr(float(sum(bonuses)))), BONUS_CAP_PER_SESSION)
    return float(total.quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


def session_bonus(rmae_values: Iterable[float]) -> tuple[list[float], float]:
    """Per-product bonuses and their capped session total."""
    per_product = [bonus(r) for r in rmae_values]
    return per_product, cap_session_total(per_product)


def satisfaction_scale(items: Sequence[float]) -> float:
    """Mean of the first four survey items; the bonus-motivation item is excluded."""
    if len(items) != 5:
        raise ValidationError("the survey has exactly 5 items")
    for value in items:
        if not (math.isfinite(value) and 1 <= value <= 7):
            raise ValidationError(f"survey item out of 1-7 range: {value!r}")
    return sum(float(v) for v in items[:4]) / 4


@dataclass(frozen=True)
class MetricRecord:
    """One (participant, product) outcome row."""

    participant: str
    treatment: str
    product: str
    av: float
    rmae: float
    mape: float | None = None
    mape_excluded_days: int = 0
    model_ses_rmae: float | None = None
    bonus: float | None = None
    signoff_seconds: float | None = None
    completion_seconds: float | None = None
    survey: tuple[float, ...] | None = None
    satisfaction: float | None = None
    duplicate: bool = False


def resample_balanced(
    records: Sequence[MetricRecord], seed: int
) -> list[MetricRecord]:
    """Resample with replacement so each treatment sees every product equally often.

    Within each treatment, every product is drawn exactly ``target`` times,
    where ``target`` is the ceiling of that treatment's mean per-product count.
    Records are reused verbatim; only multiplicities change. Deterministic for
    a fixed seed.
    """
    if not records:
        return []
    products = sorted({r.product for r in records})
    by_group: dict[tuple[str, str], list[MetricRecord]] = {}
    for r in records:
        by_group.setdefault((r.treatment, r.product), []).append(r)
    rng = random.Random(seed)
    out: list[MetricRecord] = []
    for treatment in sorted({r.treatment for r in records}):
        counts = []
        for product in products:
            group = by_group.get((treatment, product))
            if not group:
                raise ValidationError(
                    f"treatment {treatment} has no records for product {product}"
                )
            counts.append(len(group))
        target = math.ceil(sum(counts) / len(counts))
        for product in products:
            group = by_group[(treatment, product)]
            for _ in range(target):
                out.append(group[rng.randrange(len(group))])
    return out


@dataclass(frozen=True)
class ProductBreakdown:
    product: str
    n: int
    av_mean: float
    rmae_mean: float
    model_ses_rmae: float | None


@dataclass(frozen=True)
class TreatmentSummary:
    """Aggregates for one treatment, unconditional and conditional on adjustment."""

    treatment: str
    n: int
    av_mean: float
    av_std: float
    af: float
    rmae_mean: float
    rmae_std: float
    av_mean_adjusted: float | None
    av_std_adjusted: float | None
    rmae_mean_adjusted: float | None
    rmae_std_adjusted: float | None
    per_product: tuple[ProductBreakdown, ...]
    degenerate_std: bool

    def __post_init__(self):
        if not 0.0 <= self.af <= 1.0:
            raise ValidationError("adjustment frequency must lie in [0, 1]")


def _mean_std(values: Sequence[float]) -> tuple[float, float, bool]:
    arr = np.asarray(values, dtype=float)
    if arr.size == 1:
        # sample std (n-1) is undefined for one record; report 0 and flag it
        return float(arr[0]), 0.0, True
    return float(arr.mean()), float(arr.std(ddof=1)), False


def summarize_treatment(records: Sequence[MetricRecord]) -> TreatmentSummary:
    """Aggregate one treatment's records into the summary-table quantities."""
    if not records:
        raise ValidationError("cannot summarize an empty treatment")
    treatments = {r.treatment for r in records}
    if len(treatments) != 1:
        raise ValidationError(f"records span several treatments: {sorted(treatments)}")
    avs = [r.av for r in records]
    rmaes = [r.rmae for r in records]
    av_mean, av_std, degenerate = _mean_std(avs)
    rmae_mean, rmae_std, deg2 = _mean_std(rmaes)

    adjusted = [r for r in records if r.av > AV_EPSILON]
    if adjusted:
        av_mean_adj, av_std_adj, _ = _mean_std([r.av for r in adjusted])
        rmae_mean_adj, rmae_std_adj, _ = _mean_std([r.rmae for r in adjusted])
    else:
        av_mean_adj = av_std_adj = rmae_mean_adj = rmae_std_adj = None

    per_product = []
    for product in sorted({r.product for r in records}):
        group = [r for r in records if r.product == product]
        ses_values = [r.model_ses_rmae for r in group if r.model_ses_rmae is not None]
        per_product.append(
            ProductBreakdown(
                product=product,
                n=len(group),
                av_mean=float(np.mean([r.av for r in group])),
                rmae_mean=float(np.mean([r.rmae for r in group])),
                model_ses_rmae=float(np.mean(ses_values)) if ses_values else None,
            )
        )

    return TreatmentSummary(
        treatment=records[0].treatment,
        n=len(records),
        av_mean=av_mean,
        av_std=av_std,
        af=adjustment_frequency(avs),
        rmae_mean=rmae_mean,
        rmae_std=rmae_std,
        av_mean_adjusted=av_mean_adj,
        av_std_adjusted=av_std_adj,
        rmae_mean_adjusted=rmae_mean_adj,
        rmae_std_adjusted=rmae_std_adj,
        per_product=tuple(per_product),
        degenerate_std=degenerate or deg2,
    )


def summarize_by_treatment(records: Sequence[MetricRecord]) -> list[TreatmentSummary]:
    order = {"O": 0, "T": 1, "TA": 2}
    treatments = sorted({r.treatment for r in records}, key=lambda t: (order.get(t, 99), t))
    return [
        summarize_treatment([r for r in records if r.treatment == t]) for t in treatments
    ]
