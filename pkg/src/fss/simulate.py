"""Bias-policy agents driven through the service's public API at desk scale.

Each agent owns one session and completes it end to end: view, adjust (per
its policy), sign off every product, answer the survey. The harness runs the
service embedded with a virtual clock, so identical seeds produce
byte-identical results files.
"""

from __future__ import annotations

import random
import sys
from dataclasses import dataclass, field
from pathlib import Path

import httpx
import numpy as np

from .data import load_sales_csv, split_task
from .errors import ValidationError
from .metrics import (
    ForecastTriple,
    MetricRecord,
    adjustment_volume,
    mape,
    rmae,
    satisfaction_scale,
)
from .model import DecomposedForecast, ModelSpec
from .service.app import create_app
from .service.config import ServiceConfig
from .tables import read_results_csv, write_results_csv
from .errors import UndefinedMetricError

POLICY_KINDS = ("noop", "anchor_adjust", "noise_model", "trend_dampen", "extreme")

# Policies that need the level decomposition, which only TA exposes.
COMPONENT_POLICIES = ("trend_dampen",)


@dataclass(frozen=True)
class JudgePolicy:
    """A parameterized adjustment bias applied mechanically by an agent."""

    kind: str
    alpha: float = 0.5
    window: int = 7
    gain: float = 1.0
    factor: float = 0.5

    def __post_init__(self):
        if self.kind not in POLICY_KINDS:
            raise ValidationError(f"unknown policy kind {self.kind!r}")
        if not 0 <= self.alpha <= 1:
            raise ValidationError("alpha must be in [0, 1]")
        if not 0 <= self.factor <= 1:
            raise ValidationError("factor must be in [0, 1]")
        if self.gain < 0:
            raise ValidationError("gain must be >= 0")
        if self.window < 1:
            raise ValidationError("window must be >= 1")

    @classmethod
    def from_mapping(cls, mapping: dict) -> "JudgePolicy":
        return cls(**mapping)


def anchor_adjust_forecast(model_values, last_obs: float, alpha: float) -> np.ndarray:
    """Blend toward the most recent observation, the classic anchor."""
    model_values = np.asarray(model_values, dtype=float)
    return alpha * model_values + (1.0 - alpha) * float(last_obs)


def trend_dampen_forecast(decomposed: DecomposedForecast, factor: float) -> np.ndarray:
    """Shrink the level drift relative to the horizon start, re-adding the cycles."""
    level0 = float(decomposed.level[0])
    damped = level0 + factor * (decomposed.level - level0)
    return damped + decomposed.weekly + decomposed.yearly + decomposed.events


def noise_model_forecast(
    forecast_values, history_values, fitted_values, window: int, gain: float
) -> np.ndarray:
    """Extrapolate recent residual 'patterns' into every forecast value."""
    forecast_values = np.asarray(forecast_values, dtype=float)
    residuals = np.asarray(history_values, dtype=float) - np.asarray(fitted_values, dtype=float)
    if window < 1:
        raise ValidationError("window must be >= 1")
    recent = residuals[-window:]
    return forecast_values + gain * float(np.mean(recent))


def extreme_forecast(model_values, reference: float, gain: float) -> np.ndarray:
    """Amplify the forecast's deviations from a reference level."""
    model_values = np.asarray(model_values, dtype=float)
    return reference + (1.0 + gain) * (model_values - reference)


@dataclass(frozen=True)
class TreatmentPlan:
    agents: int
    policies: tuple[JudgePolicy, ...]


@dataclass(frozen=True)
class SimConfig:
    sales_path: Path
    calendar_path: Path
    store_dir: Path
    seed: int = 7
    horizon_days: int = 14
    products_per_session: int = 3
    model_spec: ModelSpec = field(default_factory=ModelSpec)
    plans: dict[str, TreatmentPlan] = field(default_factory=dict)

    def service_config(self) -> ServiceConfig:
        return ServiceConfig(
            sales_path=self.sales_path,
            calendar_path=self.calendar_path,
            store_dir=self.store_dir,
            horizon_days=self.horizon_days,
            products_per_session=self.products_per_session,
            model_spec=self.model_spec,
            treatment_mode="param",
            rng_seed=self.seed,
        )


def load_sim_config(path: str | Path) -> SimConfig:
    if sys.version_info >= (3, 11):
        import tomllib
    else:
        import tomli as tomllib
    path = Path(path)
    with path.open("rb") as fh:
        raw = tomllib.load(fh)
    data = raw.get("data", {})
    experiment = raw.get("experiment", {})
    plans = {}
    for treatment, body in raw.get("treatments", {}).items():
        policies = tuple(
            JudgePolicy.from_mapping(p) for p in body.get("policies", [{"kind": "noop"}])
        )
        plans[treatment] = TreatmentPlan(int(body.get("agents", 1)), policies)
    if not plans:
        raise ValidationError("sim config declares no treatments")
    base = path.parent
    store = experiment.get("store_dir")
    return SimConfig(
        sales_path=base / data["sales"],
        calendar_path=base / data["calendar"],
        store_dir=(base / store) if store else base / "sim_store",
        seed=int(experiment.get("seed", 7)),
        horizon_days=int(experiment.get("horizon_days", 14)),
        products_per_session=int(experiment.get("products_per_session", 3)),
        model_spec=ModelSpec.from_mapping(raw.get("model", {})),
        plans=plans,
    )


class VirtualClock:
    """Deterministic monotonic clock the harness advances explicitly."""

    def __init__(self, start: float = 1_000_000_000.0):
        self.t = float(start)

    def __call__(self) -> float:
        return self.t

    def advance(self, seconds: float) -> float:
        self.t += float(seconds)
        return self.t


def _policy_target(
    policy: JudgePolicy, treatment: str, view: dict, rng: random.Random
) -> tuple[str, object] | None:
    """Decide the edit this agent posts: None, a values batch, or a level redraw."""
    model_totals = np.asarray(view["forecast"]["total"], dtype=float)
    forecast_dates = view["forecast"]["dates"]
    history = np.asarray(view["history"]["sales"], dtype=float)

    if policy.kind == "noop":
        return None
    if policy.kind == "anchor_adjust":
        target = anchor_adjust_forecast(model_totals, history[-1], policy.alpha)
        return "values", dict(zip(forecast_dates, (float(v) for v in target)))
    if policy.kind == "extreme":
        reference = float(np.mean(history))
        target = extreme_forecast(model_totals, reference, policy.gain)
        return "values", dict(zip(forecast_dates, (float(v) for v in target)))
    if policy.kind == "noise_model":
        fitted = np.asarray(view["fit"]["total"], dtype=float)
        target = noise_model_forecast(model_totals, history, fitted, policy.window, policy.gain)
        if treatment == "TA":
            # exercise the component-edit path: shift the level by the same amount
            decomposition = view["decomposition"]
            horizon = len(forecast_dates)
            level = np.asarray(decomposition["level"][-horizon:], dtype=float)
            shift = float(np.mean((np.asarray(history) - fitted)[-policy.window :])) * policy.gain
            polyline = [[d, float(v + shift)] for d, v in zip(forecast_dates, level)]
            return "level", polyline
        return "values", dict(zip(forecast_dates, (float(v) for v in target)))
    if policy.kind == "trend_dampen":
        if treatment != "TA":
            raise ValidationError(
                "trend_dampen needs the level decomposition; configure it under TA only"
            )
        decomposition = view["decomposition"]
        horizon = len(forecast_dates)
        level = np.asarray(decomposition["level"][-horizon:], dtype=float)
        level0 = float(level[0])
        damped = level0 + policy.factor * (level - level0)
        polyline = [[d, float(v)] for d, v in zip(forecast_dates, damped)]
        return "level", polyline
    raise ValidationError(f"unhandled policy {policy.kind}")


def run_experiment(config: SimConfig, out_path: str | Path) -> list[MetricRecord]:
    """Run every configured agent through the full pipeline; write results CSV.

    The service runs embedded behind a virtual clock. Metrics are recomputed
    locally from raw forecasts and truths and must agree exactly with the
    service's export (pipeline integrity); any discrepancy raises.
    """
    import asyncio
    import shutil

    # The store is the harness's own scratch area; start each run clean so
    # reruns with the same seed produce identical logs and exports.
    if Path(config.store_dir).exists():
        shutil.rmtree(config.store_dir)

    clock = VirtualClock()
    app = create_app(config.service_config(), clock=clock)

    # Load the same data the service sees, for truths and integrity checking.
    truths = {
        ts.product_id: split_task(ts, config.horizon_days).truth
        for ts in load_sales_csv(config.sales_path)
    }

    records, export_text = asyncio.run(_drive_agents(config, app, clock, truths))
    exported = _parse_export(export_text)
    records = _reconcile(records, exported)
    write_results_csv(records, out_path)
    return records


async def _drive_agents(
    config: SimConfig, app, clock: VirtualClock, truths: dict[str, np.ndarray]
) -> tuple[list[MetricRecord], str]:
    records: list[MetricRecord] = []
    transport = httpx.ASGITransport(app=app)
    async with httpx.AsyncClient(transport=transport, base_url="http://fss") as client:

        async def request(method: str, url: str, **kwargs):
            response = await client.request(method, url, **kwargs)
            if response.status_code >= 400:
                raise RuntimeError(f"{method} {url} failed: {response.status_code} {response.text}")
            if response.headers.get("content-type", "").startswith("text/csv"):
                return response.text
            return response.json()

        for treatment in sorted(config.plans):
            plan = config.plans[treatment]
            for agent_idx in range(plan.agents):
                policy = plan.policies[agent_idx % len(plan.policies)]
                # string seeds hash stably across processes, unlike tuples
                agent_rng = random.Random(f"{config.seed}:{treatment}:{agent_idx}")
                worker = f"{treatment.lower()}-agent-{agent_idx:03d}"

                created = await request(
                    "POST", "/sessions", json={"worker_id": worker, "treatment": treatment}
                )
                session_id = created["session_id"]

                finals: list[tuple[str, np.ndarray, np.ndarray]] = []
                for k in range(1, len(created["products"]) + 1):
                    view = await request("GET", f"/sessions/{session_id}/products/{k}/view")
                    model_totals = np.asarray(view["forecast"]["total"], dtype=float)
                    achieved = model_totals
                    clock.advance(agent_rng.randrange(25, 95))

                    edit = _policy_target(policy, treatment, view, agent_rng)
                    if edit is not None:
                        key, body = edit
                        updated = await request(
                            "POST",
                            f"/sessions/{session_id}/products/{k}/adjustments",
                            json={key: body},
                        )
                        achieved = np.asarray(updated["forecast"]["total"], dtype=float)
                        clock.advance(agent_rng.randrange(3, 12))

                    await request(
                        "POST",
                        f"/sessions/{session_id}/products/{k}/signoff",
                        json={"at": clock()},
                    )
                    finals.append((view["product_id"], model_totals, achieved))

                scores = [agent_rng.randint(1, 7) for _ in range(5)]
                clock.advance(agent_rng.randrange(10, 40))
                receipt = await request(
                    "POST", f"/sessions/{session_id}/survey", json={"scores": scores}
                )

                for (product_id, model_totals, achieved), result in zip(
                    finals, receipt["per_product"]
                ):
                    truth = truths[product_id]
                    triple = ForecastTriple(model_totals, achieved, truth)
                    try:
                        mape_value = mape(truth, achieved)
                        mape_float, excluded = float(mape_value), mape_value.excluded_zero_days
                    except UndefinedMetricError:
                        mape_float, excluded = None, len(truth)
                    records.append(
                        MetricRecord(
                            participant=worker,
                            treatment=treatment,
                            product=product_id,
                            av=adjustment_volume(triple),
                            rmae=rmae(triple),
                            mape=mape_float,
                            mape_excluded_days=excluded,
                            model_ses_rmae=None,  # filled from the export below
                            bonus=result["bonus"],
                            survey=tuple(float(s) for s in scores),
                            satisfaction=satisfaction_scale(scores),
                        )
                    )

        export_text = await request("GET", "/export")
    return records, export_text


def _parse_export(text: str) -> list[MetricRecord]:
    import tempfile

    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "export.csv"
        path.write_text(text, encoding="utf-8")
        return read_results_csv(path)


def _reconcile(
    local: list[MetricRecord], exported: list[MetricRecord]
) -> list[MetricRecord]:
    """Cross-check harness metrics against the service export, then merge.

    The harness computes AV/rMAE/MAPE straight from raw forecasts; the service
    computes them from its event store. They must agree exactly.
    """
    by_key = {(r.participant, r.product): r for r in exported}
    if len(by_key) != len(exported) or len(local) != len(exported):
        raise RuntimeError("export row mismatch: pipeline integrity violated")
    merged = []
    for mine in local:
        theirs = by_key.get((mine.participant, mine.product))
        if theirs is None:
            raise RuntimeError(f"missing export row for {mine.participant}/{mine.product}")
        for field_name in ("av", "rmae", "mape", "bonus"):
            a, b = getattr(mine, field_name), getattr(theirs, field_name)
            if a != b:
                raise RuntimeError(
                    f"pipeline integrity violated: {field_name} differs for "
                    f"{mine.participant}/{mine.product}: harness {a!r} vs export {b!r}"
                )
        merged.append(
            MetricRecord(
                participant=mine.participant,
                treatment=mine.treatment,
                product=mine.product,
                av=mine.av,
                rmae=mine.rmae,
                mape=mine.mape,
                mape_excluded_days=mine.mape_excluded_days,
                model_ses_rmae=theirs.model_ses_rmae,
                bonus=mine.bonus,
                signoff_seconds=theirs.signoff_seconds,
                completion_seconds=theirs.completion_seconds,
                survey=mine.survey,
                satisfaction=mine.satisfaction,
                duplicate=theirs.duplicate,
            )
        )
    return merged
