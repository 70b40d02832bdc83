"""Session orchestration: treatment gating, sign-off workflow, survey, export.

All state changes append to the event store first; in-memory sessions are a
cache that `replay_session` can rebuild from the log alone.
"""

from __future__ import annotations

import random
import threading
import time
from dataclasses import dataclass, field

import numpy as np

from ..adjust import (
    AdjustmentState,
    ComponentKind,
    apply_level_redraw,
    apply_value_edit,
    apply_weekly_edit,
    apply_yearly_redraw,
    compose_components,
    compose_final,
    reset_all,
    reset_component,
    weekly_residual_view,
    yearly_override_curve,
    yearly_residual_view,
)
from ..data import (
    EventCalendar,
    ForecastTask,
    day_from_iso,
    iso_from_day,
    load_calendar_csv,
    load_sales_csv,
    split_task,
)
from ..errors import (
    DuplicateWorkerError,
    SessionError,
    TreatmentViolationError,
    UndefinedMetricError,
    ValidationError,
)
from ..metrics import (
    ForecastTriple,
    MetricRecord,
    adjustment_volume,
    bonus,
    cap_session_total,
    mape,
    rmae,
    satisfaction_scale,
)
from ..model import DecomposedForecast, FittedModel, YEARLY_PERIOD, fit, predict_decomposed, ses_forecast
from .config import ServiceConfig
from .store import EventStore

COMPONENT_KEYS = ("level", "weekly", "yearly")
EDIT_KEYS = COMPONENT_KEYS + ("values", "reset")
EXPLAIN_LABEL = "Explain Values"
DETAILS_LABEL = "View Details"


@dataclass(frozen=True)
class ProductContext:
    """Everything precomputed for one product at service start."""

    product_id: str
    task: ForecastTask
    calendar: EventCalendar
    model: FittedModel
    horizon: DecomposedForecast  # components over the forecast horizon
    display: DecomposedForecast  # components over history + horizon
    ses: np.ndarray
    model_mae: float
    ses_mae: float
    model_ses_rmae: float | None
    weekly_residuals: list[tuple[int, int, float]]
    yearly_residuals: list[tuple[float, int, float]] | None


def build_product_context(
    product_id: str,
    task: ForecastTask,
    calendar: EventCalendar,
    config: ServiceConfig,
) -> ProductContext:
    model = fit(task, calendar, config.model_spec)
    horizon = predict_decomposed(model, task.truth_days, calendar)
    all_days = np.concatenate([task.history.days, task.truth_days])
    display = predict_decomposed(model, all_days, calendar)
    ses = ses_forecast(task)
    model_mae = float(np.mean(np.abs(horizon.total - task.truth)))
    ses_mae = float(np.mean(np.abs(ses - task.truth)))
    weekly_rows = weekly_residual_view(
        model, task.history, calendar, config.residual_weeks_max
    )
    yearly_rows = None
    if len(task.history) > int(YEARLY_PERIOD):
        yearly_rows = yearly_residual_view(
            model, task.history, calendar, len(task.history)
        )
    return ProductContext(
        product_id=product_id,
        task=task,
        calendar=calendar,
        model=model,
        horizon=horizon,
        display=display,
        ses=ses,
        model_mae=model_mae,
        ses_mae=ses_mae,
        model_ses_rmae=(model_mae / ses_mae) if ses_mae > 0 else None,
        weekly_residuals=weekly_rows,
        yearly_residuals=yearly_rows,
    )


def build_product_contexts(config: ServiceConfig) -> dict[str, ProductContext]:
    series = load_sales_csv(config.sales_path)
    calendar = load_calendar_csv(config.calendar_path)
    wanted = set(config.products) if config.products else None
    contexts: dict[str, ProductContext] = {}
    for ts in series:
        if wanted is not None and ts.product_id not in wanted:
            continue
        task = split_task(ts, config.horizon_days)
        contexts[ts.product_id] = build_product_context(ts.product_id, task, calendar, config)
    if wanted is not None and (missing := wanted - set(contexts)):
        raise ValidationError(f"configured products missing from sales data: {sorted(missing)}")
    if not contexts:
        raise ValidationError("no products loaded")
    return contexts


@dataclass
class ProductSlot:
    product_id: str
    state: AdjustmentState
    view_start: float | None = None
    signed_off_at: float | None = None
    final: np.ndarray | None = None


@dataclass
class Session:
    session_id: str
    worker_id: str
    treatment: str
    created: float
    slots: list[ProductSlot]
    duplicate: bool = False
    active_index: int = 1  # 1-based; None once every product is signed off
    survey: tuple[float, ...] | None = None
    comment: str = ""
    satisfaction: float | None = None
    secret_key: str | None = None
    per_product_results: list[dict] = field(default_factory=list)
    bonus_total: float | None = None
    completed: float | None = None
    seq: int = 0
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    @property
    def is_completed(self) -> bool:
        return self.completed is not None

    def slot(self, product_index: int) -> ProductSlot:
        if not 1 <= product_index <= len(self.slots):
            raise SessionError(f"no product {product_index}", code="not_found")
        return self.slots[product_index - 1]


class SessionManager:
    """Serializes per-session operations and persists every event."""

    def __init__(
        self,
        contexts: dict[str, ProductContext],
        config: ServiceConfig,
        store: EventStore,
        clock=time.time,
    ):
        self._contexts = contexts
        self._config = config
        self._store = store
        self._clock = clock
        self._rng = random.Random(config.rng_seed)
        self._sessions: dict[str, Session] = {}
        self._worker_sessions: dict[str, list[str]] = {}
        self._counter = 0
        self._create_lock = threading.Lock()
        self._treatment_cursor = 0

    # ------------------------------------------------------------------
    def _now(self) -> float:
        return float(self._clock())

    def _log(self, session: Session, event_type: str, data: dict) -> None:
        session.seq += 1
        self._store.append(
            session.session_id,
            {"seq": session.seq, "ts": self._now(), "type": event_type, "data": data},
        )

    def context(self, product_id: str) -> ProductContext:
        return self._contexts[product_id]

    def get_session(self, session_id: str) -> Session:
        session = self._sessions.get(session_id)
        if session is None:
            raise SessionError(f"unknown session {session_id}", code="not_found")
        return session

    def _assign_products(self) -> list[str]:
        pool = sorted(self._contexts)
        k = min(self._config.products_per_session, len(pool))
        start = (self._counter * k) % len(pool)
        return [pool[(start + i) % len(pool)] for i in range(k)]

    def _pick_treatment(self, treatment: str | None) -> str:
        if treatment is not None:
            if treatment not in ("O", "T", "TA"):
                raise ValidationError(f"unknown treatment {treatment!r}")
            return treatment
        if self._config.treatment_mode != "round_robin":
            raise ValidationError("treatment is required (service runs in 'param' mode)")
        choice = self._config.treatments[self._treatment_cursor % len(self._config.treatments)]
        self._treatment_cursor += 1
        return choice

    # ------------------------------------------------------------------
    def create_session(self, worker_id: str, treatment: str | None = None) -> tuple[Session, bool]:
        """Create (or resume) a session; returns (session, resumed)."""
        if not worker_id or not worker_id.strip():
            raise ValidationError("worker_id must be non-empty")
        worker_id = worker_id.strip()
        with self._create_lock:
            previous = self._worker_sessions.get(worker_id, [])
            for sid in previous:
                session = self._sessions[sid]
                if not session.is_completed and (treatment is None or treatment == session.treatment):
                    return session, True
            duplicate = bool(previous)
            if duplicate and not self._config.allow_duplicate_workers:
                raise DuplicateWorkerError(
                    f"worker {worker_id} already participated (duplicate)"
                )
            chosen = self._pick_treatment(treatment)
            products = self._assign_products()
            session_id = f"s{self._counter:05d}-{self._rng.getrandbits(32):08x}"
            self._counter += 1
            slots = [
                ProductSlot(
                    product_id=pid,
                    state=AdjustmentState.for_horizon(
                        self._contexts[pid].task.truth_days,
                        self._contexts[pid].model.yearly_order,
                    ),
                )
                for pid in products
            ]
            session = Session(
                session_id=session_id,
                worker_id=worker_id,
                treatment=chosen,
                created=self._now(),
                slots=slots,
                duplicate=duplicate,
            )
            self._sessions[session_id] = session
            self._worker_sessions.setdefault(worker_id, []).append(session_id)
            self._log(
                session,
                "session_created",
                {
                    "worker_id": worker_id,
                    "treatment": chosen,
                    "products": products,
                    "duplicate": duplicate,
                },
            )
            return session, False

    # ------------------------------------------------------------------
    def _require_active(self, session: Session, product_index: int) -> ProductSlot:
        if session.is_completed:
            raise SessionError("session already completed", code="completed")
        slot = session.slot(product_index)
        if session.active_index is None or product_index != session.active_index:
            raise SessionError(
                f"product {product_index} is not the active one", code="out_of_order"
            )
        return slot

    def get_view(self, session_id: str, product_index: int) -> dict:
        session = self.get_session(session_id)
        with session.lock:
            slot = self._require_active(session, product_index)
            now = self._now()
            first = slot.view_start is None
            if first:
                slot.view_start = now
            self._log(session, "view_opened", {"product_index": product_index, "at": now, "first": first})
            return self._view_payload(session, product_index, slot)

    # ------------------------------------------------------------------
    def _view_payload(self, session: Session, product_index: int, slot: ProductSlot) -> dict:
        ctx = self._contexts[slot.product_id]
        state = slot.state
        treatment = session.treatment
        hist_len = len(ctx.task.history)

        display = compose_components(ctx.display, state)
        final = compose_final(ctx.horizon, state)

        history_days = ctx.task.history.days
        horizon_days = ctx.task.truth_days
        payload: dict = {
            "session_id": session.session_id,
            "treatment": treatment,
            "product_index": product_index,
            "product_count": len(session.slots),
            "product_id": slot.product_id,
            "function_label": EXPLAIN_LABEL if treatment in ("T", "TA") else DETAILS_LABEL,
            "signoff_min_seconds": self._config.signoff_min_seconds,
            "horizon_days": ctx.task.horizon_days,
            "history": {
                "dates": [iso_from_day(d) for d in history_days],
                "sales": [float(v) for v in ctx.task.history.sales],
            },
            "fit": {
                "dates": [iso_from_day(d) for d in history_days],
                "total": [float(v) for v in display.total[:hist_len]],
            },
            "forecast": {
                "dates": [iso_from_day(d) for d in horizon_days],
                "total": [float(v) for v in final],
            },
            "pinned_dates": [iso_from_day(d) for d, _ in state.value_overrides],
        }
        if treatment == "O":
            payload["editable"] = {"values": True}
            return payload

        all_days = display.days
        payload["decomposition"] = {
            "dates": [iso_from_day(d) for d in all_days],
            "level": [float(v) for v in display.level],
            "weekly": [float(v) for v in display.weekly],
            "yearly": [float(v) for v in display.yearly],
            "events": [float(v) for v in display.events],
            "total": [float(v) for v in display.total],
        }
        if state.weekly_override is not None:
            weekly_pattern = list(state.weekly_override)
        else:
            weekly_pattern = [float(v) for v in ctx.model.weekly_effects()]
        payload["weekly_pattern"] = weekly_pattern

        if state.yearly_override is not None:
            phase, curve = yearly_override_curve(state.yearly_coeffs, state.yearly_order)
        else:
            phase, curve = ctx.model.yearly_curve()
        payload["yearly_curve"] = {
            "phase": [float(p) for p in phase],
            "value": [float(v) for v in curve],
        }
        payload["event_effects"] = {k: float(v) for k, v in sorted(ctx.model.event_effects.items())}
        payload["events_by_date"] = {
            iso_from_day(d): list(ctx.calendar.events_on(int(d)))
            for d in all_days
            if ctx.calendar.events_on(int(d))
        }

        if treatment == "T":
            payload["editable"] = {"values": True}
            return payload

        payload["editable"] = {"level": True, "weekly": True, "yearly": True, "values": True}
        payload["residuals"] = {
            "max_weeks": self._config.residual_weeks_max,
            "weekly": [
                {"weekday": w, "date": iso_from_day(d), "value": v}
                for w, d, v in ctx.weekly_residuals
            ],
            "yearly": [
                {"phase": p, "date": iso_from_day(d), "value": v}
                for p, d, v in (ctx.yearly_residuals or [])
            ],
        }
        return payload

    # ------------------------------------------------------------------
    def _allowed_edit_keys(self, treatment: str) -> tuple[str, ...]:
        if treatment == "TA":
            return EDIT_KEYS
        return ("values", "reset")

    def _apply_edit(self, state: AdjustmentState, payload: dict, treatment: str) -> AdjustmentState:
        """Validate one edit payload against the treatment and apply it."""
        keys = [k for k in payload if k in EDIT_KEYS]
        if len(keys) != 1 or len(payload) != 1:
            raise ValidationError(
                f"edit payload must have exactly one of {', '.join(EDIT_KEYS)}"
            )
        key = keys[0]
        allowed = self._allowed_edit_keys(treatment)
        if key not in allowed:
            raise TreatmentViolationError(
                f"treatment {treatment} does not permit '{key}' edits"
            )
        body = payload[key]
        if key == "reset":
            if body == "all":
                return reset_all(state)
            if treatment != "TA" and body != "values":
                raise TreatmentViolationError(
                    f"treatment {treatment} may only reset 'values' or 'all'"
                )
            return reset_component(state, ComponentKind(body))
        if key == "weekly":
            return apply_weekly_edit(state, self._as_floats(body, 7))
        if key == "yearly":
            return apply_yearly_redraw(state, self._as_pairs(body))
        if key == "level":
            return apply_level_redraw(
                state, [(day_from_iso(str(d)), float(v)) for d, v in self._as_pairs(body)]
            )
        # values: {iso date: value}
        if not isinstance(body, dict) or not body:
            raise ValidationError("'values' must be a non-empty object of date: value")
        for date_text, value in body.items():
            state = apply_value_edit(state, day_from_iso(str(date_text)), float(value))
        return state

    @staticmethod
    def _as_floats(body, expected: int) -> list[float]:
        if not isinstance(body, (list, tuple)) or len(body) != expected:
            raise ValidationError(f"expected a list of {expected} numbers")
        return [float(v) for v in body]

    @staticmethod
    def _as_pairs(body) -> list[tuple]:
        if not isinstance(body, (list, tuple)) or any(len(p) != 2 for p in body):
            raise ValidationError("expected a list of [position, value] pairs")
        return [(p[0], p[1]) for p in body]

    def post_adjustment(self, session_id: str, product_index: int, payload: dict) -> dict:
        session = self.get_session(session_id)
        with session.lock:
            slot = self._require_active(session, product_index)
            try:
                slot.state = self._apply_edit(slot.state, payload, session.treatment)
            except (TreatmentViolationError, ValidationError) as exc:
                self._log(
                    session,
                    "adjustment_rejected",
                    {"product_index": product_index, "edit": payload, "reason": str(exc)},
                )
                raise
            self._log(session, "adjustment_applied", {"product_index": product_index, "edit": payload})
            ctx = self._contexts[slot.product_id]
            final = compose_final(ctx.horizon, slot.state)
            return {
                "forecast": {
                    "dates": [iso_from_day(d) for d in ctx.task.truth_days],
                    "total": [float(v) for v in final],
                },
                "pinned_dates": [iso_from_day(d) for d, _ in slot.state.value_overrides],
                "state": slot.state.to_payload(),
            }

    # ------------------------------------------------------------------
    def sign_off(self, session_id: str, product_index: int, at: float | None = None) -> dict:
        session = self.get_session(session_id)
        with session.lock:
            if session.is_completed:
                raise SessionError("session already completed", code="completed")
            slot = session.slot(product_index)
            if slot.signed_off_at is not None:
                raise SessionError("product already signed off", code="already_signed")
            if session.active_index is None or product_index != session.active_index:
                raise SessionError(
                    f"product {product_index} is not the active one", code="out_of_order"
                )
            at = self._now() if at is None else float(at)
            min_s = self._config.signoff_min_seconds
            if slot.view_start is None or at - slot.view_start < min_s:
                self._log(
                    session,
                    "signoff_rejected",
                    {"product_index": product_index, "at": at, "reason": "too_fast"},
                )
                raise SessionError(
                    f"viewed for less than {min_s:.0f} seconds", code="too_fast"
                )
            previous = [s.signed_off_at for s in session.slots if s.signed_off_at is not None]
            if previous and at <= max(previous):
                raise SessionError("sign-off timestamps must increase", code="out_of_order")

            ctx = self._contexts[slot.product_id]
            final = compose_final(ctx.horizon, slot.state)
            slot.final = final
            slot.signed_off_at = at
            self._log(
                session,
                "product_signed_off",
                {
                    "product_index": product_index,
                    "at": at,
                    "final": {
                        iso_from_day(d): float(v) for d, v in zip(ctx.task.truth_days, final)
                    },
                },
            )
            if product_index < len(session.slots):
                session.active_index = product_index + 1
                return {"status": "next_product", "active_product": session.active_index}
            session.active_index = None
            return {"status": "survey"}

    # ------------------------------------------------------------------
    def submit_survey(self, session_id: str, scores, comment: str = "") -> dict:
        session = self.get_session(session_id)
        with session.lock:
            if session.is_completed:
                raise SessionError("session already completed", code="completed")
            if any(slot.signed_off_at is None for slot in session.slots):
                raise SessionError("all products must be signed off first", code="premature_survey")
            if not isinstance(scores, (list, tuple)) or len(scores) != 5:
                raise ValidationError("survey needs exactly 5 scores")
            values = tuple(float(v) for v in scores)
            satisfaction = satisfaction_scale(values)

            per_product = []
            bonuses = []
            for slot in session.slots:
                ctx = self._contexts[slot.product_id]
                triple = ForecastTriple(ctx.horizon.total, slot.final, ctx.task.truth)
                try:
                    r = rmae(triple)
                    b = bonus(r)
                except UndefinedMetricError:
                    # model hit the truth exactly; no improvement is possible
                    r, b = None, 0.0
                bonuses.append(b)
                per_product.append({"product_id": slot.product_id, "rmae": r, "bonus": b})
            total = cap_session_total(bonuses)

            session.survey = values
            session.comment = str(comment or "")
            session.satisfaction = satisfaction
            session.secret_key = f"{self._rng.getrandbits(64):016x}"
            session.per_product_results = per_product
            session.bonus_total = total
            session.completed = self._now()
            self._log(
                session,
                "survey_submitted",
                {"scores": list(values), "comment": session.comment},
            )
            self._log(
                session,
                "session_completed",
                {
                    "secret_key": session.secret_key,
                    "per_product": per_product,
                    "bonus_total": total,
                    "satisfaction": satisfaction,
                },
            )
            return {
                "secret_key": session.secret_key,
                "satisfaction": satisfaction,
                "per_product": per_product,
                "bonus_total": total,
            }

    # ------------------------------------------------------------------
    def export_records(
        self,
        drop_duplicates: bool = False,
        min_completion_seconds: float | None = None,
        sessions: dict[str, Session] | None = None,
    ) -> list[MetricRecord]:
        """Per-(participant, product) rows for every completed session."""
        source = self._sessions if sessions is None else sessions
        ordered = sorted(source.values(), key=lambda s: (s.created, s.session_id))
        records: list[MetricRecord] = []
        for session in ordered:
            if not session.is_completed:
                continue
            completion = session.completed - session.created
            if drop_duplicates and session.duplicate:
                continue
            if min_completion_seconds is not None and completion < min_completion_seconds:
                continue
            for slot, result in zip(session.slots, session.per_product_results):
                ctx = self._contexts[slot.product_id]
                triple = ForecastTriple(ctx.horizon.total, slot.final, ctx.task.truth)
                try:
                    av = adjustment_volume(triple)
                except UndefinedMetricError:
                    av = float("nan")
                try:
                    mape_value = mape(ctx.task.truth, slot.final)
                    mape_float, excluded = float(mape_value), mape_value.excluded_zero_days
                except UndefinedMetricError:
                    mape_float, excluded = None, ctx.task.horizon_days
                records.append(
                    MetricRecord(
                        participant=session.worker_id,
                        treatment=session.treatment,
                        product=slot.product_id,
                        av=av,
                        rmae=result["rmae"] if result["rmae"] is not None else float("nan"),
                        mape=mape_float,
                        mape_excluded_days=excluded,
                        model_ses_rmae=ctx.model_ses_rmae,
                        bonus=result["bonus"],
                        signoff_seconds=slot.signed_off_at - slot.view_start,
                        completion_seconds=completion,
                        survey=session.survey,
                        satisfaction=session.satisfaction,
                        duplicate=session.duplicate,
                    )
                )
        return records

    # ------------------------------------------------------------------
    def replay_session(self, session_id: str) -> Session:
        """Rebuild a session snapshot purely from its persisted event log."""
        events = self._store.read(session_id)
        if not events or events[0]["type"] != "session_created":
            raise SessionError(f"no event log for session {session_id}", code="not_found")
        head = events[0]
        data = head["data"]
        slots = [
            ProductSlot(
                product_id=pid,
                state=AdjustmentState.for_horizon(
                    self._contexts[pid].task.truth_days,
                    self._contexts[pid].model.yearly_order,
                ),
            )
            for pid in data["products"]
        ]
        session = Session(
            session_id=session_id,
            worker_id=data["worker_id"],
            treatment=data["treatment"],
            created=head["ts"],
            slots=slots,
            duplicate=data["duplicate"],
        )
        session.seq = events[-1]["seq"]
        for event in events[1:]:
            kind, body, ts = event["type"], event["data"], event["ts"]
            if kind == "view_opened" and body["first"]:
                session.slots[body["product_index"] - 1].view_start = body["at"]
            elif kind == "adjustment_applied":
                slot = session.slots[body["product_index"] - 1]
                slot.state = self._apply_edit(slot.state, body["edit"], session.treatment)
            elif kind == "product_signed_off":
                slot = session.slots[body["product_index"] - 1]
                ctx = self._contexts[slot.product_id]
                slot.final = np.array(
                    [body["final"][iso_from_day(d)] for d in ctx.task.truth_days]
                )
                slot.signed_off_at = body["at"]
                idx = body["product_index"]
                session.active_index = idx + 1 if idx < len(session.slots) else None
            elif kind == "survey_submitted":
                session.survey = tuple(float(v) for v in body["scores"])
                session.comment = body["comment"]
            elif kind == "session_completed":
                session.secret_key = body["secret_key"]
                session.per_product_results = body["per_product"]
                session.bonus_total = body["bonus_total"]
                session.satisfaction = body["satisfaction"]
                session.completed = ts
        return session

    def export_records_from_store(
        self,
        drop_duplicates: bool = False,
        min_completion_seconds: float | None = None,
    ) -> list[MetricRecord]:
        sessions = {sid: self.replay_session(sid) for sid in self._store.session_ids()}
        return self.export_records(drop_duplicates, min_completion_seconds, sessions)

    # ------------------------------------------------------------------
    def scan_component_overrides(self) -> dict[str, int]:
        """Count persisted sessions per treatment whose state has component overrides.

        Replays every session from the store; the treatment-gating property
        demands zero counts for O and T.
        """
        counts = {"O": 0, "T": 0, "TA": 0}
        for sid in self._store.session_ids():
            session = self.replay_session(sid)
            if any(slot.state.has_component_overrides() for slot in session.slots):
                counts[session.treatment] += 1
        return counts
