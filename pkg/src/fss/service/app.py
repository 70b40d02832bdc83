"""HTTP wiring for the session service."""

from __future__ import annotations

import time

from fastapi import Body, FastAPI, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse

from ..errors import (
    DuplicateWorkerError,
    FssError,
    SessionError,
    TreatmentViolationError,
    ValidationError,
)
from ..tables import render_results_csv
from .config import ServiceConfig
from .manager import SessionManager, build_product_contexts
from .store import EventStore

SESSION_ERROR_STATUS = {
    "not_found": 404,
    "too_fast": 409,
    "out_of_order": 409,
    "already_signed": 409,
    "completed": 409,
    "premature_survey": 409,
}


def create_app(
    config: ServiceConfig | None = None,
    *,
    manager: SessionManager | None = None,
    clock=time.time,
) -> FastAPI:
    """Build the service; pass an explicit clock for deterministic timing."""
    if manager is None:
        if config is None:
            raise ValidationError("create_app needs a config or a prebuilt manager")
        contexts = build_product_contexts(config)
        manager = SessionManager(contexts, config, EventStore(config.store_dir), clock=clock)

    app = FastAPI(title="fss-session-service")
    app.state.manager = manager
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    def error_response(status: int, error: str, message: str, **extra) -> JSONResponse:
        return JSONResponse({"error": error, "message": message, **extra}, status_code=status)

    @app.exception_handler(FssError)
    async def handle_fss_error(request: Request, exc: FssError):
        if isinstance(exc, DuplicateWorkerError):
            return error_response(409, "duplicate_worker", str(exc), duplicate=True)
        if isinstance(exc, TreatmentViolationError):
            return error_response(403, "treatment_violation", str(exc))
        if isinstance(exc, SessionError):
            return error_response(SESSION_ERROR_STATUS.get(exc.code, 409), exc.code, str(exc))
        if isinstance(exc, ValidationError):
            return error_response(422, "invalid", str(exc))
        return error_response(500, "internal", str(exc))

    @app.post("/sessions", status_code=201)
    def create_session(payload: dict = Body(...)):
        worker_id = payload.get("worker_id", "")
        treatment = payload.get("treatment")
        session, resumed = manager.create_session(worker_id, treatment)
        body = {
            "session_id": session.session_id,
            "worker_id": session.worker_id,
            "treatment": session.treatment,
            "products": [slot.product_id for slot in session.slots],
            "active_product": session.active_index,
            "duplicate": session.duplicate,
            "resumed": resumed,
        }
        if resumed:
            body["resume_token"] = session.session_id
            return JSONResponse(body, status_code=200)
        return body

    @app.get("/sessions/{session_id}/products/{product_index}/view")
    def get_view(session_id: str, product_index: int):
        return manager.get_view(session_id, product_index)

    @app.post("/sessions/{session_id}/products/{product_index}/adjustments")
    def post_adjustment(session_id: str, product_index: int, payload: dict = Body(...)):
        return manager.post_adjustment(session_id, product_index, payload)

    @app.post("/sessions/{session_id}/products/{product_index}/signoff")
    def sign_off(session_id: str, product_index: int, payload: dict | None = Body(default=None)):
        at = None if not payload else payload.get("at")
        return manager.sign_off(session_id, product_index, at=at)

    @app.post("/sessions/{session_id}/survey")
    def submit_survey(session_id: str, payload: dict = Body(...)):
        return manager.submit_survey(
            session_id, payload.get("scores"), payload.get("comment", "")
        )

    @app.get("/export")
    def export(
        drop_duplicates: bool = Query(default=False),
        min_completion_seconds: float | None = Query(default=None),
        from_store: bool = Query(default=False),
    ):
        if from_store:
            records = manager.export_records_from_store(drop_duplicates, min_completion_seconds)
        else:
            records = manager.export_records(drop_duplicates, min_completion_seconds)
        return PlainTextResponse(render_results_csv(records), media_type="text/csv")

    return app
