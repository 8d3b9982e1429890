"""HTTP + event-stream gateway exposing planner sessions.

One process serves many sessions; each session is single-writer (a lock
serializes its steps) and its event log fans out to any number of stream
readers. Artifacts are served content-addressed so plot images and outputs
are immutable cacheable resources.
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query
from fastapi.responses import FileResponse, StreamingResponse

from ..analysis.store import ResultStore
from ..errors import NoPendingPlanError, SumoflowError
from ..planner.conversation import SessionState
from ..planner.engine import PlannerEngine
from ..scenario.geocode import Geocoder
from ..toolserver.runner import SubprocessRunner
from ..toolserver.workspace import WorkspaceManager
from ..tools_catalog import ToolContext, build_registry
from .events import EventLog
from .models import (
    CreateSessionRequest,
    CreateSessionResponse,
    EventModel,
    EventsResponse,
    PlanDecisionRequest,
    PostMessageRequest,
    RunMetricsResponse,
    SessionStateResponse,
)


@dataclass
class GatewayConfig:
    workspace_root: Path
    backend_factory: "callable"  # () -> llm backend for a new session
    dry_run_tools: bool = False
    osm_fixture: Path | None = None
    read_only_roots: list[Path] = field(default_factory=list)
    ui_dir: Path | None = None  # built web client, served at /ui when present
    history_cap: int = 50
    state_context_cap: int = 10
    templates_dir: Path | None = None


@dataclass
class SessionRuntime:
    session_id: str
    engine: PlannerEngine
    log: EventLog
    lock: threading.Lock = field(default_factory=threading.Lock)

    def persist(self, root: Path) -> None:
        self.engine.state.save(root / "session.json")


class Gateway:
    """Owns session runtimes and the shared result store."""

    def __init__(self, config: GatewayConfig):
        self.config = config
        self.manager = WorkspaceManager(config.workspace_root)
        self.store = ResultStore(config.workspace_root / "results.sqlite")
        self.sessions: dict[str, SessionRuntime] = {}
        self._create_lock = threading.Lock()

    def create_session(self, session_id: str | None = None) -> SessionRuntime:
        with self._create_lock:
            sid = session_id or f"s{uuid.uuid4().hex[:10]}"
            if sid in self.sessions:
                raise SumoflowError(f"session {sid!r} already exists")
            workspace = self.manager.open(sid)
            runner = SubprocessRunner(read_only_roots=self.config.read_only_roots)
            ctx = ToolContext(
                workspace=workspace,
                runner=runner,
                store=self.store,
                geocoder=Geocoder(),
                osm_fixture=self.config.osm_fixture,
                session_id=sid,
            )
            registry = build_registry(ctx, dry_run=self.config.dry_run_tools)
            log = EventLog()
            session_file = workspace.root / "session.json"
            state = SessionState.load(session_file) if session_file.exists() else SessionState(sid)
            engine = PlannerEngine(
                state=state,
                registry=registry,
                backend=self.config.backend_factory(),
                on_event=log.append,
                history_cap=self.config.history_cap,
                state_context_cap=self.config.state_context_cap,
                templates_dir=self.config.templates_dir,
            )
            runtime = SessionRuntime(session_id=sid, engine=engine, log=log)
            self.sessions[sid] = runtime
            return runtime

    def get(self, session_id: str) -> SessionRuntime:
        runtime = self.sessions.get(session_id)
        if runtime is None:
            raise KeyError(session_id)
        return runtime


def create_app(config: GatewayConfig) -> FastAPI:
    gateway = Gateway(config)
    app = FastAPI(title="sumoflow gateway", version="0.1.0")
    app.state.gateway = gateway

    def _runtime(session_id: str) -> SessionRuntime:
        try:
            return gateway.get(session_id)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"no session {session_id!r}") from None

    @app.post("/sessions", response_model=CreateSessionResponse)
    def create_session(request: CreateSessionRequest | None = None) -> CreateSessionResponse:
        session_id = request.session_id if request else None
        try:
            runtime = gateway.create_session(session_id)
        except SumoflowError as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from None
        return CreateSessionResponse(session_id=runtime.session_id)

    @app.post("/sessions/{session_id}/messages", response_model=EventsResponse)
    def post_message(session_id: str, request: PostMessageRequest) -> EventsResponse:
        runtime = _runtime(session_id)
        with runtime.lock:
            before = len(runtime.log.events)
            try:
                runtime.engine.step(request.text)
            except SumoflowError as exc:
                raise HTTPException(status_code=400, detail=str(exc)) from None
            finally:
                runtime.persist(gateway.manager.open(session_id).root)
            produced = runtime.log.since(before)
        return EventsResponse(events=[EventModel(**e.to_json()) for e in produced])

    @app.post("/sessions/{session_id}/plan-decision", response_model=EventsResponse)
    def plan_decision(session_id: str, request: PlanDecisionRequest) -> EventsResponse:
        runtime = _runtime(session_id)
        with runtime.lock:
            before = len(runtime.log.events)
            try:
                runtime.engine.decide_plan(request.decision, request.edits)
            except NoPendingPlanError as exc:
                raise HTTPException(status_code=409, detail=str(exc)) from None
            except SumoflowError as exc:
                raise HTTPException(status_code=400, detail=str(exc)) from None
            finally:
                runtime.persist(gateway.manager.open(session_id).root)
            produced = runtime.log.since(before)
        return EventsResponse(events=[EventModel(**e.to_json()) for e in produced])

    @app.get("/sessions/{session_id}/events")
    def stream_events(
        session_id: str,
        from_seq: int = Query(default=0, alias="from", ge=0),
        wait_s: float = Query(default=0.0, ge=0.0, le=30.0),
    ) -> StreamingResponse:
        runtime = _runtime(session_id)

        def generate():
            backlog = (
                runtime.log.wait_for_more(from_seq, wait_s)
                if wait_s > 0
                else runtime.log.since(from_seq)
            )
            for event in backlog:
                yield event.to_sse()

        return StreamingResponse(generate(), media_type="text/event-stream")

    @app.get("/sessions/{session_id}/state", response_model=SessionStateResponse)
    def session_state(session_id: str) -> SessionStateResponse:
        runtime = _runtime(session_id)
        with runtime.lock:
            return SessionStateResponse(**runtime.engine.state.snapshot())

    @app.get("/runs/{run_id}/metrics", response_model=RunMetricsResponse)
    def run_metrics(run_id: str) -> RunMetricsResponse:
        try:
            rows = gateway.store.summary_rows(run_id)
        except SumoflowError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from None
        return RunMetricsResponse(
            run_id=run_id,
            metrics=[
                {"metric": metric, "stat": stat, "value": value, "label": label}
                for metric, stat, value, label in rows
            ],
        )

    @app.get("/artifacts/{content_hash}")
    def artifact_by_hash(content_hash: str) -> FileResponse:
        for session_id in list(gateway.sessions):
            workspace = gateway.manager.open(session_id)
            artifact = workspace.by_hash(content_hash)
            if artifact is not None and artifact.path.exists():
                return FileResponse(
                    artifact.path,
                    headers={"Cache-Control": "public, max-age=31536000, immutable"},
                )
        raise HTTPException(status_code=404, detail=f"no artifact with hash {content_hash}")

    if config.ui_dir is not None and Path(config.ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=config.ui_dir, html=True), name="ui")

    return app
