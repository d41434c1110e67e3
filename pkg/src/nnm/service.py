"""HTTP service exposing builder and viewer sessions, persisted as JSON files."""

from __future__ import annotations

import json
import os
import threading
import time
import uuid
from pathlib import Path
from typing import Callable, Literal

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import PlainTextResponse
from pydantic import BaseModel

from .backends import BackendError, GenerationBackend
from .gml import export_gml
from .graph import utc_now
from .layout import LayoutParams
from .script import DEFAULT_AGENT_SPEED, export_trajectory_csv
from .sessions import SessionState
from .similarity import Embedder, HashedBagEmbedder


class SessionStore:
    """One JSON document per session under the data directory."""

    def __init__(self, data_dir: str | Path):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)

    def path(self, session_id: str) -> Path:
        return self.data_dir / f"{session_id}.json"

    def save(self, doc: dict) -> None:
        target = self.path(doc["session_id"])
        tmp = target.with_suffix(".json.tmp")
        tmp.write_text(json.dumps(doc, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
        os.replace(tmp, target)

    def load(self, session_id: str) -> dict | None:
        path = self.path(session_id)
        if not path.exists():
            return None
        return json.loads(path.read_text(encoding="utf-8"))


class PromptRequest(BaseModel):
    template: str
    seed: str
    seed_group: str | None = None


class AssignRequest(BaseModel):
    node_name: str


class LayoutRequest(BaseModel):
    repulsion_k: float = 100.0
    gravity_k: float = 1.0
    iterations: int = 500
    step_decay: float = 0.99
    seed: int = 42


class SimilarRequest(BaseModel):
    text: str
    k: int = 5


class StepRequest(BaseModel):
    direction: Literal["advance", "reverse", "reset"]


def create_app(
    data_dir: str | Path,
    *,
    backend: GenerationBackend | None = None,
    embedder: Embedder | None = None,
    clock: Callable[[], str] = utc_now,
    frame_clock: Callable[[], float] = time.monotonic,
    agent_speed: float = DEFAULT_AGENT_SPEED,
    ui_dir: str | Path | None = None,
) -> FastAPI:
    """Build the service; backends are injected so tests stay hermetic."""
    app = FastAPI(title="nnm map service")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    store = SessionStore(data_dir)
    if embedder is None:
        embedder = HashedBagEmbedder()
    sessions: dict[str, SessionState] = {}
    locks: dict[str, threading.RLock] = {}
    registry_lock = threading.Lock()

    def session_kwargs() -> dict:
        return {
            "backend": backend,
            "embedder": embedder,
            "clock": clock,
            "frame_clock": frame_clock,
            "agent_speed": agent_speed,
        }

    def get_session(session_id: str) -> tuple[SessionState, threading.RLock]:
        with registry_lock:
            state = sessions.get(session_id)
            if state is None:
                doc = store.load(session_id)
                if doc is None:
                    raise HTTPException(status_code=404, detail=f"unknown session {session_id}")
                state = SessionState.from_document(doc, **session_kwargs())
                sessions[session_id] = state
            lock = locks.setdefault(session_id, threading.RLock())
        return state, lock

    @app.post("/sessions", status_code=201)
    def create_session() -> dict:
        session_id = uuid.uuid4().hex
        state = SessionState(session_id, **session_kwargs())
        with registry_lock:
            sessions[session_id] = state
            locks[session_id] = threading.RLock()
        store.save(state.to_document())
        return {"session_id": session_id}

    @app.get("/sessions/{session_id}")
    def get_document(session_id: str) -> dict:
        state, lock = get_session(session_id)
        with lock:
            return state.to_document()

    @app.put("/sessions/{session_id}")
    def put_document(session_id: str, doc: dict) -> dict:
        state, lock = get_session(session_id)
        with lock:
            doc = dict(doc)
            doc["session_id"] = session_id
            try:
                replacement = SessionState.from_document(doc, **session_kwargs())
            except (KeyError, ValueError) as exc:
                raise HTTPException(status_code=400, detail=f"bad document: {exc}") from exc
            with registry_lock:
                sessions[session_id] = replacement
            store.save(replacement.to_document())
            return replacement.to_document()

    @app.post("/sessions/{session_id}/prompt")
    def submit_prompt(session_id: str, req: PromptRequest) -> dict:
        state, lock = get_session(session_id)
        with lock:
            try:
                pending = state.submit_prompt(req.template, req.seed, req.seed_group)
            except BackendError as exc:
                raise HTTPException(
                    status_code=502,
                    detail=f"generation backend failed after retries: {exc}",
                ) from exc
            except ValueError as exc:
                raise HTTPException(status_code=400, detail=str(exc)) from exc
            store.save(state.to_document())
            return {"pending": [f.to_dict() for f in pending]}

    @app.post("/sessions/{session_id}/fragments/{fragment_id}/assign")
    def assign_fragment(session_id: str, fragment_id: int, req: AssignRequest) -> dict:
        state, lock = get_session(session_id)
        with lock:
            try:
                node_id = state.assign_fragment(fragment_id, req.node_name)
            except KeyError as exc:
                raise HTTPException(status_code=404, detail=str(exc.args[0])) from exc
            except ValueError as exc:
                raise HTTPException(status_code=400, detail=str(exc)) from exc
            store.save(state.to_document())
            return {"ok": True, "node_id": node_id}

    @app.post("/sessions/{session_id}/layout")
    def layout(session_id: str, req: LayoutRequest) -> dict:
        state, lock = get_session(session_id)
        with lock:
            try:
                params = LayoutParams(
                    repulsion_k=req.repulsion_k,
                    gravity_k=req.gravity_k,
                    iterations=req.iterations,
                    step_decay=req.step_decay,
                    seed=req.seed,
                )
                result = state.run_layout(params)
            except ValueError as exc:
                raise HTTPException(status_code=400, detail=str(exc)) from exc
            store.save(state.to_document())
            return {
                "positions": {str(i): list(p) for i, p in result.positions.items()},
                "iterations": len(result.displacement_history),
            }

    @app.post("/sessions/{session_id}/similar")
    def similar(session_id: str, req: SimilarRequest) -> dict:
        state, lock = get_session(session_id)
        with lock:
            try:
                return {"results": state.similar(req.text, req.k)}
            except ValueError as exc:
                raise HTTPException(status_code=400, detail=str(exc)) from exc

    @app.put("/sessions/{session_id}/script")
    def put_script(session_id: str, doc: dict) -> dict:
        state, lock = get_session(session_id)
        with lock:
            try:
                count = state.load_script(doc)
            except ValueError as exc:
                raise HTTPException(status_code=400, detail=str(exc)) from exc
            store.save(state.to_document())
            return {"steps": count}

    @app.post("/sessions/{session_id}/script/step")
    def step_script(session_id: str, req: StepRequest) -> dict:
        state, lock = get_session(session_id)
        with lock:
            try:
                outcome = state.step_script(req.direction)
            except ValueError as exc:
                raise HTTPException(status_code=400, detail=str(exc)) from exc
            store.save(state.to_document())
            return outcome

    @app.get("/sessions/{session_id}/frame")
    def frame(session_id: str) -> dict:
        state, lock = get_session(session_id)
        with lock:
            return state.frame()

    @app.get("/sessions/{session_id}/trajectory.csv")
    def trajectory_csv(session_id: str) -> PlainTextResponse:
        state, lock = get_session(session_id)
        with lock:
            return PlainTextResponse(
                export_trajectory_csv(state.records()), media_type="text/csv"
            )

    @app.get("/sessions/{session_id}/export.gml")
    def gml(session_id: str) -> PlainTextResponse:
        state, lock = get_session(session_id)
        with lock:
            return PlainTextResponse(export_gml(state.graph), media_type="text/plain")

    if ui_dir is not None and Path(ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
