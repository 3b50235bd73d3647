"""HTTP service for the teaching console.

One knowledge base per service. Statements, queries, graph and frame views
all call the same library code the CLI uses; mutations funnel through the
base's writer lock, reads serve the latest committed revision.

Routes (JSON bodies):
    POST /sessions                     -> {session_id}
    POST /sessions/{id}/statements     -> {machine_reply, kb_delta, revision}
    GET  /kb/graph                     -> graph view (nodes, edges, revision)
    POST /kb/query                     -> answer with derivation
    GET  /kb/frames/{name}             -> Input/Rules/Output table
    POST /kb/save                      -> {path, revision}

Errors: 400 parse/protocol/domain, 404 unknown element, 409 conflicts.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional, Union

from fastapi import FastAPI, Request
from fastapi.responses import FileResponse, JSONResponse
from fastapi.staticfiles import StaticFiles

from . import engine, persist
from .errors import (
    ConceptKitError,
    Inconsistent,
    IoError,
    NoCause,
    ParseError,
    ReciprocityConflict,
    UnknownConcept,
    UnknownFeature,
    UnknownFrame,
    UnknownReference,
)
from .facts import FactSet
from .kb import KnowledgeBase
from .teaching import Session, engine_answer_to_obj

_NOT_FOUND = (UnknownConcept, UnknownFeature, UnknownFrame, UnknownReference, NoCause)
_CONFLICT = (ReciprocityConflict, Inconsistent)


def _status_for(exc: ConceptKitError) -> int:
    if isinstance(exc, _NOT_FOUND):
        return 404
    if isinstance(exc, _CONFLICT):
        return 409
    return 400


def _error_body(exc: ConceptKitError) -> dict:
    body = {"error": type(exc).__name__, "detail": str(exc)}
    if isinstance(exc, ParseError):
        body["line"] = exc.line
        body["column"] = exc.column
        body["expected"] = list(exc.expected)
    return body


def _kb_shape(kb: KnowledgeBase) -> dict:
    return {
        "concepts": set(kb.concepts),
        "classes": {f"{c}::{k}" for c, concept in kb.concepts.items()
                    for k in concept.classes},
        "features": set(kb.features),
        "frames": set(kb.frames),
        "rules": sum(len(f.rules) for f in kb.frames.values()),
        "values": {name: set(defn.values) for name, defn in kb.features.items()
                   if defn.kind != "numeric"},
    }


def _delta(before: dict, after: dict) -> dict:
    values_added = {}
    for name, values in after["values"].items():
        new = values - before["values"].get(name, set())
        if new:
            values_added[name] = sorted(new)
    return {
        "concepts_added": sorted(after["concepts"] - before["concepts"]),
        "classes_added": sorted(after["classes"] - before["classes"]),
        "features_added": sorted(after["features"] - before["features"]),
        "frames_added": sorted(after["frames"] - before["frames"]),
        "rules_added": after["rules"] - before["rules"],
        "values_added": values_added,
    }


def create_app(kb: KnowledgeBase, kb_path: Optional[Union[str, Path]] = None,
               frontend_dir: Optional[Union[str, Path]] = None) -> FastAPI:
    app = FastAPI(title="conceptkit console API")
    sessions: dict[str, Session] = {}

    @app.exception_handler(ConceptKitError)
    async def handle_domain_error(request: Request, exc: ConceptKitError):
        return JSONResponse(status_code=_status_for(exc), content=_error_body(exc))

    @app.post("/sessions")
    async def open_session() -> dict:
        with kb._lock:
            session = Session(kb)
            sessions[session.id] = session
        return {"session_id": session.id}

    @app.post("/sessions/{session_id}/statements")
    async def post_statement(session_id: str, body: dict) -> dict:
        session = sessions.get(session_id)
        if session is None:
            return JSONResponse(status_code=404,
                                content={"error": "UnknownSession",
                                         "detail": f"no session {session_id!r}"})
        text = str(body.get("text", ""))
        with kb._lock:
            before = _kb_shape(kb)
            reply = session.submit(text)
            after = _kb_shape(kb)
            return {
                "machine_reply": {"kind": reply.kind, "text": reply.text,
                                  "payload": reply.payload},
                "kb_delta": _delta(before, after),
                "revision": kb.revision,
            }

    @app.get("/kb/graph")
    async def get_graph() -> dict:
        with kb._lock:
            return persist.to_graph(kb)

    @app.post("/kb/query")
    async def post_query(body: dict) -> dict:
        goal = str(body.get("goal", ""))
        depth = int(body.get("depth", engine.DEFAULT_DEPTH))
        facts = FactSet()
        for name, value in dict(body.get("facts", {})).items():
            facts.bind(str(name), value)
        with kb._lock:
            answer = engine.query(kb, facts, goal, depth=depth)
            return engine_answer_to_obj(kb, answer)

    @app.get("/kb/frames/{name}")
    async def get_frame(name: str) -> dict:
        with kb._lock:
            return persist.frame_table(kb, name)

    @app.post("/kb/save")
    async def save() -> dict:
        if kb_path is None:
            raise IoError("service was started without a persistence path")
        with kb._lock:
            persist.save_kb(kb, kb_path)
            return {"path": str(kb_path), "revision": kb.revision}

    if frontend_dir is not None and Path(frontend_dir).is_dir():
        static_root = Path(frontend_dir)

        @app.get("/")
        async def index() -> FileResponse:
            return FileResponse(static_root / "index.html")

        app.mount("/static", StaticFiles(directory=static_root), name="static")

    return app


def serve(kb_path: Union[str, Path], bind: str = "127.0.0.1:8000",
          frontend_dir: Optional[Union[str, Path]] = None) -> None:
    """Load the base from `kb_path` and run the service until interrupted."""
    import uvicorn

    kb = persist.load_kb(kb_path)
    app = create_app(kb, kb_path=kb_path, frontend_dir=frontend_dir)
    host, _, port = bind.rpartition(":")
    try:
        uvicorn.run(app, host=host or "127.0.0.1", port=int(port))
    except OSError as exc:
        raise IoError(f"cannot bind {bind}: {exc}") from exc
