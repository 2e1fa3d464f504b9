"""HTTP facade over sessions.

Thin by design: every route parses, locks the session, delegates, and
maps the session errors onto status codes (422 for bad input, 409 for
state conflicts, 404 for unknown ids).  All geometry values cross the
wire in world units.
"""

from __future__ import annotations

from typing import Any

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .document import DocumentError, parse_document
from .session import EditError, SessionConflict, SessionManager

__all__ = ["create_app"]

EXPORT_MEDIA = {
    "json": "application/json",
    "svg": "image/svg+xml",
    "obj": "text/plain",
}


def create_app(manager: SessionManager | None = None) -> FastAPI:
    app = FastAPI(title="roofskel", docs_url=None, redoc_url=None)
    app.state.manager = manager or SessionManager()
    # the service binds to loopback only; open CORS lets a locally served
    # (or file://) browser client reach it from another origin
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    def _get(session_id: str):
        return app.state.manager.get(session_id)

    @app.exception_handler(KeyError)
    async def _unknown(request: Request, exc: KeyError) -> JSONResponse:
        return JSONResponse(status_code=404, content={"error": f"no session {exc.args[0]}"})

    @app.exception_handler(DocumentError)
    async def _bad_doc(request: Request, exc: DocumentError) -> JSONResponse:
        return JSONResponse(status_code=422, content={"error": str(exc), "path": exc.path})

    @app.exception_handler(EditError)
    async def _bad_edit(request: Request, exc: EditError) -> JSONResponse:
        return JSONResponse(status_code=422, content={"error": str(exc)})

    @app.exception_handler(SessionConflict)
    async def _conflict(request: Request, exc: SessionConflict) -> JSONResponse:
        return JSONResponse(status_code=409, content={"error": str(exc)})

    @app.post("/sessions")
    async def create_session(request: Request) -> dict[str, Any]:
        doc = parse_document(await request.body())
        s = app.state.manager.create(doc)
        with s.lock:
            return {"id": s.id, "state": s.state_view()}

    @app.get("/sessions/{session_id}")
    async def get_session(session_id: str) -> dict[str, Any]:
        s = _get(session_id)
        with s.lock:
            return s.state_view()

    @app.post("/sessions/{session_id}/step")
    async def step_session(session_id: str, body: dict[str, Any]) -> dict[str, Any]:
        s = _get(session_id)
        dz = body.get("dz")
        if not isinstance(dz, (int, float)) or isinstance(dz, bool):
            raise EditError("step body must carry a numeric dz")
        with s.lock:
            result = s.step(float(dz))
            return {"result": result, "state": s.state_view()}

    @app.post("/sessions/{session_id}/edit")
    async def edit_session(session_id: str, body: dict[str, Any]) -> dict[str, Any]:
        s = _get(session_id)
        with s.lock:
            s.edit(body)
            return {"state": s.state_view()}

    @app.post("/sessions/{session_id}/undo")
    async def undo_session(session_id: str) -> dict[str, Any]:
        s = _get(session_id)
        with s.lock:
            s.undo()
            return {"state": s.state_view()}

    @app.get("/sessions/{session_id}/export")
    async def export_session(session_id: str, format: str = "json") -> Response:
        if format not in EXPORT_MEDIA:
            raise EditError(f"unknown export format {format!r}")
        s = _get(session_id)
        with s.lock:
            payload = s.export(format)
        return Response(content=payload, media_type=EXPORT_MEDIA[format])

    return app
