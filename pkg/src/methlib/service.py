"""HTTP API over one library file; endpoints mirror the module operations.

Mutations serialize through a single writer lock and write through to the
library file after every successful change, so a reload always reflects
the last 2xx response.
"""

from __future__ import annotations

import threading
from pathlib import Path

from fastapi import Body, FastAPI, Query, Request, Response
from fastapi.responses import JSONResponse, PlainTextResponse

from . import dectree, heuristics, ingest, jsonio, navigate, query, store
from .errors import (
    DuplicateRelationError,
    InvalidLibraryError,
    MethLibError,
    UnknownIdError,
)
from .model import (
    ComponentKind,
    Library,
    SourceRef,
    add_component,
    add_relation,
    slugify,
)


def _status_for(exc: MethLibError) -> int:
    if isinstance(exc, UnknownIdError):
        return 404
    if isinstance(exc, DuplicateRelationError):
        return 409
    if isinstance(exc, InvalidLibraryError):
        return 500
    return 400


def create_app(lib_path: str | Path | None = None, lib: Library | None = None) -> FastAPI:
    """Build the service over a library file (or an in-memory library)."""
    if lib is None:
        if lib_path is None:
            raise ValueError("need a library file path or a library instance")
        lib, violations = store.load(lib_path)
        if violations:
            raise InvalidLibraryError(
                f"library file has {len(violations)} violation(s)", violations
            )
    path = Path(lib_path) if lib_path is not None else None

    app = FastAPI(title="methlib", version="1.0")
    lock = threading.RLock()

    def persist() -> None:
        if path is not None:
            store.save(lib, path)

    @app.exception_handler(MethLibError)
    async def _methlib_error(_request: Request, exc: MethLibError):
        return JSONResponse(status_code=_status_for(exc), content=exc.to_dict())

    # -- components / relations / network ------------------------------
    @app.get("/components")
    def list_components(q: str = Query(default="all", alias="query")):
        ast = query.parse_query(q, lib)
        return [
            jsonio.component_to_json(lib.components[cid])
            for cid in query.eval_query(lib, ast)
        ]

    @app.get("/components/{cid}")
    def get_component(cid: str):
        return jsonio.component_to_json(lib.component(cid))

    @app.post("/components", status_code=201)
    def post_component(payload: dict = Body(...)):
        with lock:
            properties = {}
            for ref, values in (payload.get("properties") or {}).items():
                pd = lib.resolve_property(str(ref))
                if pd is None:
                    raise UnknownIdError(f"unknown property {ref!r}")
                properties[pd.id] = list(values)
            src = payload.get("source") or {}
            cid = add_component(
                lib,
                kind=ComponentKind.parse(payload.get("kind", "")),
                name=payload.get("name", ""),
                description=payload.get("description", ""),
                source=SourceRef(
                    citation=src.get("citation", "librarian"),
                    pages=src.get("pages"),
                    extra=dict(src.get("extra", {})),
                ),
                properties=properties,
            )
            persist()
        return {"id": cid}

    @app.post("/relations", status_code=201)
    def post_relation(payload: dict = Body(...)):
        with lock:
            rid = add_relation(
                lib,
                from_id=payload.get("from", ""),
                to_id=payload.get("to", ""),
                label=payload.get("label", ""),
            )
            persist()
        return {"id": rid}

    @app.get("/network/{cid}/neighbors")
    def get_neighbors(cid: str, direction: str = "both", label: str | None = None):
        rows = navigate.neighbors(lib, cid, direction=direction, label_filter=label)
        return [
            {
                "relation": jsonio.relation_to_json(rel),
                "component": jsonio.component_to_json(comp),
                "direction": "out" if rel.from_id == cid else "in",
            }
            for rel, comp in rows
        ]

    # -- recommendation -------------------------------------------------
    @app.post("/recommend")
    def post_recommend(payload: dict = Body(...)):
        situation = jsonio.situation_from_slugs(lib, payload.get("situation", {}))
        selection = set(payload.get("selection", []))
        ctx = heuristics.TruthContext(situation=situation, selection=selection)
        return [jsonio.recommendation_to_json(r) for r in heuristics.recommend(lib, ctx)]

    # -- sessions -------------------------------------------------------
    @app.post("/sessions", status_code=201)
    def post_session(payload: dict = Body(default={})):
        with lock:
            situation = jsonio.situation_from_slugs(lib, payload.get("situation", {}))
            session = navigate.start_session(lib, situation)
            persist()
        return jsonio.session_to_json(lib, session)

    @app.get("/sessions/{sid}")
    def get_session(sid: str):
        return jsonio.session_to_json(lib, navigate.get_session(lib, sid))

    @app.post("/sessions/{sid}/mark")
    def post_mark(sid: str, payload: dict = Body(...)):
        with lock:
            session = navigate.get_session(lib, sid)
            changed = navigate.mark(lib, session, payload.get("component", ""))
            persist()
        return {"changed": changed, "marked": list(session.marked)}

    @app.post("/sessions/{sid}/unmark")
    def post_unmark(sid: str, payload: dict = Body(...)):
        with lock:
            session = navigate.get_session(lib, sid)
            changed = navigate.unmark(lib, session, payload.get("component", ""))
            persist()
        return {"changed": changed, "marked": list(session.marked), "warning": None if changed else "component was not marked"}

    @app.patch("/sessions/{sid}/situation")
    def patch_situation(sid: str, payload: dict = Body(...)):
        with lock:
            session = navigate.get_session(lib, sid)
            assignments = jsonio.situation_from_slugs(
                lib, payload.get("assignments", payload.get("situation", {}))
            ).assignments
            navigate.update_situation(lib, session, assignments)
            persist()
        return jsonio.session_to_json(lib, session)

    @app.get("/sessions/{sid}/report")
    def get_report(sid: str):
        session = navigate.get_session(lib, sid)
        return jsonio.report_to_json(lib, navigate.report(lib, session))

    # -- decision trees -------------------------------------------------
    @app.get("/trees")
    def get_trees():
        return [
            {"id": t.id, "name": t.name}
            for t in sorted(lib.trees.values(), key=lambda t: t.id)
        ]

    def _walk_state(session, tree_id: str) -> dict:
        path = [tuple(p) for p in session.walks.get(tree_id, [])]
        walk = dectree.replay_walk(lib, tree_id, path)
        out: dict = {"tree_id": tree_id, "path": [list(p) for p in walk.path]}
        q = dectree.current_question(walk, lib)
        if q is None:
            leaf = walk.cursor
            out.update(done=True, premarked=list(dectree.result(walk)), note=leaf.note)
        else:
            fd, values = q
            out.update(
                done=False,
                question={"factor": slugify(fd.name), "name": fd.name, "values": values},
            )
        return out

    @app.get("/sessions/{sid}/walk/{tree_id}")
    def get_walk(sid: str, tree_id: str):
        return _walk_state(navigate.get_session(lib, sid), tree_id)

    @app.post("/sessions/{sid}/walk/{tree_id}/answer")
    def post_answer(sid: str, tree_id: str, payload: dict = Body(...)):
        with lock:
            session = navigate.get_session(lib, sid)
            path = [tuple(p) for p in session.walks.get(tree_id, [])]
            walk = dectree.replay_walk(lib, tree_id, path)
            dectree.step(lib, walk, str(payload.get("value", "")), session=session)
            persist()
        return _walk_state(session, tree_id)

    # -- ingestion ------------------------------------------------------
    @app.post("/ingest/screenings", status_code=201)
    def post_screening(payload: dict = Body(...)):
        with lock:
            doc_info = payload.get("document") or {}
            doc_id = payload.get("document_id")
            if doc_id is None:
                doc_id = ingest.add_document(
                    lib,
                    title=doc_info.get("title", ""),
                    kind=doc_info.get("kind", "other"),
                    citation=doc_info.get("citation", ""),
                )
            verdict = ingest.screen(
                lib,
                doc_id,
                answers=payload.get("answers", {}),
                notes=payload.get("notes"),
                screener=payload.get("screener", ""),
                policy=payload.get("policy", "strict"),
            )
            persist()
        return {
            "document_id": doc_id,
            "decision": verdict.decision,
            "answers": verdict.answers,
        }

    @app.post("/ingest/batches", status_code=201)
    def post_batch(payload: dict = Body(...)):
        with lock:
            report = ingest.import_batch(lib, payload)
            persist()
        return {
            "document_id": report.document_id,
            "created": report.created,
            "duplicate_warnings": report.duplicate_warnings,
            "rejected": report.rejected,
        }

    # -- feedback -------------------------------------------------------
    @app.post("/feedback", status_code=201)
    def post_feedback(payload: dict = Body(...)):
        with lock:
            fid = ingest.submit_feedback(
                lib,
                component_id=payload.get("component", ""),
                verdict=payload.get("verdict", ""),
                note=payload.get("note", ""),
                project=payload.get("project", ""),
            )
            persist()
        return {"id": fid}

    @app.get("/feedback/{cid}/summary")
    def get_feedback_summary(cid: str):
        return ingest.feedback_summary(lib, cid)

    # -- schema / export ------------------------------------------------
    @app.get("/factors")
    def get_factors():
        return [jsonio.factor_to_json(lib, fid) for fid in sorted(lib.factor_defs)]

    @app.get("/properties")
    def get_properties():
        return [jsonio.property_to_json(lib, pid) for pid in sorted(lib.property_defs)]

    @app.get("/export/dot")
    def export_dot(session: str | None = None) -> Response:
        sess = navigate.get_session(lib, session) if session else None
        return PlainTextResponse(navigate.to_dot(lib, sess))

    app.state.library = lib
    app.state.lib_path = path
    return app


def serve(lib_path: str | Path, bind: str = "127.0.0.1:8000") -> None:
    """Run the service; blocks until interrupted."""
    import uvicorn

    host, _, port = bind.partition(":")
    uvicorn.run(create_app(lib_path), host=host or "127.0.0.1", port=int(port or 8000))
