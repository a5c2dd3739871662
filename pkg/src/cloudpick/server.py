"""HTTP service exposing the engine to interactive clients.

Sessions hold a mutable session document bound to one catalog. Patches are
validated against the full merged document and applied atomically under a
per-session lock; each successful patch bumps the revision. Evaluation runs
synchronously (catalogs are desk-scale) and tags its result with the
revision it was computed from, so clients can detect stale results after
further edits. Previous results are retained per revision for diffing.

Bodies are JSON by default; YAML is accepted via Content-Type and returned
when the Accept header asks for it. Error payloads carry machine-readable
codes mirroring the CLI exit-code enumeration (``validation_error``,
``no_feasible_combination``, ``not_found``, ``io_error``).
"""

from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass, field

import yaml
from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .ahp import GoalHierarchy, HierarchyNode, priority_vector
from .catalog import Catalog, catalog_to_dict
from .errors import EngineError, ValidationError
from .session import (
    SessionDocument,
    parse_session,
    result_document,
    run_pipeline,
)

_HIERARCHY_KEYS = ("image", "service", "integrated")


def _error_payload(code: str, message: str) -> dict:
    return {"error": {"code": code, "message": message}}


def _wants_yaml(request: Request) -> bool:
    accept = request.headers.get("accept", "")
    return "yaml" in accept and "json" not in accept.split(",")[0]


def _respond(request: Request, payload: dict, status_code: int = 200) -> Response:
    if _wants_yaml(request):
        return Response(
            yaml.safe_dump(payload, sort_keys=False, default_flow_style=False),
            status_code=status_code,
            media_type="application/yaml",
        )
    return JSONResponse(payload, status_code=status_code)


async def _read_document(request: Request) -> dict:
    body = await request.body()
    if not body:
        return {}
    content_type = request.headers.get("content-type", "")
    try:
        if "yaml" in content_type:
            doc = yaml.safe_load(body)
        else:
            doc = json.loads(body)
    except (yaml.YAMLError, json.JSONDecodeError) as exc:
        raise ValidationError(f"unparseable request body: {exc}") from None
    if doc is None:
        return {}
    if not isinstance(doc, dict):
        raise ValidationError("request body must be a map")
    return doc


def _node_view(node: HierarchyNode) -> dict:
    if node.is_leaf:
        return {"name": node.name, "attribute": node.attribute_key}
    result = priority_vector(node.comparison)
    return {
        "name": node.name,
        "children": [_node_view(child) for child in node.children],
        "matrix": [list(row) for row in node.comparison.entries],
        "local_weights": list(result.weights),
        "consistency_ratio": result.consistency_ratio,
    }


def _hierarchy_view(hierarchy: GoalHierarchy) -> dict:
    return _node_view(hierarchy.root)


def _session_view(parsed: SessionDocument) -> dict:
    """Normalized session document with defaults made explicit for clients."""
    requirements = []
    for req in parsed.requirements:
        entry: dict[str, object] = {
            "kind": req.target_kind.value,
            "attribute": req.attribute_key,
            "predicate": req.op.value,
        }
        if req.bound is not None:
            entry["bound"] = req.bound
        if req.values is not None:
            values = sorted(req.values)
            if req.op.value == "equals":
                entry["value"] = values[0]
            else:
                entry["values"] = values
        requirements.append(entry)
    return {
        "mode": parsed.mode,
        "relaxation": "auto" if parsed.relaxation.auto else parsed.relaxation.level,
        "combination": {
            "image_weight": parsed.combination.image_weight,
            "service_weight": parsed.combination.service_weight,
            "combiner": parsed.combination.combiner.value,
        },
        "requirements": requirements,
        "hierarchies": {
            "image": _hierarchy_view(parsed.image_hierarchy),
            "service": _hierarchy_view(parsed.service_hierarchy),
            "integrated": _hierarchy_view(parsed.integrated_hierarchy),
        },
    }


def _schema_view(catalog: Catalog) -> dict:
    def one(schema) -> dict:
        return {
            "numerical": [
                {
                    "key": d.key,
                    "influence": d.influence.value,
                    "metric": d.metric,
                    "range": [d.value_range.lower, d.value_range.upper],
                }
                for d in schema.numerical.values()
            ],
            "non_numerical": [
                {"key": d.key, "set_valued": d.set_valued}
                for d in schema.non_numerical.values()
            ],
        }

    return {"images": one(catalog.image_schema), "services": one(catalog.service_schema)}


@dataclass
class SessionState:
    session_id: str
    catalog_id: str
    document: dict = field(default_factory=dict)
    parsed: SessionDocument = field(default_factory=lambda: parse_session({}))
    revision: int = 0
    results: dict[int, dict] = field(default_factory=dict)
    latest_result_revision: int | None = None
    lock: threading.Lock = field(default_factory=threading.Lock)


def _merge_patch(document: dict, patch: dict) -> dict:
    """Replace top-level sections; hierarchies merge per hierarchy name."""
    if "catalog" in patch:
        raise ValidationError("the catalog is fixed at session creation", "catalog")
    merged = dict(document)
    for key, value in patch.items():
        if key == "hierarchies":
            if not isinstance(value, dict):
                raise ValidationError("hierarchies must be a map", "hierarchies")
            section = dict(merged.get("hierarchies") or {})
            for name, sub in value.items():
                if name not in _HIERARCHY_KEYS:
                    raise ValidationError(f"unknown hierarchy {name!r}", "hierarchies")
                section[name] = sub
            merged["hierarchies"] = section
        else:
            merged[key] = value
    return merged


def create_app(catalogs: dict[str, Catalog]) -> FastAPI:
    """Build the service around a fixed set of named catalogs."""
    app = FastAPI(title="cloudpick", version="0.1.0")
    # The companion UI is served separately (static files); this is a local
    # single-user tool, so permissive CORS is fine.
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    sessions: dict[str, SessionState] = {}
    registry_lock = threading.Lock()

    def get_session(session_id: str) -> SessionState | None:
        with registry_lock:
            return sessions.get(session_id)

    @app.get("/catalogs/{catalog_id}")
    async def get_catalog(catalog_id: str, request: Request) -> Response:
        catalog = catalogs.get(catalog_id)
        if catalog is None:
            return _respond(
                request, _error_payload("not_found", f"unknown catalog {catalog_id!r}"), 404
            )
        payload = catalog_to_dict(catalog)
        payload["schema"] = _schema_view(catalog)
        return _respond(request, payload)

    @app.post("/sessions")
    async def create_session(request: Request) -> Response:
        try:
            doc = await _read_document(request)
        except ValidationError as exc:
            return _respond(request, _error_payload("validation_error", str(exc)), 422)
        catalog_id = doc.get("catalog_id")
        if catalog_id not in catalogs:
            return _respond(
                request, _error_payload("not_found", f"unknown catalog {catalog_id!r}"), 404
            )
        state = SessionState(session_id=uuid.uuid4().hex, catalog_id=catalog_id)
        with registry_lock:
            sessions[state.session_id] = state
        return _respond(
            request,
            {
                "session_id": state.session_id,
                "catalog_id": state.catalog_id,
                "revision": state.revision,
            },
            201,
        )

    @app.get("/sessions/{session_id}")
    async def get_session_view(session_id: str, request: Request) -> Response:
        state = get_session(session_id)
        if state is None:
            return _respond(
                request, _error_payload("not_found", f"unknown session {session_id!r}"), 404
            )
        with state.lock:
            payload = {
                "session_id": state.session_id,
                "catalog_id": state.catalog_id,
                "revision": state.revision,
                "document": _session_view(state.parsed),
                "result_revisions": sorted(state.results),
                "latest_result_revision": state.latest_result_revision,
            }
        return _respond(request, payload)

    @app.patch("/sessions/{session_id}")
    async def patch_session(session_id: str, request: Request) -> Response:
        state = get_session(session_id)
        if state is None:
            return _respond(
                request, _error_payload("not_found", f"unknown session {session_id!r}"), 404
            )
        try:
            patch = await _read_document(request)
        except ValidationError as exc:
            return _respond(request, _error_payload("validation_error", str(exc)), 422)
        with state.lock:
            try:
                merged = _merge_patch(state.document, patch)
                parsed = parse_session(merged)
            except EngineError as exc:
                # state unchanged on validation failure
                return _respond(request, _error_payload("validation_error", str(exc)), 422)
            state.document = merged
            state.parsed = parsed
            state.revision += 1
            payload = {"session_id": state.session_id, "revision": state.revision}
        return _respond(request, payload)

    @app.post("/sessions/{session_id}/evaluate")
    async def evaluate_session(session_id: str, request: Request) -> Response:
        state = get_session(session_id)
        if state is None:
            return _respond(
                request, _error_payload("not_found", f"unknown session {session_id!r}"), 404
            )
        catalog = catalogs[state.catalog_id]
        with state.lock:
            try:
                result = run_pipeline(catalog, state.parsed)
            except EngineError as exc:
                return _respond(request, _error_payload("validation_error", str(exc)), 422)
            payload = result_document(result)
            payload["revision"] = state.revision
            state.results[state.revision] = payload
            state.latest_result_revision = state.revision
            response = dict(payload)
            response["outdated"] = False
        return _respond(request, response)

    @app.get("/sessions/{session_id}/results")
    async def latest_results(session_id: str, request: Request) -> Response:
        state = get_session(session_id)
        if state is None:
            return _respond(
                request, _error_payload("not_found", f"unknown session {session_id!r}"), 404
            )
        with state.lock:
            if state.latest_result_revision is None:
                return _respond(
                    request, _error_payload("not_found", "no results computed yet"), 404
                )
            payload = dict(state.results[state.latest_result_revision])
            payload["outdated"] = state.latest_result_revision != state.revision
        return _respond(request, payload)

    @app.get("/sessions/{session_id}/results/{revision}")
    async def results_at(session_id: str, revision: int, request: Request) -> Response:
        state = get_session(session_id)
        if state is None:
            return _respond(
                request, _error_payload("not_found", f"unknown session {session_id!r}"), 404
            )
        with state.lock:
            if revision not in state.results:
                return _respond(
                    request,
                    _error_payload("not_found", f"no results for revision {revision}"),
                    404,
                )
            payload = dict(state.results[revision])
            payload["outdated"] = revision != state.revision
        return _respond(request, payload)

    return app
