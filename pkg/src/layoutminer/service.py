"""Networked collection + annotation endpoints.

The sync surface (scenario/event/change-feed routes) is what placement and
preview clients speak; the ``/api`` surface powers the annotation console.
Both are served from one FastAPI app over a shared Store.
"""

from __future__ import annotations

import base64
import hashlib
import threading
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import annotation as annotation_ops
from . import errors
from .categories import APP_STORE_CATEGORIES
from .dataset import Dataset
from .model import (
    UI_TYPES,
    ActivityType,
    Annotation,
    CropRegion,
    EventKind,
    Pose,
    PoseSample,
    ScenarioKey,
    Screenshot,
    Widget,
)
from .reconstruct import SceneOptions, build_scene
from .store import Store


class ClientRole(str, Enum):
    PLACEMENT = "placement"
    PREVIEW = "preview"


@dataclass
class SessionContext:
    scenario: ScenarioKey
    client_role: ClientRole
    client_id: str
    last_placed: Optional[str] = None


class SyncService:
    """Operation layer over the store: placement sessions and the change feed."""

    def __init__(self, store: Store):
        self.store = store
        self._sessions: dict[str, SessionContext] = {}
        self._lock = threading.Lock()

    def open_session(self, scenario: ScenarioKey, role: ClientRole,
                     client_id: str) -> SessionContext:
        with self._lock:
            ctx = SessionContext(scenario, role, client_id)
            self._sessions[client_id] = ctx
            return ctx

    def session(self, client_id: str) -> Optional[SessionContext]:
        with self._lock:
            return self._sessions.get(client_id)

    def handle_place(self, ctx: SessionContext, widget_id: str, pose: Pose,
                     at: int = 0) -> int:
        if ctx.client_role is not ClientRole.PLACEMENT:
            raise errors.WrongRole("only placement sessions may place widgets")
        seq = self.store.append_event(ctx.scenario, widget_id, EventKind.ADD, pose, at)
        ctx.last_placed = widget_id
        return seq

    def handle_adjust_last(self, ctx: SessionContext, pose: Pose, at: int = 0) -> int:
        if ctx.client_role is not ClientRole.PLACEMENT:
            raise errors.WrongRole("only placement sessions may adjust widgets")
        if ctx.last_placed is None:
            raise errors.NoLastWidget("session has not placed a widget yet")
        return self.store.append_event(ctx.scenario, ctx.last_placed,
                                       EventKind.UPDATE, pose, at)

    def handle_reselect_update(self, ctx: SessionContext, widget_id: str,
                               pose: Pose, at: int = 0) -> int:
        if ctx.client_role is not ClientRole.PLACEMENT:
            raise errors.WrongRole("only placement sessions may adjust widgets")
        try:
            return self.store.append_event(ctx.scenario, widget_id, EventKind.UPDATE, pose, at)
        except errors.UnknownWidget:
            # re-selection targets by id; anything never added reads as such
            raise errors.UpdateBeforeAdd(
                "widget %r was never added in %s" % (widget_id, ctx.scenario.as_path()))

    def handle_changes(self, scenario: ScenarioKey, since_seq: int,
                       wait_budget_ms: int = 0):
        return self.store.get_changes(scenario, since_seq, wait_budget_ms)

    def handle_pose_sample(self, ctx: SessionContext, pose: Pose, at: int) -> None:
        self.store.append_pose_sample(PoseSample(ctx.scenario, pose, at))


# -- HTTP wire models ---------------------------------------------------------


class ScenarioBody(BaseModel):
    participant_id: str
    environment: str
    task: str


class ScreenshotBody(BaseModel):
    image_b64: str
    participant_id: str
    screenshot_id: Optional[str] = None
    app_hint: Optional[str] = None
    captured_at_ms: int = 0
    redacted: bool = False


class CropBody(BaseModel):
    x0: float
    y0: float
    x1: float
    y1: float


class WidgetBody(BaseModel):
    screenshot_id: str
    crop: CropBody
    image_b64: str
    widget_id: Optional[str] = None
    created_at_ms: int = 0


class PoseBody(BaseModel):
    px: float
    py: float
    pz: float
    qw: float
    qx: float
    qy: float
    qz: float

    def to_pose(self) -> Pose:
        return Pose((self.px, self.py, self.pz), (self.qw, self.qx, self.qy, self.qz))


class EventBody(BaseModel):
    widget_id: str
    kind: str
    pose: PoseBody
    at_ms: int = 0


class PoseSampleBody(BaseModel):
    pose: PoseBody
    at_ms: int


class AnnotationBody(BaseModel):
    expected_version: int
    app_name: str = ""
    screenshot_desc: str = ""
    widget_desc: str = ""
    functionality: str = ""
    excluded_parts: str = ""
    ui_types: list[str] = []
    category: str = ""
    cluster_id: Optional[str] = None
    activity_type: Optional[str] = None


_STATUS_BY_CODE = {
    "UnknownWidget": 404, "UnknownScenario": 404, "UnknownScreenshot": 404,
    "MissingBlob": 404, "VersionConflict": 409, "DuplicateId": 409,
}


def _event_json(ev) -> dict:
    p = ev.pose
    return {"seq": ev.seq, "widget_id": ev.widget_id, "kind": ev.kind.value,
            "pose": {"px": p.position[0], "py": p.position[1], "pz": p.position[2],
                     "qw": p.orientation[0], "qx": p.orientation[1],
                     "qy": p.orientation[2], "qz": p.orientation[3]},
            "at_ms": ev.at}


def create_app(store: Store, static_dir=None) -> FastAPI:
    app = FastAPI(title="layoutminer")
    sync = SyncService(store)
    app.state.store = store
    app.state.sync = sync

    @app.exception_handler(errors.DomainError)
    async def _domain_error(request: Request, exc: errors.DomainError):
        return JSONResponse(
            status_code=_STATUS_BY_CODE.get(exc.code, 400),
            content={"error_code": exc.code, "message": exc.message},
        )

    @app.exception_handler(ValueError)
    async def _value_error(request: Request, exc: ValueError):
        return JSONResponse(status_code=400,
                            content={"error_code": "InvalidArgument", "message": str(exc)})

    # -- collection surface ---------------------------------------------

    @app.post("/scenarios")
    def post_scenario(body: ScenarioBody):
        store.put_scenario(ScenarioKey(body.participant_id, body.environment, body.task))
        return {"ok": True}

    @app.post("/screenshots")
    def post_screenshot(body: ScreenshotBody):
        data = base64.b64decode(body.image_b64)
        ref = store.put_blob(data)
        sid = body.screenshot_id or "s-" + ref[:12]
        store.put_screenshot(Screenshot(sid, body.participant_id, ref, body.app_hint,
                                        body.captured_at_ms, body.redacted))
        return {"screenshot_id": sid}

    @app.post("/widgets")
    def post_widget(body: WidgetBody):
        data = base64.b64decode(body.image_b64)
        ref = store.put_blob(data)
        crop = CropRegion(body.crop.x0, body.crop.y0, body.crop.x1, body.crop.y1)
        wid = body.widget_id or "w-" + hashlib.sha256(
            ("%s|%r|%s" % (body.screenshot_id, crop, ref)).encode()).hexdigest()[:12]
        store.put_widget(Widget(wid, body.screenshot_id, crop, ref, body.created_at_ms))
        return {"widget_id": wid}

    @app.post("/scenarios/{p}/{env}/{task}/events")
    def post_event(p: str, env: str, task: str, body: EventBody):
        key = ScenarioKey(p, env, task)
        seq = store.append_event(key, body.widget_id, EventKind(body.kind),
                                 body.pose.to_pose(), body.at_ms)
        return {"seq": seq}

    @app.get("/scenarios/{p}/{env}/{task}/changes")
    def get_changes(p: str, env: str, task: str, since: int = 0, wait_ms: int = 0):
        key = ScenarioKey(p, env, task)
        events, max_seq = store.get_changes(key, since, wait_ms)
        return {"events": [_event_json(e) for e in events], "max_seq": max_seq}

    @app.get("/scenarios/{p}/{env}/{task}/layout")
    def get_layout(p: str, env: str, task: str):
        layout = store.layout(ScenarioKey(p, env, task))
        return {
            "scenario": {"participant_id": p, "environment": env, "task": task},
            "as_of_seq": layout.as_of_seq,
            "placements": {
                wid: {"px": ps.position[0], "py": ps.position[1], "pz": ps.position[2],
                      "qw": ps.orientation[0], "qx": ps.orientation[1],
                      "qy": ps.orientation[2], "qz": ps.orientation[3]}
                for wid, ps in sorted(layout.placements.items())
            },
        }

    @app.post("/scenarios/{p}/{env}/{task}/pose_samples")
    def post_pose_sample(p: str, env: str, task: str, body: PoseSampleBody):
        key = ScenarioKey(p, env, task)
        store.append_pose_sample(PoseSample(key, body.pose.to_pose(), body.at_ms))
        return {"ok": True}

    # -- annotation console surface ---------------------------------------

    @app.get("/api/widgets")
    def api_widgets(request: Request):
        params = request.query_params
        filters = {}
        for name, value in params.multi_items():
            if name.startswith("filter."):
                fieldname = name[len("filter."):]
                filters.setdefault(fieldname, set()).add(value)
        sort = params.get("sort", "widget_id:asc")
        sort_field, _, direction = sort.partition(":")
        query = annotation_ops.WidgetQuery(
            q=params.get("q", ""),
            filters={k: frozenset(v) for k, v in filters.items()},
            sort_field=sort_field,
            sort_desc=direction == "desc",
            offset=int(params.get("offset", 0)),
            limit=int(params.get("limit", 50)),
        )
        return annotation_ops.query_widgets(Dataset.from_store(store), query)

    @app.put("/api/widgets/{widget_id}/annotation")
    def api_put_annotation(widget_id: str, body: AnnotationBody):
        anno = Annotation(
            widget_id=widget_id, app_name=body.app_name,
            screenshot_desc=body.screenshot_desc, widget_desc=body.widget_desc,
            functionality=body.functionality, excluded_parts=body.excluded_parts,
            ui_types=tuple(body.ui_types), category=body.category,
            cluster_id=body.cluster_id,
            activity_type=ActivityType(body.activity_type) if body.activity_type else None)
        version = store.upsert_annotation(widget_id, anno, body.expected_version)
        return {"version": version}

    @app.get("/api/suggest")
    def api_suggest(field: str, prefix: str = "", k: int = 10):
        values = annotation_ops.suggest(Dataset.from_store(store), field, prefix, k)
        return {"values": values}

    @app.get("/api/summary")
    def api_summary():
        return annotation_ops.summary(Dataset.from_store(store))

    @app.get("/api/categories")
    def api_categories():
        return {"categories": list(APP_STORE_CATEGORIES),
                "ui_types": list(UI_TYPES)}

    @app.get("/api/scenarios")
    def api_scenarios():
        ds = Dataset.from_store(store)
        return {"scenarios": [
            {"participant_id": k.participant_id, "environment": k.environment, "task": k.task,
             "max_seq": len(ds.events.get(k, ()))}
            for k in ds.scenario_keys()
        ]}

    @app.get("/api/scene/{p}/{env}/{task}")
    def api_scene(p: str, env: str, task: str, step: Optional[int] = None):
        ds = Dataset.from_store(store)
        return build_scene(ds, ScenarioKey(p, env, task), step, SceneOptions())

    if static_dir is not None:
        from fastapi.staticfiles import StaticFiles
        app.mount("/ui", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
