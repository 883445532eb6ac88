"""Headless placement and preview clients.

``run_placement`` drives the collection endpoint from a scripted session;
``run_preview`` mirrors a scenario by polling the change feed and folding
batches locally; ``check_convergence`` compares the two.

Script JSON schema (see also docs in README):

    {
      "scenario": {"participant_id": "p1", "environment": "office", "task": "work"},
      "steps": [
        {"at_ms": 0,  "action": "CreateWidget",
         "payload": {"widget_id": "w1", "crop": {"x0": 0, "y0": 0, "x1": 1, "y1": 1}}},
        {"at_ms": 10, "action": "Place",
         "payload": {"widget_id": "w1", "pose": {"px":0,"py":0,"pz":0,"qw":1,"qx":0,"qy":0,"qz":0}}},
        {"at_ms": 20, "action": "AdjustLast", "payload": {"pose": {...}}},
        {"at_ms": 30, "action": "Reselect",  "payload": {"widget_id": "w1", "pose": {...}}},
        {"at_ms": 40, "action": "PoseSample", "payload": {"pose": {...}}}
      ]
    }
"""

from __future__ import annotations

import base64
import hashlib
import io
import json
import math
import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

import httpx

from .errors import DomainError, Unreachable
from .model import (
    EventKind,
    InteractionEvent,
    Layout,
    Pose,
    ScenarioKey,
    apply_events,
)

ACTIONS = ("CreateWidget", "Place", "AdjustLast", "Reselect", "PoseSample")

POSITION_TOL_M = 1e-6
QUAT_DOT_TOL = 1e-9


@dataclass(frozen=True)
class ScriptStep:
    at_ms: int
    action: str
    payload: dict


@dataclass(frozen=True)
class SessionScript:
    scenario: ScenarioKey
    steps: tuple[ScriptStep, ...]

    def __post_init__(self):
        created: set[str] = set()
        last_at = None
        for i, step in enumerate(self.steps):
            if step.action not in ACTIONS:
                raise ValueError("step %d: unknown action %r" % (i, step.action))
            if last_at is not None and step.at_ms < last_at:
                raise ValueError("step %d: at_ms decreases" % i)
            last_at = step.at_ms
            if step.action == "CreateWidget":
                created.add(step.payload["widget_id"])
            elif step.action == "Place" and step.payload["widget_id"] not in created:
                raise ValueError(
                    "step %d: Place references widget %r not created earlier"
                    % (i, step.payload["widget_id"]))

    @classmethod
    def from_json(cls, data: dict) -> "SessionScript":
        sc = data["scenario"]
        key = ScenarioKey(sc["participant_id"], sc["environment"], sc["task"])
        steps = tuple(ScriptStep(s.get("at_ms", 0), s["action"], s.get("payload", {}))
                      for s in data["steps"])
        return cls(key, steps)

    @classmethod
    def load(cls, path) -> "SessionScript":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(json.load(fh))

    def to_json(self) -> dict:
        return {
            "scenario": {"participant_id": self.scenario.participant_id,
                         "environment": self.scenario.environment,
                         "task": self.scenario.task},
            "steps": [{"at_ms": s.at_ms, "action": s.action, "payload": s.payload}
                      for s in self.steps],
        }


class ScriptAborted(DomainError):
    code = "ScriptAborted"

    def __init__(self, step_index: int, cause: str):
        super().__init__("aborted at step %d: %s" % (step_index, cause))
        self.step_index = step_index
        self.cause = cause


@dataclass(frozen=True)
class TranscriptEntry:
    step_index: int
    action: str
    result: dict


def _widget_png(widget_id: str) -> bytes:
    """Small deterministic PNG so the server side has a real image blob."""
    from PIL import Image
    digest = hashlib.sha256(widget_id.encode()).digest()
    im = Image.new("RGB", (8, 8), tuple(digest[:3]))
    buf = io.BytesIO()
    im.save(buf, format="PNG")
    return buf.getvalue()


def _pose_body(pose: dict) -> dict:
    return {k: float(pose[k]) for k in ("px", "py", "pz", "qw", "qx", "qy", "qz")}


def run_placement(script: SessionScript, endpoint: str,
                  client: Optional[httpx.Client] = None) -> list[TranscriptEntry]:
    """Execute every step in order against the collection endpoint."""
    own_client = client is None
    http = client or httpx.Client(base_url=endpoint, timeout=30.0)
    key = script.scenario
    base = "/scenarios/%s/%s/%s" % (key.participant_id, key.environment, key.task)
    transcript: list[TranscriptEntry] = []
    last_placed: Optional[str] = None

    def post(path, body, step_index):
        try:
            resp = http.post(path, json=body)
        except httpx.TransportError as exc:
            raise Unreachable(str(exc))
        if resp.status_code >= 400:
            detail = resp.json()
            raise ScriptAborted(step_index, detail.get("error_code", str(resp.status_code)))
        return resp.json()

    try:
        post("/scenarios", {"participant_id": key.participant_id,
                            "environment": key.environment, "task": key.task}, -1)
        for i, step in enumerate(script.steps):
            if step.action == "CreateWidget":
                wid = step.payload["widget_id"]
                png = _widget_png(wid)
                shot = post("/screenshots", {
                    "image_b64": base64.b64encode(png).decode(),
                    "participant_id": key.participant_id,
                    "screenshot_id": step.payload.get("screenshot_id"),
                    "captured_at_ms": step.at_ms,
                }, i)
                crop = step.payload.get("crop", {"x0": 0, "y0": 0, "x1": 1, "y1": 1})
                res = post("/widgets", {
                    "screenshot_id": shot["screenshot_id"],
                    "crop": crop,
                    "image_b64": base64.b64encode(png).decode(),
                    "widget_id": wid,
                    "created_at_ms": step.at_ms,
                }, i)
            elif step.action == "Place":
                res = post(base + "/events", {
                    "widget_id": step.payload["widget_id"], "kind": "add",
                    "pose": _pose_body(step.payload["pose"]), "at_ms": step.at_ms}, i)
                last_placed = step.payload["widget_id"]
                res = {**res, "widget_id": last_placed, "kind": "add",
                       "pose": _pose_body(step.payload["pose"])}
            elif step.action == "AdjustLast":
                if last_placed is None:
                    raise ScriptAborted(i, "NoLastWidget")
                res = post(base + "/events", {
                    "widget_id": last_placed, "kind": "update",
                    "pose": _pose_body(step.payload["pose"]), "at_ms": step.at_ms}, i)
                res = {**res, "widget_id": last_placed, "kind": "update",
                       "pose": _pose_body(step.payload["pose"])}
            elif step.action == "Reselect":
                res = post(base + "/events", {
                    "widget_id": step.payload["widget_id"], "kind": "update",
                    "pose": _pose_body(step.payload["pose"]), "at_ms": step.at_ms}, i)
                res = {**res, "widget_id": step.payload["widget_id"], "kind": "update",
                       "pose": _pose_body(step.payload["pose"])}
            else:  # PoseSample
                res = post(base + "/pose_samples", {
                    "pose": _pose_body(step.payload["pose"]), "at_ms": step.at_ms}, i)
            transcript.append(TranscriptEntry(i, step.action, res))
        return transcript
    finally:
        if own_client:
            http.close()


def _event_from_json(scenario: ScenarioKey, ev: dict) -> InteractionEvent:
    p = ev["pose"]
    return InteractionEvent(
        ev["seq"], scenario, ev["widget_id"], EventKind(ev["kind"]),
        Pose((p["px"], p["py"], p["pz"]), (p["qw"], p["qx"], p["qy"], p["qz"])),
        ev.get("at_ms", 0))


def run_preview(scenario: ScenarioKey, endpoint: str,
                poll_interval_ms: int = 250,
                stop_after_quiet_polls: int = 3,
                client: Optional[httpx.Client] = None,
                inject_duplicates: bool = False,
                wait_ms: int = 0) -> Layout:
    """Mirror a scenario by polling the change feed until it goes quiet.

    With ``inject_duplicates`` every batch is applied twice, exercising the
    at-least-once tolerance of seq-keyed application.
    """
    own_client = client is None
    http = client or httpx.Client(base_url=endpoint, timeout=30.0)
    path = "/scenarios/%s/%s/%s/changes" % (
        scenario.participant_id, scenario.environment, scenario.task)
    layout = Layout(scenario, {}, 0)
    quiet = 0
    try:
        while quiet < stop_after_quiet_polls:
            try:
                resp = http.get(path, params={"since": layout.as_of_seq, "wait_ms": wait_ms})
            except httpx.TransportError as exc:
                raise Unreachable(str(exc))
            if resp.status_code >= 400:
                detail = resp.json()
                raise Unreachable(detail.get("error_code", str(resp.status_code)))
            batch = [_event_from_json(scenario, e) for e in resp.json()["events"]]
            if batch:
                layout = apply_events(layout, batch)
                if inject_duplicates:
                    layout = apply_events(layout, batch)
                quiet = 0
            else:
                quiet += 1
                if quiet < stop_after_quiet_polls and wait_ms <= 0:
                    time.sleep(poll_interval_ms / 1000.0)
        return layout
    finally:
        if own_client:
            http.close()


def transcript_layout(scenario: ScenarioKey,
                      transcript: Sequence[TranscriptEntry]) -> Layout:
    """Fold the placement transcript into the layout the client believes in."""
    events = []
    for entry in transcript:
        if entry.action in ("Place", "AdjustLast", "Reselect"):
            p = entry.result["pose"]
            events.append(InteractionEvent(
                entry.result["seq"], scenario, entry.result["widget_id"],
                EventKind(entry.result["kind"]),
                Pose((p["px"], p["py"], p["pz"]), (p["qw"], p["qx"], p["qy"], p["qz"])),
                0))
    events.sort(key=lambda e: e.seq)
    return apply_events(Layout(scenario, {}, 0), events)


@dataclass(frozen=True)
class ConvergenceReport:
    equal: bool
    max_position_delta: float
    missing: tuple[str, ...]  # in transcript but not in preview
    extra: tuple[str, ...]    # in preview but not in transcript


def check_convergence(expected: Layout, actual: Layout) -> ConvergenceReport:
    """Equal iff same widget set, positions within 1e-6 m and orientations
    matching up to sign (|quaternion dot| >= 1 - 1e-9)."""
    missing = tuple(sorted(set(expected.placements) - set(actual.placements)))
    extra = tuple(sorted(set(actual.placements) - set(expected.placements)))
    max_delta = 0.0
    orientations_ok = True
    for wid in set(expected.placements) & set(actual.placements):
        a, b = expected.placements[wid], actual.placements[wid]
        max_delta = max(max_delta, math.dist(a.position, b.position))
        dot = abs(sum(x * y for x, y in zip(a.orientation, b.orientation)))
        if dot < 1.0 - QUAT_DOT_TOL:
            orientations_ok = False
    equal = (not missing and not extra and max_delta <= POSITION_TOL_M and orientations_ok)
    return ConvergenceReport(equal, max_delta, missing, extra)
