"""Durable append-only store for blobs, records, event logs and pose traces.

On-disk layout (all record files are JSONL append logs; blobs are
content-addressed files):

    data_dir/
      blobs/<sha256-hex>
      scenarios.jsonl
      screenshots.jsonl
      widgets.jsonl
      events.jsonl
      pose_samples.jsonl
      annotations.jsonl

Durability unit is one appended line: each append is written and flushed
before the call returns (fsync when ``durable=True``). Recovery tolerates a
torn final line, so a crash between operations leaves every scenario log a
contiguous prefix.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
from collections import defaultdict
from pathlib import Path
from typing import Iterator, Optional

from . import errors
from .model import (
    ActivityType,
    Annotation,
    CropRegion,
    EventKind,
    InteractionEvent,
    Layout,
    Pose,
    PoseSample,
    ScenarioKey,
    Screenshot,
    Widget,
    fold_events,
    validate_pose,
)

_RECORD_FILES = (
    "scenarios.jsonl",
    "screenshots.jsonl",
    "widgets.jsonl",
    "events.jsonl",
    "pose_samples.jsonl",
    "annotations.jsonl",
)


def _pose_to_json(p: Pose) -> dict:
    return {"px": p.position[0], "py": p.position[1], "pz": p.position[2],
            "qw": p.orientation[0], "qx": p.orientation[1],
            "qy": p.orientation[2], "qz": p.orientation[3]}


def _pose_from_json(d: dict) -> Pose:
    return Pose((d["px"], d["py"], d["pz"]), (d["qw"], d["qx"], d["qy"], d["qz"]))


def _scenario_to_json(s: ScenarioKey) -> dict:
    return {"participant": s.participant_id, "environment": s.environment, "task": s.task}


def _scenario_from_json(d: dict) -> ScenarioKey:
    return ScenarioKey(d["participant"], d["environment"], d["task"])


class _AppendLog:
    """One JSONL file; appends are flushed per line, torn tails dropped on load."""

    def __init__(self, path: Path, durable: bool):
        self.path = path
        self.durable = durable
        self._fh = None

    def load(self) -> Iterator[dict]:
        if not self.path.exists():
            return
        valid_bytes = 0
        with open(self.path, "rb") as fh:
            for line in fh:
                if not line.endswith(b"\n"):
                    break  # torn final line from a crash; drop it
                try:
                    yield json.loads(line)
                except json.JSONDecodeError:
                    break
                valid_bytes += len(line)
        # truncate away any torn tail so future appends start clean
        if valid_bytes < self.path.stat().st_size:
            with open(self.path, "r+b") as fh:
                fh.truncate(valid_bytes)

    def append(self, record: dict) -> None:
        if self._fh is None:
            self._fh = open(self.path, "ab")
        line = json.dumps(record, separators=(",", ":")) + "\n"
        self._fh.write(line.encode("utf-8"))
        self._fh.flush()
        if self.durable:
            os.fsync(self._fh.fileno())

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None


class Store:
    """Append-only persistence with in-memory indexes.

    Thread-safe: a single lock linearizes writes (appends within one
    scenario get contiguous seqs under any interleaving); readers take the
    same lock briefly to snapshot.
    """

    def __init__(self, data_dir, durable: bool = True):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self.blob_dir = self.data_dir / "blobs"
        self.blob_dir.mkdir(exist_ok=True)
        self._lock = threading.RLock()
        self._changed = threading.Condition(self._lock)

        self._logs = {name: _AppendLog(self.data_dir / name, durable)
                      for name in _RECORD_FILES}

        self.scenarios: set[ScenarioKey] = set()
        self.screenshots: dict[str, Screenshot] = {}
        self.widgets: dict[str, Widget] = {}
        self.widgets_by_screenshot: dict[str, list[str]] = defaultdict(list)
        self.events: dict[ScenarioKey, list[InteractionEvent]] = defaultdict(list)
        self.pose_samples: dict[ScenarioKey, list[PoseSample]] = defaultdict(list)
        self.annotations: dict[str, Annotation] = {}

        self._replay()

    # -- recovery ----------------------------------------------------------

    def _replay(self) -> None:
        for rec in self._logs["scenarios.jsonl"].load():
            self.scenarios.add(_scenario_from_json(rec))
        for rec in self._logs["screenshots.jsonl"].load():
            s = Screenshot(rec["id"], rec["participant"], rec["image_ref"],
                           rec.get("app_hint"), rec["captured_at"], rec["redacted"])
            self.screenshots[s.id] = s
        for rec in self._logs["widgets.jsonl"].load():
            w = Widget(rec["id"], rec["screenshot_id"],
                       CropRegion(*rec["crop"]), rec["image_ref"], rec["created_at"])
            self.widgets[w.id] = w
            self.widgets_by_screenshot[w.screenshot_id].append(w.id)
        for rec in self._logs["events.jsonl"].load():
            key = _scenario_from_json(rec)
            ev = InteractionEvent(rec["seq"], key, rec["widget_id"],
                                  EventKind(rec["kind"]), _pose_from_json(rec["pose"]),
                                  rec["at"])
            log = self.events[key]
            if ev.seq != len(log) + 1:
                break  # replay stops at first gap; log stays a valid prefix
            log.append(ev)
            self.scenarios.add(key)
        for rec in self._logs["pose_samples.jsonl"].load():
            key = _scenario_from_json(rec)
            self.pose_samples[key].append(
                PoseSample(key, _pose_from_json(rec["pose"]), rec["at"]))
        for rec in self._logs["annotations.jsonl"].load():
            a = _annotation_from_json(rec)
            self.annotations[a.widget_id] = a

    def close(self) -> None:
        for log in self._logs.values():
            log.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    # -- blobs -------------------------------------------------------------

    def put_blob(self, data: bytes) -> str:
        if not data:
            raise errors.EmptyBlob("refusing to store an empty blob")
        digest = hashlib.sha256(data).hexdigest()
        path = self.blob_dir / digest
        if not path.exists():
            tmp = path.with_suffix(".tmp")
            tmp.write_bytes(data)
            tmp.replace(path)
        return digest

    def get_blob(self, ref: str) -> bytes:
        path = self.blob_dir / ref
        if not path.exists():
            raise errors.MissingBlob("no blob %s" % ref)
        return path.read_bytes()

    def has_blob(self, ref: str) -> bool:
        return (self.blob_dir / ref).exists()

    def blob_refs(self) -> set[str]:
        return {p.name for p in self.blob_dir.iterdir() if not p.name.endswith(".tmp")}

    # -- records -----------------------------------------------------------

    def put_scenario(self, key: ScenarioKey) -> None:
        with self._lock:
            if key in self.scenarios:
                return
            self._logs["scenarios.jsonl"].append(_scenario_to_json(key))
            self.scenarios.add(key)

    def put_screenshot(self, s: Screenshot) -> str:
        with self._lock:
            if not self.has_blob(s.image_ref):
                raise errors.DanglingReference("screenshot %s references missing blob" % s.id)
            existing = self.screenshots.get(s.id)
            if existing is not None:
                if existing == s:
                    return s.id  # idempotent re-put
                raise errors.DuplicateId("screenshot id %s already exists with different content" % s.id)
            self._logs["screenshots.jsonl"].append({
                "id": s.id, "participant": s.participant_id, "image_ref": s.image_ref,
                "app_hint": s.app_hint, "captured_at": s.captured_at, "redacted": s.redacted,
            })
            self.screenshots[s.id] = s
            return s.id

    def put_widget(self, w: Widget) -> str:
        with self._lock:
            if w.screenshot_id not in self.screenshots:
                raise errors.DanglingReference(
                    "widget %s references missing screenshot %s" % (w.id, w.screenshot_id))
            if not self.has_blob(w.image_ref):
                raise errors.DanglingReference("widget %s references missing blob" % w.id)
            existing = self.widgets.get(w.id)
            if existing is not None:
                if existing == w:
                    return w.id
                raise errors.DuplicateId("widget id %s already exists with different content" % w.id)
            self._logs["widgets.jsonl"].append({
                "id": w.id, "screenshot_id": w.screenshot_id,
                "crop": [w.crop.x0, w.crop.y0, w.crop.x1, w.crop.y1],
                "image_ref": w.image_ref, "created_at": w.created_at,
            })
            self.widgets[w.id] = w
            self.widgets_by_screenshot[w.screenshot_id].append(w.id)
            return w.id

    def list_widgets(self, screenshot_id: str) -> list[Widget]:
        with self._lock:
            if screenshot_id not in self.screenshots:
                raise errors.UnknownScreenshot(screenshot_id)
            return [self.widgets[wid] for wid in self.widgets_by_screenshot[screenshot_id]]

    # -- event log ---------------------------------------------------------

    def append_event(self, scenario: ScenarioKey, widget_id: str,
                     kind: EventKind, pose: Pose, at: int = 0) -> int:
        validate_pose(pose)
        with self._lock:
            if widget_id not in self.widgets:
                raise errors.UnknownWidget(widget_id)
            log = self.events[scenario]
            if kind is EventKind.UPDATE:
                if not any(e.widget_id == widget_id for e in log):
                    raise errors.UpdateBeforeAdd(
                        "no prior add for widget %s in %s" % (widget_id, scenario.as_path()))
            seq = len(log) + 1
            ev = InteractionEvent(seq, scenario, widget_id, kind, pose, at)
            rec = _scenario_to_json(scenario)
            rec.update({"seq": seq, "widget_id": widget_id, "kind": kind.value,
                        "pose": _pose_to_json(pose), "at": at})
            self._logs["events.jsonl"].append(rec)
            log.append(ev)
            self.scenarios.add(scenario)
            self._changed.notify_all()
            return seq

    def get_changes(self, scenario: ScenarioKey, since_seq: int,
                    wait_budget_ms: int = 0) -> tuple[list[InteractionEvent], int]:
        """Events with seq > since_seq plus the current max seq.

        Blocks up to wait_budget_ms when caught up; returns an empty batch
        on timeout.
        """
        if since_seq < 0:
            raise ValueError("since_seq must be >= 0")
        deadline = None
        with self._changed:
            if scenario not in self.scenarios and scenario not in self.events:
                raise errors.UnknownScenario(scenario.as_path())
            while True:
                log = self.events[scenario]
                if len(log) > since_seq:
                    return list(log[since_seq:]), len(log)
                if wait_budget_ms <= 0:
                    return [], len(log)
                now = time.monotonic()
                if deadline is None:
                    deadline = now + wait_budget_ms / 1000.0
                remaining = deadline - now
                if remaining <= 0:
                    return [], len(log)
                self._changed.wait(remaining)

    def max_seq(self, scenario: ScenarioKey) -> int:
        with self._lock:
            return len(self.events[scenario])

    def layout(self, scenario: ScenarioKey) -> Layout:
        with self._lock:
            if scenario not in self.scenarios and not self.events[scenario]:
                raise errors.UnknownScenario(scenario.as_path())
            return fold_events(list(self.events[scenario]), scenario)

    # -- pose trace --------------------------------------------------------

    def append_pose_sample(self, sample: PoseSample) -> None:
        validate_pose(sample.pose)
        with self._lock:
            trace = self.pose_samples[sample.scenario]
            if trace and sample.at < trace[-1].at:
                raise errors.TimestampRegression(
                    "sample at %d precedes last sample at %d" % (sample.at, trace[-1].at))
            rec = _scenario_to_json(sample.scenario)
            rec.update({"pose": _pose_to_json(sample.pose), "at": sample.at})
            self._logs["pose_samples.jsonl"].append(rec)
            trace.append(sample)

    # -- annotations -------------------------------------------------------

    def upsert_annotation(self, widget_id: str, annotation: Annotation,
                          expected_version: int) -> int:
        with self._lock:
            if widget_id not in self.widgets:
                raise errors.UnknownWidget(widget_id)
            current = self.annotations.get(widget_id)
            current_version = current.version if current else 0
            if expected_version != current_version:
                raise errors.VersionConflict(
                    "expected version %d, stored version is %d" % (expected_version, current_version))
            new = Annotation(
                widget_id=widget_id,
                app_name=annotation.app_name,
                screenshot_desc=annotation.screenshot_desc,
                widget_desc=annotation.widget_desc,
                functionality=annotation.functionality,
                excluded_parts=annotation.excluded_parts,
                ui_types=annotation.ui_types,
                category=annotation.category,
                cluster_id=annotation.cluster_id,
                activity_type=annotation.activity_type,
                version=current_version + 1,
            ).validated()
            self._logs["annotations.jsonl"].append(_annotation_to_json(new))
            self.annotations[widget_id] = new
            return new.version


def _annotation_to_json(a: Annotation) -> dict:
    return {
        "widget_id": a.widget_id, "app_name": a.app_name,
        "screenshot_desc": a.screenshot_desc, "widget_desc": a.widget_desc,
        "functionality": a.functionality, "excluded_parts": a.excluded_parts,
        "ui_types": list(a.ui_types), "category": a.category,
        "cluster_id": a.cluster_id,
        "activity_type": a.activity_type.value if a.activity_type else None,
        "version": a.version,
    }


def _annotation_from_json(d: dict) -> Annotation:
    return Annotation(
        widget_id=d["widget_id"], app_name=d["app_name"],
        screenshot_desc=d["screenshot_desc"], widget_desc=d["widget_desc"],
        functionality=d["functionality"], excluded_parts=d["excluded_parts"],
        ui_types=tuple(d["ui_types"]), category=d["category"],
        cluster_id=d.get("cluster_id"),
        activity_type=ActivityType(d["activity_type"]) if d.get("activity_type") else None,
        version=d["version"],
    )
