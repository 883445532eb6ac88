"""CSV dataset export/import.

Layout of an exported dataset directory:

    scenarios.csv screenshots.csv widgets.csv events.csv
    pose_samples.csv annotations.csv
    images/<sha256>          (blobs, named by content hash)
    manifest.json

Column orders are fixed (see the ``*_COLUMNS`` constants); real numbers are
serialized with 9 significant digits; text is UTF-8 with RFC-4180 quoting.
Export ordering is deterministic, so export -> import -> export is a byte
fixed point.
"""

from __future__ import annotations

import csv
import json
import shutil
from dataclasses import dataclass, field
from pathlib import Path

from .errors import MissingBlob, SchemaMismatch
from .model import (
    ActivityType,
    Annotation,
    CropRegion,
    EventKind,
    PoseSample,
    Pose,
    ScenarioKey,
    Screenshot,
    Widget,
)
from .store import Store

SCHEMA_VERSION = "1"

SCENARIOS_COLUMNS = ["participant_id", "environment", "task"]
SCREENSHOTS_COLUMNS = ["screenshot_id", "participant_id", "image_hash",
                       "app_hint", "captured_at_ms", "redacted"]
WIDGETS_COLUMNS = ["widget_id", "screenshot_id", "crop_x0", "crop_y0",
                   "crop_x1", "crop_y1", "image_hash", "created_at_ms"]
EVENTS_COLUMNS = ["scenario_participant", "scenario_environment", "scenario_task",
                  "seq", "widget_id", "kind", "px", "py", "pz",
                  "qw", "qx", "qy", "qz", "at_ms"]
POSE_SAMPLES_COLUMNS = ["scenario_participant", "scenario_environment", "scenario_task",
                        "px", "py", "pz", "qw", "qx", "qy", "qz", "at_ms"]
ANNOTATIONS_COLUMNS = ["widget_id", "app_name", "screenshot_desc", "widget_desc",
                       "functionality", "excluded_parts", "ui_types", "category",
                       "cluster_id", "activity_type", "version"]


@dataclass
class DatasetManifest:
    schema_version: str = SCHEMA_VERSION
    counts: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"schema_version": self.schema_version, "counts": dict(sorted(self.counts.items()))}


def _fmt(x: float) -> str:
    return format(x, ".9g")


def _open_writer(path: Path, columns: list[str]):
    fh = open(path, "w", encoding="utf-8", newline="")
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(columns)
    return fh, writer


def export_dataset(store: Store, out_dir) -> DatasetManifest:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    images = out / "images"
    images.mkdir(exist_ok=True)

    counts = {}

    fh, w = _open_writer(out / "scenarios.csv", SCENARIOS_COLUMNS)
    scenarios = sorted(store.scenarios)
    for s in scenarios:
        w.writerow([s.participant_id, s.environment, s.task])
    fh.close()
    counts["scenarios"] = len(scenarios)

    fh, w = _open_writer(out / "screenshots.csv", SCREENSHOTS_COLUMNS)
    shots = sorted(store.screenshots.values(), key=lambda s: s.id)
    for s in shots:
        w.writerow([s.id, s.participant_id, s.image_ref, s.app_hint or "",
                    s.captured_at, 1 if s.redacted else 0])
    fh.close()
    counts["screenshots"] = len(shots)

    fh, w = _open_writer(out / "widgets.csv", WIDGETS_COLUMNS)
    widgets = sorted(store.widgets.values(), key=lambda x: x.id)
    for wd in widgets:
        w.writerow([wd.id, wd.screenshot_id, _fmt(wd.crop.x0), _fmt(wd.crop.y0),
                    _fmt(wd.crop.x1), _fmt(wd.crop.y1), wd.image_ref, wd.created_at])
    fh.close()
    counts["widgets"] = len(widgets)

    fh, w = _open_writer(out / "events.csv", EVENTS_COLUMNS)
    n_events = 0
    for key in sorted(store.events):
        for ev in store.events[key]:
            p = ev.pose
            w.writerow([key.participant_id, key.environment, key.task,
                        ev.seq, ev.widget_id, ev.kind.value,
                        _fmt(p.position[0]), _fmt(p.position[1]), _fmt(p.position[2]),
                        _fmt(p.orientation[0]), _fmt(p.orientation[1]),
                        _fmt(p.orientation[2]), _fmt(p.orientation[3]), ev.at])
            n_events += 1
    fh.close()
    counts["events"] = n_events

    fh, w = _open_writer(out / "pose_samples.csv", POSE_SAMPLES_COLUMNS)
    n_samples = 0
    for key in sorted(store.pose_samples):
        for ps in store.pose_samples[key]:
            p = ps.pose
            w.writerow([key.participant_id, key.environment, key.task,
                        _fmt(p.position[0]), _fmt(p.position[1]), _fmt(p.position[2]),
                        _fmt(p.orientation[0]), _fmt(p.orientation[1]),
                        _fmt(p.orientation[2]), _fmt(p.orientation[3]), ps.at])
            n_samples += 1
    fh.close()
    counts["pose_samples"] = n_samples

    fh, w = _open_writer(out / "annotations.csv", ANNOTATIONS_COLUMNS)
    annos = sorted(store.annotations.values(), key=lambda a: a.widget_id)
    for a in annos:
        w.writerow([a.widget_id, a.app_name, a.screenshot_desc, a.widget_desc,
                    a.functionality, a.excluded_parts, ";".join(a.ui_types),
                    a.category, a.cluster_id or "",
                    a.activity_type.value if a.activity_type else "", a.version])
    fh.close()
    counts["annotations"] = len(annos)

    exported_refs = ({s.image_ref for s in shots} | {wd.image_ref for wd in widgets})
    for ref in sorted(exported_refs):
        dst = images / ref
        if not dst.exists():
            shutil.copyfile(store.blob_dir / ref, dst)
    counts["blobs"] = len(exported_refs)

    manifest = DatasetManifest(SCHEMA_VERSION, counts)
    with open(out / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest.to_json(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


def _read_rows(path: Path, expected_columns: list[str]) -> list[dict]:
    if not path.exists():
        raise SchemaMismatch("missing file %s" % path.name)
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaMismatch("%s has no header row" % path.name)
        if header != expected_columns:
            raise SchemaMismatch(
                "%s columns %r do not match schema %r" % (path.name, header, expected_columns))
        return [dict(zip(expected_columns, row)) for row in reader]


def _int_ts(value: str, context: str) -> int:
    ts = int(value)
    if ts < 0:
        raise SchemaMismatch("negative timestamp in %s" % context)
    return ts


def import_dataset(store: Store, in_dir) -> DatasetManifest:
    src = Path(in_dir)
    images = src / "images"

    scenario_rows = _read_rows(src / "scenarios.csv", SCENARIOS_COLUMNS)
    shot_rows = _read_rows(src / "screenshots.csv", SCREENSHOTS_COLUMNS)
    widget_rows = _read_rows(src / "widgets.csv", WIDGETS_COLUMNS)
    event_rows = _read_rows(src / "events.csv", EVENTS_COLUMNS)
    sample_rows = _read_rows(src / "pose_samples.csv", POSE_SAMPLES_COLUMNS)
    anno_rows = _read_rows(src / "annotations.csv", ANNOTATIONS_COLUMNS)

    counts = {"scenarios": len(scenario_rows), "screenshots": len(shot_rows),
              "widgets": len(widget_rows), "events": len(event_rows),
              "pose_samples": len(sample_rows), "annotations": len(anno_rows)}

    blob_refs = {r["image_hash"] for r in shot_rows} | {r["image_hash"] for r in widget_rows}
    for ref in sorted(blob_refs):
        path = images / ref
        if not path.exists():
            raise MissingBlob("dataset is missing blob %s" % ref)
    for ref in sorted(blob_refs):
        store.put_blob((images / ref).read_bytes())
    counts["blobs"] = len(blob_refs)

    for r in scenario_rows:
        store.put_scenario(ScenarioKey(r["participant_id"], r["environment"], r["task"]))

    for r in shot_rows:
        store.put_screenshot(Screenshot(
            r["screenshot_id"], r["participant_id"], r["image_hash"],
            r["app_hint"] or None, _int_ts(r["captured_at_ms"], "screenshots.csv"),
            r["redacted"] == "1"))

    for r in widget_rows:
        store.put_widget(Widget(
            r["widget_id"], r["screenshot_id"],
            CropRegion(float(r["crop_x0"]), float(r["crop_y0"]),
                       float(r["crop_x1"]), float(r["crop_y1"])),
            r["image_hash"], _int_ts(r["created_at_ms"], "widgets.csv")))

    for r in event_rows:
        key = ScenarioKey(r["scenario_participant"], r["scenario_environment"], r["scenario_task"])
        seq = store.append_event(
            key, r["widget_id"], EventKind(r["kind"]),
            Pose((float(r["px"]), float(r["py"]), float(r["pz"])),
                 (float(r["qw"]), float(r["qx"]), float(r["qy"]), float(r["qz"]))),
            _int_ts(r["at_ms"], "events.csv"))
        if seq != int(r["seq"]):
            raise SchemaMismatch(
                "events.csv seq %s for %s is not contiguous" % (r["seq"], key.as_path()))

    for r in sample_rows:
        key = ScenarioKey(r["scenario_participant"], r["scenario_environment"], r["scenario_task"])
        store.append_pose_sample(PoseSample(
            key,
            Pose((float(r["px"]), float(r["py"]), float(r["pz"])),
                 (float(r["qw"]), float(r["qx"]), float(r["qy"]), float(r["qz"]))),
            _int_ts(r["at_ms"], "pose_samples.csv")))

    for r in anno_rows:
        anno = Annotation(
            widget_id=r["widget_id"], app_name=r["app_name"],
            screenshot_desc=r["screenshot_desc"], widget_desc=r["widget_desc"],
            functionality=r["functionality"], excluded_parts=r["excluded_parts"],
            ui_types=tuple(t for t in r["ui_types"].split(";") if t),
            category=r["category"], cluster_id=r["cluster_id"] or None,
            activity_type=ActivityType(r["activity_type"]) if r["activity_type"] else None)
        target_version = int(r["version"])
        # replay writes until the recorded version is reached
        current = store.annotations.get(r["widget_id"])
        version = current.version if current else 0
        while version < target_version:
            version = store.upsert_annotation(r["widget_id"], anno, version)

    return DatasetManifest(SCHEMA_VERSION, counts)
