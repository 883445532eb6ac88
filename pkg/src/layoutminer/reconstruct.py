"""Scene-file export: portable 3D descriptions of scenario layouts.

A scene file (``*.scene.json``) lists one textured quad per placed widget,
at the pose materialized from the event log. Serialization is deterministic
(sorted keys, 9-significant-digit reals), so two exports of the same prefix
are byte-identical.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass
from typing import Optional, Sequence

from .dataset import Dataset
from .errors import UnknownScenario
from .model import InteractionEvent, Pose, ScenarioKey, fold_events

SCENE_SCHEMA_VERSION = "1"
DEFAULT_QUAD_WIDTH_M = 0.30


@dataclass(frozen=True)
class SceneOptions:
    quad_width_m: float = DEFAULT_QUAD_WIDTH_M
    flip_normals: bool = False  # flip quad facing away from the placement pose
    overlay_refs: tuple[str, ...] = ()  # opaque scan-file paths, copied verbatim


def _image_size(dataset: Dataset, image_ref: str) -> Optional[tuple[int, int]]:
    if dataset.blob_loader is None:
        return None
    try:
        from PIL import Image
        with Image.open(io.BytesIO(dataset.blob_loader(image_ref))) as im:
            return im.size
    except Exception:
        return None


def _quad_aspect(dataset: Dataset, widget) -> float:
    """Crop width/height in source-image pixel space; unit pixels when the
    source blob is not a decodable image."""
    size = _image_size(dataset, dataset.screenshots[widget.screenshot_id].image_ref) \
        if widget.screenshot_id in dataset.screenshots else None
    iw, ih = size if size else (1, 1)
    return (widget.crop.width * iw) / (widget.crop.height * ih)


def _round9(x: float) -> float:
    return float(format(x, ".9g"))


def _pose_json(p: Pose) -> dict:
    return {
        "position": [_round9(c) for c in p.position],
        "orientation": [_round9(c) for c in p.orientation],
    }


def build_scene(dataset: Dataset, scenario: ScenarioKey,
                as_of_seq: Optional[int] = None,
                opts: SceneOptions = SceneOptions()) -> dict:
    """Scene dict for the layout folded from the event prefix <= as_of_seq."""
    log = dataset.event_log(scenario)
    if as_of_seq is None:
        as_of_seq = len(log)
    layout = fold_events(list(log[:as_of_seq]), scenario)

    widgets = []
    for wid in sorted(layout.placements):
        w = dataset.widgets[wid]
        aspect = _quad_aspect(dataset, w)
        width = opts.quad_width_m
        widgets.append({
            "widget_id": wid,
            "image_ref": w.image_ref,
            "pose": _pose_json(layout.placements[wid]),
            "quad_width_m": _round9(width),
            "quad_height_m": _round9(width / aspect),
        })

    return {
        "schema_version": SCENE_SCHEMA_VERSION,
        "scenario": {
            "participant_id": scenario.participant_id,
            "environment": scenario.environment,
            "task": scenario.task,
        },
        "as_of_seq": layout.as_of_seq,
        "quad_width_m": _round9(opts.quad_width_m),
        "flip_normals": opts.flip_normals,
        "overlay_refs": list(opts.overlay_refs),
        "widgets": widgets,
    }


def scene_bytes(scene: dict) -> bytes:
    return (json.dumps(scene, indent=2, sort_keys=True) + "\n").encode("utf-8")


def export_scene(dataset: Dataset, scenario: ScenarioKey,
                 as_of_seq: Optional[int] = None,
                 opts: SceneOptions = SceneOptions()) -> bytes:
    return scene_bytes(build_scene(dataset, scenario, as_of_seq, opts))


def step_history(dataset: Dataset, scenario: ScenarioKey,
                 opts: SceneOptions = SceneOptions()) -> list[bytes]:
    """One scene per event; the final element equals the all-at-once export."""
    log = dataset.event_log(scenario)
    return [export_scene(dataset, scenario, k, opts) for k in range(1, len(log) + 1)]
