"""Core domain types and the pure event-log fold.

Everything here is an immutable value type or a pure function; no I/O.
Poses live in a right-handed world frame, positions in meters, orientations
as unit quaternions (w, x, y, z).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Optional, Sequence

from .categories import CATEGORY_SET
from .errors import (
    InvalidCategory,
    InvalidCrop,
    InvalidUiTypes,
    NonFiniteComponent,
    NonMonotonicSeq,
    NonUnitQuaternion,
    UpdateBeforeAdd,
)

QUAT_NORM_TOL = 1e-6
WHOLE_CROP_TOL = 1e-6

UI_TYPES = ("InputControl", "NavigationalComponent", "InformationalComponent")


class EventKind(str, Enum):
    ADD = "add"
    UPDATE = "update"


class ActivityType(str, Enum):
    PRIMARY = "Primary"
    PERIPHERAL = "Peripheral"
    AMBIENT = "Ambient"


@dataclass(frozen=True)
class Pose:
    position: tuple[float, float, float]
    orientation: tuple[float, float, float, float]  # (w, x, y, z)

    def validate(self) -> "Pose":
        validate_pose(self)
        return self


IDENTITY_POSE = Pose((0.0, 0.0, 0.0), (1.0, 0.0, 0.0, 0.0))


def validate_pose(p: Pose) -> None:
    """Raise NonFiniteComponent / NonUnitQuaternion if p violates invariants."""
    comps = tuple(p.position) + tuple(p.orientation)
    if not all(math.isfinite(c) for c in comps):
        raise NonFiniteComponent("pose has a non-finite component: %r" % (comps,))
    norm = math.sqrt(sum(c * c for c in p.orientation))
    if abs(norm - 1.0) > QUAT_NORM_TOL:
        raise NonUnitQuaternion("quaternion norm %.9g is not 1" % norm)


@dataclass(frozen=True, order=True)
class ScenarioKey:
    participant_id: str
    environment: str
    task: str

    def __post_init__(self):
        if not (self.participant_id and self.environment and self.task):
            raise ValueError("ScenarioKey fields must all be non-empty")

    def as_path(self) -> str:
        return f"{self.participant_id}/{self.environment}/{self.task}"


@dataclass(frozen=True)
class CropRegion:
    x0: float
    y0: float
    x1: float
    y1: float

    def __post_init__(self):
        ok = 0.0 <= self.x0 < self.x1 <= 1.0 and 0.0 <= self.y0 < self.y1 <= 1.0
        if not ok:
            raise InvalidCrop(
                "crop (%g,%g,%g,%g) outside 0<=lo<hi<=1" % (self.x0, self.y0, self.x1, self.y1)
            )

    @property
    def width(self) -> float:
        return self.x1 - self.x0

    @property
    def height(self) -> float:
        return self.y1 - self.y0


FULL_CROP = CropRegion(0.0, 0.0, 1.0, 1.0)


class CropClass(str, Enum):
    WHOLE = "Whole"
    CROPPED = "Cropped"


def classify_crop(crop: CropRegion) -> CropClass:
    """Whole iff the crop spans the full screenshot within per-coordinate tolerance."""
    whole = (
        abs(crop.x0 - 0.0) <= WHOLE_CROP_TOL
        and abs(crop.y0 - 0.0) <= WHOLE_CROP_TOL
        and abs(crop.x1 - 1.0) <= WHOLE_CROP_TOL
        and abs(crop.y1 - 1.0) <= WHOLE_CROP_TOL
    )
    return CropClass.WHOLE if whole else CropClass.CROPPED


@dataclass(frozen=True)
class Screenshot:
    id: str
    participant_id: str
    image_ref: str  # content hash of the stored blob
    app_hint: Optional[str] = None
    captured_at: int = 0  # ms since epoch
    redacted: bool = False


@dataclass(frozen=True)
class Widget:
    id: str
    screenshot_id: str
    crop: CropRegion
    image_ref: str  # content hash of the cropped blob
    created_at: int = 0


@dataclass(frozen=True)
class InteractionEvent:
    seq: int
    scenario: ScenarioKey
    widget_id: str
    kind: EventKind
    pose: Pose
    at: int  # ms

    def __post_init__(self):
        if self.seq < 1:
            raise NonMonotonicSeq("seq must be >= 1, got %d" % self.seq)


@dataclass(frozen=True)
class PoseSample:
    scenario: ScenarioKey
    pose: Pose
    at: int


def validate_ui_types(ui_types: Iterable[str]) -> tuple[str, ...]:
    types = tuple(ui_types)
    if not types or len(set(types)) != len(types):
        raise InvalidUiTypes("ui_types must be a non-empty set, got %r" % (types,))
    for t in types:
        if t not in UI_TYPES:
            raise InvalidUiTypes("unknown ui type %r" % t)
    # canonical order keeps serialization deterministic
    return tuple(t for t in UI_TYPES if t in types)


@dataclass(frozen=True)
class Annotation:
    widget_id: str
    app_name: str = ""
    screenshot_desc: str = ""
    widget_desc: str = ""
    functionality: str = ""
    excluded_parts: str = ""
    ui_types: tuple[str, ...] = ()
    category: str = ""
    cluster_id: Optional[str] = None
    activity_type: Optional[ActivityType] = None
    version: int = 0

    def validated(self) -> "Annotation":
        if self.category and self.category not in CATEGORY_SET:
            raise InvalidCategory("category %r is not in the 27-label list" % self.category)
        if self.ui_types:
            object.__setattr__(self, "ui_types", validate_ui_types(self.ui_types))
        if self.version < 0:
            raise ValueError("version must be non-negative")
        return self


@dataclass(frozen=True)
class Layout:
    scenario: ScenarioKey
    placements: Mapping[str, Pose]
    as_of_seq: int

    def __eq__(self, other):
        if not isinstance(other, Layout):
            return NotImplemented
        return (
            self.scenario == other.scenario
            and dict(self.placements) == dict(other.placements)
            and self.as_of_seq == other.as_of_seq
        )


@dataclass(frozen=True)
class Cluster:
    id: str
    scenario: ScenarioKey
    widget_ids: frozenset[str]
    activity_type: Optional[ActivityType] = None

    def __post_init__(self):
        if not self.widget_ids:
            raise ValueError("cluster must contain at least one widget")


def _check_event_stream(events: Sequence[InteractionEvent], start_seq: int) -> None:
    expected = start_seq + 1
    seen_adds: set[str] = set()
    scenario = events[0].scenario if events else None
    for ev in events:
        if ev.scenario != scenario:
            raise ValueError("events from multiple scenarios in one fold")
        if ev.seq != expected:
            raise NonMonotonicSeq(
                "expected seq %d, got %d" % (expected, ev.seq)
            )
        expected += 1
        if ev.kind is EventKind.UPDATE and ev.widget_id not in seen_adds:
            raise UpdateBeforeAdd(
                "update for %r at seq %d precedes its add" % (ev.widget_id, ev.seq)
            )
        seen_adds.add(ev.widget_id)


def fold_events(
    events: Sequence[InteractionEvent],
    scenario: Optional[ScenarioKey] = None,
) -> Layout:
    """Materialize a Layout from a per-scenario event log (last event wins)."""
    if not events:
        key = scenario or ScenarioKey("-", "-", "-")
        return Layout(key, {}, 0)
    _check_event_stream(events, start_seq=events[0].seq - 1)
    if events[0].seq != 1:
        raise NonMonotonicSeq("log must start at seq 1, got %d" % events[0].seq)
    return apply_events(Layout(events[0].scenario, {}, 0), events)


def apply_events(layout: Layout, events: Sequence[InteractionEvent]) -> Layout:
    """Apply a suffix of events to a materialized layout.

    Application is keyed by seq: events at or below layout.as_of_seq are
    skipped, so overlapping / re-delivered batches are harmless.
    """
    placements = dict(layout.placements)
    as_of = layout.as_of_seq
    for ev in events:
        if ev.seq <= as_of:
            continue  # already applied (duplicate delivery)
        if ev.seq != as_of + 1:
            raise NonMonotonicSeq("gap in event stream: have %d, got %d" % (as_of, ev.seq))
        if ev.kind is EventKind.UPDATE and ev.widget_id not in placements:
            raise UpdateBeforeAdd(
                "update for %r at seq %d precedes its add" % (ev.widget_id, ev.seq)
            )
        placements[ev.widget_id] = ev.pose
        as_of = ev.seq
    return Layout(layout.scenario, placements, as_of)
