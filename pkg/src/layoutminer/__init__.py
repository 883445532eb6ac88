"""layoutminer: event-sourced store, sync service and analysis tools for
personalized XR widget layouts."""

from .model import (
    ActivityType,
    Annotation,
    Cluster,
    CropClass,
    CropRegion,
    EventKind,
    InteractionEvent,
    Layout,
    Pose,
    PoseSample,
    ScenarioKey,
    Screenshot,
    Widget,
    classify_crop,
    fold_events,
    validate_pose,
)
from .store import Store
from .dataset import Dataset

__all__ = [
    "ActivityType", "Annotation", "Cluster", "CropClass", "CropRegion",
    "EventKind", "InteractionEvent", "Layout", "Pose", "PoseSample",
    "ScenarioKey", "Screenshot", "Widget", "classify_crop", "fold_events",
    "validate_pose", "Store", "Dataset",
]

__version__ = "0.1.0"
