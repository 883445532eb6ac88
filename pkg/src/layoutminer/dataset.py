"""Immutable dataset snapshot consumed by the analysis and reconstruction code."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from .errors import UnknownScenario
from .model import (
    Annotation,
    InteractionEvent,
    Layout,
    PoseSample,
    ScenarioKey,
    Screenshot,
    Widget,
    fold_events,
)


@dataclass(frozen=True)
class Dataset:
    """A consistent snapshot of all records; analysis treats it as read-only."""

    scenarios: tuple[ScenarioKey, ...]
    screenshots: dict[str, Screenshot]
    widgets: dict[str, Widget]
    events: dict[ScenarioKey, tuple[InteractionEvent, ...]]
    pose_samples: dict[ScenarioKey, tuple[PoseSample, ...]]
    annotations: dict[str, Annotation]
    blob_loader: Optional[Callable[[str], bytes]] = None

    @classmethod
    def from_store(cls, store) -> "Dataset":
        with store._lock:
            return cls(
                scenarios=tuple(sorted(store.scenarios)),
                screenshots=dict(store.screenshots),
                widgets=dict(store.widgets),
                events={k: tuple(v) for k, v in store.events.items() if v},
                pose_samples={k: tuple(v) for k, v in store.pose_samples.items() if v},
                annotations=dict(store.annotations),
                blob_loader=store.get_blob,
            )

    def scenario_keys(self) -> list[ScenarioKey]:
        keys = set(self.scenarios) | set(self.events)
        return sorted(keys)

    def event_log(self, scenario: ScenarioKey) -> tuple[InteractionEvent, ...]:
        if scenario not in self.events and scenario not in self.scenarios:
            raise UnknownScenario(scenario.as_path())
        return self.events.get(scenario, ())

    def layout(self, scenario: ScenarioKey) -> Layout:
        return fold_events(list(self.event_log(scenario)), scenario)

    def layouts(self) -> dict[ScenarioKey, Layout]:
        """One materialized layout per scenario that has at least one event."""
        return {k: fold_events(list(v), k) for k, v in sorted(self.events.items())}

    def placements(self) -> list[tuple[ScenarioKey, str]]:
        """All (scenario, widget_id) pairs present in materialized layouts."""
        out = []
        for key, layout in self.layouts().items():
            for wid in sorted(layout.placements):
                out.append((key, wid))
        return out

    def participants(self) -> list[str]:
        ids = {k.participant_id for k in self.scenario_keys()}
        ids |= {s.participant_id for s in self.screenshots.values()}
        return sorted(ids)
