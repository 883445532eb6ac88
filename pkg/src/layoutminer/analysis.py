"""Deterministic analytics over a dataset snapshot.

All functions are pure: same snapshot, same arguments, same result. Counting
is over widget *placements* (a widget reused in several scenarios counts once
per scenario it appears in), which is also what the filters slice on.
"""

from __future__ import annotations

import math
import statistics
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Optional

from .dataset import Dataset
from .errors import (
    MissingActivityType,
    NoClusters,
    NoData,
    UnannotatedWidget,
    UnlabeledTask,
)
from .model import ActivityType, Cluster, CropClass, Layout, ScenarioKey, classify_crop

DEFAULT_CLUSTER_THRESHOLD_M = 0.75


@dataclass(frozen=True)
class DistEntry:
    count: int
    fraction: float


@dataclass(frozen=True)
class Distribution:
    entries: dict[str, DistEntry]

    @classmethod
    def from_counts(cls, counts: dict[str, int]) -> "Distribution":
        total = sum(counts.values())
        entries = {
            label: DistEntry(c, c / total if total else 0.0)
            for label, c in sorted(counts.items())
        }
        return cls(entries)

    @property
    def total(self) -> int:
        return sum(e.count for e in self.entries.values())

    def fraction(self, label: str) -> float:
        return self.entries[label].fraction if label in self.entries else 0.0

    def count(self, label: str) -> int:
        return self.entries[label].count if label in self.entries else 0

    def to_json(self) -> dict:
        return {label: {"count": e.count, "fraction": e.fraction}
                for label, e in sorted(self.entries.items())}


def _sd(values, mode: str) -> float:
    if mode == "sample":
        return statistics.stdev(values) if len(values) > 1 else 0.0
    return statistics.pstdev(values) if values else 0.0


# -- clustering ---------------------------------------------------------------


def cluster_layout(layout: Layout, threshold_m: float) -> list[Cluster]:
    """Partition a layout into single-linkage proximity clusters.

    Two widgets share a cluster iff a chain of pairwise position distances
    <= threshold_m connects them. Cluster ids are assigned in order of each
    cluster's lowest widget id, so output is independent of input ordering.
    """
    if threshold_m <= 0:
        raise ValueError("threshold_m must be > 0")
    wids = sorted(layout.placements)
    parent = {w: w for w in wids}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra

    for i, a in enumerate(wids):
        pa = layout.placements[a].position
        for b in wids[i + 1:]:
            pb = layout.placements[b].position
            d = math.dist(pa, pb)
            if d <= threshold_m:
                union(a, b)

    groups: dict[str, set[str]] = defaultdict(set)
    for w in wids:
        groups[find(w)].add(w)
    ordered = sorted(groups.values(), key=min)
    return [
        Cluster(id="c%03d" % (i + 1), scenario=layout.scenario, widget_ids=frozenset(g))
        for i, g in enumerate(ordered)
    ]


def _annotated_clusters(dataset: Dataset) -> list[Cluster]:
    """Ground-truth clusters from annotations.

    Placed widgets sharing a non-empty cluster_id within one scenario form a
    cluster; widgets without a cluster_id are singletons.
    """
    clusters: list[Cluster] = []
    for key, layout in dataset.layouts().items():
        groups: dict[str, set[str]] = defaultdict(set)
        singles: list[str] = []
        for wid in sorted(layout.placements):
            anno = dataset.annotations.get(wid)
            cid = anno.cluster_id if anno else None
            if cid:
                groups[cid].add(wid)
            else:
                singles.append(wid)
        for cid in sorted(groups):
            clusters.append(Cluster(
                id=cid, scenario=key, widget_ids=frozenset(groups[cid]),
                activity_type=_cluster_activity(dataset, groups[cid])))
        for wid in singles:
            clusters.append(Cluster(
                id="solo-%s" % wid, scenario=key, widget_ids=frozenset([wid]),
                activity_type=_cluster_activity(dataset, {wid})))
    return clusters


def _cluster_activity(dataset: Dataset, wids) -> Optional[ActivityType]:
    votes = Counter()
    for wid in wids:
        anno = dataset.annotations.get(wid)
        if anno and anno.activity_type:
            votes[anno.activity_type] += 1
    if not votes:
        return None
    # majority wins, ties broken by the enum's declaration order
    order = list(ActivityType)
    return max(votes, key=lambda a: (votes[a], -order.index(a)))


def dataset_clusters(dataset: Dataset, source: str = "annotated",
                     threshold_m: float = DEFAULT_CLUSTER_THRESHOLD_M) -> list[Cluster]:
    if source == "annotated":
        return _annotated_clusters(dataset)
    if source == "computed":
        out = []
        for key, layout in dataset.layouts().items():
            for c in cluster_layout(layout, threshold_m):
                out.append(Cluster(
                    id="%s/%s" % (key.as_path(), c.id), scenario=key,
                    widget_ids=c.widget_ids,
                    activity_type=_cluster_activity(dataset, c.widget_ids)))
        return out
    raise ValueError("source must be 'annotated' or 'computed'")


@dataclass(frozen=True)
class ClusterStats:
    total_clusters: int
    mean_clusters_per_participant: float
    sd_clusters_per_participant: float
    mean_clusters_per_scenario: float
    sd_clusters_per_scenario: float
    mean_widgets_per_cluster: float
    sd_widgets_per_cluster: float
    size_histogram: dict[int, int]
    fraction_singleton: float
    fraction_pairs: float
    fraction_3plus: float
    fraction_gt5: float

    def to_json(self) -> dict:
        d = self.__dict__.copy()
        d["size_histogram"] = {str(k): v for k, v in sorted(self.size_histogram.items())}
        return d


def cluster_statistics(dataset: Dataset, source: str = "annotated",
                       threshold_m: float = DEFAULT_CLUSTER_THRESHOLD_M,
                       sd_mode: str = "population") -> ClusterStats:
    clusters = dataset_clusters(dataset, source, threshold_m)
    if not clusters:
        raise NoClusters("dataset has no placements to cluster")

    sizes = [len(c.widget_ids) for c in clusters]
    per_participant = Counter(c.scenario.participant_id for c in clusters)
    per_scenario = Counter(c.scenario for c in clusters)
    histogram = dict(Counter(sizes))

    # fractions are of widgets, classified by the size of their cluster
    n_widgets = sum(sizes)
    singleton = sum(s for s in sizes if s == 1)
    pairs = sum(s for s in sizes if s == 2)
    three_plus = sum(s for s in sizes if s >= 3)
    gt5 = sum(s for s in sizes if s > 5)

    return ClusterStats(
        total_clusters=len(clusters),
        mean_clusters_per_participant=statistics.mean(per_participant.values()),
        sd_clusters_per_participant=_sd(list(per_participant.values()), sd_mode),
        mean_clusters_per_scenario=statistics.mean(per_scenario.values()),
        sd_clusters_per_scenario=_sd(list(per_scenario.values()), sd_mode),
        mean_widgets_per_cluster=statistics.mean(sizes),
        sd_widgets_per_cluster=_sd(sizes, sd_mode),
        size_histogram=histogram,
        fraction_singleton=singleton / n_widgets,
        fraction_pairs=pairs / n_widgets,
        fraction_3plus=three_plus / n_widgets,
        fraction_gt5=gt5 / n_widgets,
    )


@dataclass(frozen=True)
class ActivityBreakdown:
    overall: Distribution
    by_size: dict[int, Distribution]

    def to_json(self) -> dict:
        return {"overall": self.overall.to_json(),
                "by_size": {str(k): v.to_json() for k, v in sorted(self.by_size.items())}}


def activity_breakdown(dataset: Dataset, source: str = "annotated",
                       threshold_m: float = DEFAULT_CLUSTER_THRESHOLD_M) -> ActivityBreakdown:
    clusters = dataset_clusters(dataset, source, threshold_m)
    if not clusters:
        raise NoClusters("dataset has no placements to cluster")
    missing = [c.id for c in clusters if c.activity_type is None]
    if missing:
        raise MissingActivityType("clusters without activity type: %s" % ", ".join(sorted(missing)))
    overall = Counter(c.activity_type.value for c in clusters)
    by_size_counts: dict[int, Counter] = defaultdict(Counter)
    for c in clusters:
        by_size_counts[len(c.widget_ids)][c.activity_type.value] += 1
    return ActivityBreakdown(
        overall=Distribution.from_counts(dict(overall)),
        by_size={k: Distribution.from_counts(dict(v)) for k, v in by_size_counts.items()},
    )


# -- placement-level distributions -------------------------------------------


def _filtered_placements(dataset: Dataset, environment: Optional[str]) -> list[tuple[ScenarioKey, str]]:
    return [(k, w) for k, w in dataset.placements()
            if environment is None or k.environment == environment]


def _require_annotations(dataset: Dataset, placements, need: str):
    missing = sorted({w for _, w in placements
                      if w not in dataset.annotations
                      or not getattr(dataset.annotations[w], need)})
    if missing:
        raise UnannotatedWidget(missing)


def category_distribution(dataset: Dataset, environment: Optional[str] = None) -> Distribution:
    placements = _filtered_placements(dataset, environment)
    _require_annotations(dataset, placements, "category")
    counts = Counter(dataset.annotations[w].category for _, w in placements)
    return Distribution.from_counts(dict(counts))


def ui_type_distribution(dataset: Dataset, environment: Optional[str] = None) -> Distribution:
    """Distribution over (placement, ui_type) assignment pairs."""
    placements = _filtered_placements(dataset, environment)
    _require_annotations(dataset, placements, "ui_types")
    counts = Counter()
    for _, w in placements:
        for t in dataset.annotations[w].ui_types:
            counts[t] += 1
    return Distribution.from_counts(dict(counts))


def normalize_functionality(label: str) -> str:
    return " ".join(label.split()).lower()


def top_functionalities(dataset: Dataset, environment: Optional[str] = None,
                        k: int = 10) -> list[tuple[str, int]]:
    placements = _filtered_placements(dataset, environment)
    counts = Counter()
    for _, w in placements:
        anno = dataset.annotations.get(w)
        if anno and anno.functionality:
            counts[normalize_functionality(anno.functionality)] += 1
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return ranked[:k]


def crop_statistics(dataset: Dataset) -> dict[str, float]:
    placements = dataset.placements()
    if not placements:
        raise NoData("no placed widgets")
    n_cropped = sum(
        1 for _, w in placements
        if classify_crop(dataset.widgets[w].crop) is CropClass.CROPPED)
    total = len(placements)
    return {"fraction_cropped": n_cropped / total,
            "fraction_whole": (total - n_cropped) / total}


def static_dynamic_distribution(dataset: Dataset,
                                task_labels: dict[str, str]) -> dict[str, Distribution]:
    """Category counts split by whether a placement's scenario task is Static or Dynamic."""
    placements = dataset.placements()
    unlabeled = sorted({k.task for k, _ in placements if k.task not in task_labels})
    if unlabeled:
        raise UnlabeledTask("tasks without a static/dynamic label: %s" % ", ".join(unlabeled))
    _require_annotations(dataset, placements, "category")
    split: dict[str, Counter] = {"Static": Counter(), "Dynamic": Counter()}
    for k, w in placements:
        label = task_labels[k.task]
        if label not in split:
            raise UnlabeledTask("label %r is not Static or Dynamic" % label)
        split[label][dataset.annotations[w].category] += 1
    return {name: Distribution.from_counts(dict(c)) for name, c in split.items()}


# -- count statistics ---------------------------------------------------------


@dataclass(frozen=True)
class GroupCounts:
    mean: float
    minimum: int
    maximum: int

    def to_json(self) -> dict:
        return {"mean": self.mean, "min": self.minimum, "max": self.maximum}


@dataclass(frozen=True)
class ScreenshotStats:
    overall_mean: float
    overall_sd: float
    per_environment: dict[str, GroupCounts]
    per_task: dict[str, GroupCounts]

    def to_json(self) -> dict:
        return {
            "overall_mean": self.overall_mean,
            "overall_sd": self.overall_sd,
            "per_environment": {k: v.to_json() for k, v in sorted(self.per_environment.items())},
            "per_task": {k: v.to_json() for k, v in sorted(self.per_task.items())},
        }


def screenshot_statistics(dataset: Dataset, sd_mode: str = "population") -> ScreenshotStats:
    """Screenshots per participant, overall and grouped by environment / task.

    A screenshot belongs to a group when at least one widget cropped from it
    is placed in a scenario of that group. Group statistics cover only
    participants with >= 1 screenshot in the group.
    """
    per_participant = Counter(s.participant_id for s in dataset.screenshots.values())
    if not per_participant:
        raise NoData("no screenshots")

    shot_envs: dict[str, set[str]] = defaultdict(set)
    shot_tasks: dict[str, set[str]] = defaultdict(set)
    for key, wid in dataset.placements():
        shot_id = dataset.widgets[wid].screenshot_id
        shot_envs[shot_id].add(key.environment)
        shot_tasks[shot_id].add(key.task)

    def group_stats(groups_of) -> dict[str, GroupCounts]:
        counts: dict[str, Counter] = defaultdict(Counter)
        for s in dataset.screenshots.values():
            for g in groups_of(s.id):
                counts[g][s.participant_id] += 1
        return {
            g: GroupCounts(statistics.mean(c.values()), min(c.values()), max(c.values()))
            for g, c in sorted(counts.items())
        }

    values = list(per_participant.values())
    return ScreenshotStats(
        overall_mean=statistics.mean(values),
        overall_sd=_sd(values, sd_mode),
        per_environment=group_stats(lambda sid: shot_envs.get(sid, ())),
        per_task=group_stats(lambda sid: shot_tasks.get(sid, ())),
    )


@dataclass(frozen=True)
class WidgetsPerScenario:
    mean_per_participant: float
    sd_per_participant: float
    mean_per_scenario: float
    sd_per_scenario: float
    per_scenario: dict[str, int]

    def to_json(self) -> dict:
        d = self.__dict__.copy()
        d["per_scenario"] = dict(sorted(self.per_scenario.items()))
        return d


def widgets_per_scenario(dataset: Dataset, sd_mode: str = "population") -> WidgetsPerScenario:
    layouts = dataset.layouts()
    if not layouts:
        raise NoData("no scenarios with events")
    per_scenario = {k.as_path(): len(v.placements) for k, v in layouts.items()}
    per_participant = Counter()
    for k, v in layouts.items():
        per_participant[k.participant_id] += len(v.placements)
    return WidgetsPerScenario(
        mean_per_participant=statistics.mean(per_participant.values()),
        sd_per_participant=_sd(list(per_participant.values()), sd_mode),
        mean_per_scenario=statistics.mean(per_scenario.values()),
        sd_per_scenario=_sd(list(per_scenario.values()), sd_mode),
        per_scenario=per_scenario,
    )
