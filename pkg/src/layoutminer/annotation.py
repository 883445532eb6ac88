"""Annotation back-office operations: widget queries, suggestions, summary.

All reads work on a Dataset snapshot, so a query never observes a
half-applied annotation.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

from . import analysis
from .dataset import Dataset
from .errors import (
    InvalidField,
    InvalidFilterField,
    InvalidSortField,
    NoData,
)

TEXT_FIELDS = ("app_name", "screenshot_desc", "widget_desc", "functionality", "excluded_parts")
FILTER_FIELDS = ("environment", "task", "participant", "category", "ui_type",
                 "app_name", "widget_id")
SORT_FIELDS = ("widget_id", "participant", "environment", "task",
               "app_name", "category", "functionality", "version")

MAX_PAGE_LIMIT = 500


@dataclass(frozen=True)
class WidgetQuery:
    q: str = ""
    filters: dict[str, frozenset[str]] = field(default_factory=dict)
    sort_field: str = "widget_id"
    sort_desc: bool = False
    offset: int = 0
    limit: int = 50

    def validated(self) -> "WidgetQuery":
        if not (1 <= self.limit <= MAX_PAGE_LIMIT):
            raise ValueError("limit must be in [1, %d]" % MAX_PAGE_LIMIT)
        if self.offset < 0:
            raise ValueError("offset must be >= 0")
        if self.sort_field not in SORT_FIELDS:
            raise InvalidSortField("sort field %r not in %r" % (self.sort_field, SORT_FIELDS))
        for f in self.filters:
            if f not in FILTER_FIELDS:
                raise InvalidFilterField("filter field %r not in %r" % (f, FILTER_FIELDS))
        return self


def _rows(dataset: Dataset) -> list[dict]:
    rows = []
    for key, wid in dataset.placements():
        anno = dataset.annotations.get(wid)
        rows.append({
            "widget_id": wid,
            "participant": key.participant_id,
            "environment": key.environment,
            "task": key.task,
            "screenshot_id": dataset.widgets[wid].screenshot_id,
            "app_name": anno.app_name if anno else "",
            "screenshot_desc": anno.screenshot_desc if anno else "",
            "widget_desc": anno.widget_desc if anno else "",
            "functionality": anno.functionality if anno else "",
            "excluded_parts": anno.excluded_parts if anno else "",
            "ui_types": list(anno.ui_types) if anno else [],
            "category": anno.category if anno else "",
            "cluster_id": (anno.cluster_id or "") if anno else "",
            "activity_type": (anno.activity_type.value if anno and anno.activity_type else ""),
            "version": anno.version if anno else 0,
        })
    return rows


def _matches(row: dict, query: WidgetQuery) -> bool:
    for f, allowed in query.filters.items():
        if f == "ui_type":
            if not (set(row["ui_types"]) & allowed):
                return False
        elif row[f] not in allowed:
            return False
    if query.q:
        needle = query.q.lower()
        if not any(needle in row[f].lower() for f in TEXT_FIELDS):
            return False
    return True


def query_widgets(dataset: Dataset, query: WidgetQuery) -> dict:
    """Page of placement rows plus the total match count.

    Total order is (sort key, widget_id, scenario), so paging over an
    unchanged snapshot yields every matching row exactly once.
    """
    query = query.validated()
    matching = [r for r in _rows(dataset) if _matches(r, query)]
    matching.sort(key=lambda r: (r[query.sort_field],
                                 r["widget_id"], r["participant"], r["environment"], r["task"]),
                  reverse=query.sort_desc)
    page = matching[query.offset:query.offset + query.limit]
    return {"rows": page, "total_count": len(matching)}


def suggest(dataset: Dataset, fieldname: str, prefix: str, k: int) -> list[str]:
    """Up to k distinct values, case-insensitive prefix match, by descending
    frequency then ascending lexicographic order."""
    if fieldname not in TEXT_FIELDS:
        raise InvalidField("field %r is not a text annotation field" % fieldname)
    if k < 0:
        raise ValueError("k must be >= 0")
    counts = Counter()
    for anno in dataset.annotations.values():
        value = getattr(anno, fieldname)
        if value and value.lower().startswith(prefix.lower()):
            counts[value] += 1
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return [v for v, _ in ranked[:k]]


def summary(dataset: Dataset) -> dict:
    """Dashboard payload: base statistics plus distributions over the
    annotated subset; unannotated placements surface as a count."""
    placements = dataset.placements()
    annotated = [(k, w) for k, w in placements
                 if w in dataset.annotations and dataset.annotations[w].category]
    unannotated = len(placements) - len(annotated)

    payload = {
        "widget_count": len(dataset.widgets),
        "placement_count": len(placements),
        "screenshot_count": len(dataset.screenshots),
        "scenario_count": len(dataset.layouts()),
        "unannotated_count": unannotated,
        "category_distribution": None,
        "ui_type_distribution": None,
        "screenshot_statistics": None,
        "widgets_per_scenario": None,
    }
    if annotated:
        cat_counts = Counter(dataset.annotations[w].category for _, w in annotated)
        payload["category_distribution"] = analysis.Distribution.from_counts(dict(cat_counts)).to_json()
        ui_counts = Counter()
        for _, w in annotated:
            for t in dataset.annotations[w].ui_types:
                ui_counts[t] += 1
        if ui_counts:
            payload["ui_type_distribution"] = analysis.Distribution.from_counts(dict(ui_counts)).to_json()
    if dataset.screenshots:
        payload["screenshot_statistics"] = analysis.screenshot_statistics(dataset).to_json()
    if dataset.events:
        payload["widgets_per_scenario"] = analysis.widgets_per_scenario(dataset).to_json()
    return payload
