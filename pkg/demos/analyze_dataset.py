"""Build a tiny annotated dataset in memory and walk through the analytics.

Run:  python3 demos/analyze_dataset.py
"""

import tempfile

from layoutminer import analysis
from layoutminer.dataset import Dataset
from layoutminer.model import (
    Annotation,
    CropRegion,
    EventKind,
    Pose,
    ScenarioKey,
    Screenshot,
    Widget,
)
from layoutminer.store import Store

LAYOUTS = {
    ScenarioKey("p1", "office", "focus work"): {
        "w-mail": ((-0.4, 1.2, -0.5), "Productivity", "email inbox"),
        "w-cal": ((-0.2, 1.2, -0.5), "Productivity", "calendar"),
        "w-music": ((1.8, 1.0, -0.5), "Music", "music playlist"),
    },
    ScenarioKey("p2", "kitchen", "cooking"): {
        "w-recipe": ((0.0, 1.4, -0.8), "Food & Drink", "instructions"),
        "w-timer": ((0.1, 1.3, -0.8), "Utilities", "timer"),
    },
}


def main():
    with tempfile.TemporaryDirectory() as tmp, Store(tmp) as store:
        for key, widgets in LAYOUTS.items():
            for wid, (pos, category, functionality) in widgets.items():
                ref = store.put_blob(("img-" + wid).encode())
                store.put_screenshot(Screenshot("shot-" + wid, key.participant_id, ref))
                store.put_widget(Widget(wid, "shot-" + wid, CropRegion(0, 0, 1, 1), ref))
                store.append_event(key, wid, EventKind.ADD,
                                   Pose(pos, (1.0, 0.0, 0.0, 0.0)))
                store.upsert_annotation(wid, Annotation(
                    widget_id=wid, category=category, functionality=functionality,
                    ui_types=("InformationalComponent",)), 0)

        ds = Dataset.from_store(store)

        print("category distribution:")
        for label, entry in analysis.category_distribution(ds).entries.items():
            print("  %-14s %d (%.0f%%)" % (label, entry.count, entry.fraction * 100))

        print("top functionalities:", analysis.top_functionalities(ds, k=3))

        stats = analysis.widgets_per_scenario(ds)
        print("widgets per scenario: mean %.2f" % stats.mean_per_scenario)

        for key, layout in ds.layouts().items():
            clusters = analysis.cluster_layout(layout, threshold_m=0.75)
            print("%s: %d proximity cluster(s) %s"
                  % (key.as_path(), len(clusters),
                     [sorted(c.widget_ids) for c in clusters]))


if __name__ == "__main__":
    main()
