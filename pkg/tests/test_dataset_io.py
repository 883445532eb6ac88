import csv
from pathlib import Path

import pytest

from conftest import add_widget, annotate, place, pose
from layoutminer import errors
from layoutminer.dataset_io import export_dataset, import_dataset
from layoutminer.model import ActivityType, EventKind, PoseSample, ScenarioKey
from layoutminer.store import Store


def build_fixture(store):
    sc1 = ScenarioKey("p1", "office", "work")
    sc2 = ScenarioKey("p2", "kitchen", "cooking")
    for i in range(10):
        wid = "w%02d" % i
        add_widget(store, wid, participant="p1" if i < 6 else "p2",
                   crop=(0.0, 0.0, 1.0, 1.0) if i % 2 else (0.1, 0.1, 0.9, 0.8))
        key = sc1 if i < 6 else sc2
        place(store, key, wid, pose(x=i * 0.5), at=i * 10)
    store.append_event(sc1, "w00", EventKind.UPDATE, pose(x=7.25), at=100)
    store.append_pose_sample(PoseSample(sc1, pose(x=0.125), at=5))
    store.append_pose_sample(PoseSample(sc1, pose(x=0.25), at=6))
    annotate(store, "w00", app_name="Mail", functionality="email inbox",
             category="Productivity", ui_types=("InformationalComponent",),
             cluster_id="k1", activity_type=ActivityType.PRIMARY)
    annotate(store, "w01", app_name="Tunes", functionality="music playlist",
             category="Music", ui_types=("InputControl", "NavigationalComponent"))
    return sc1, sc2


def dir_snapshot(d):
    out = {}
    for p in sorted(Path(d).rglob("*")):
        if p.is_file():
            out[str(p.relative_to(d))] = p.read_bytes()
    return out


class TestExport:
    def test_empty_store_manifest_all_zeros(self, store, tmp_path):
        manifest = export_dataset(store, tmp_path / "out")
        assert all(v == 0 for v in manifest.counts.values())

    def test_counts_match_rows(self, store, tmp_path):
        build_fixture(store)
        manifest = export_dataset(store, tmp_path / "out")
        for name, kind in [("events.csv", "events"), ("widgets.csv", "widgets"),
                           ("screenshots.csv", "screenshots"),
                           ("annotations.csv", "annotations"),
                           ("pose_samples.csv", "pose_samples")]:
            with open(tmp_path / "out" / name, newline="") as fh:
                rows = list(csv.reader(fh))
            assert len(rows) - 1 == manifest.counts[kind]

    def test_nine_significant_digits(self, store, tmp_path):
        sc = ScenarioKey("p1", "office", "work")
        add_widget(store, "w1")
        place(store, sc, "w1", pose(x=0.123456789123))
        export_dataset(store, tmp_path / "out")
        with open(tmp_path / "out" / "events.csv", newline="") as fh:
            row = list(csv.DictReader(fh))[0]
        assert row["px"] == "0.123456789"


class TestRoundTrip:
    def test_round_trip_byte_identical(self, store, tmp_path):
        build_fixture(store)
        export_dataset(store, tmp_path / "a")
        with Store(tmp_path / "second") as other:
            m = import_dataset(other, tmp_path / "a")
            export_dataset(other, tmp_path / "b")
        assert dir_snapshot(tmp_path / "a") == dir_snapshot(tmp_path / "b")
        assert m.counts["widgets"] == 10
        assert m.counts["events"] == 11

    def test_import_reproduces_logs_and_annotations(self, store, tmp_path):
        sc1, _ = build_fixture(store)
        export_dataset(store, tmp_path / "a")
        with Store(tmp_path / "second") as other:
            import_dataset(other, tmp_path / "a")
            assert other.events[sc1] == store.events[sc1]
            assert other.annotations == store.annotations
            assert other.blob_refs() == store.blob_refs()


class TestSchemaErrors:
    def test_unknown_column(self, store, tmp_path):
        build_fixture(store)
        export_dataset(store, tmp_path / "a")
        widgets = tmp_path / "a" / "widgets.csv"
        text = widgets.read_text()
        widgets.write_text(text.replace("widget_id", "widget_id,bogus", 1))
        with Store(tmp_path / "second") as other:
            with pytest.raises(errors.SchemaMismatch):
                import_dataset(other, tmp_path / "a")

    def test_missing_file(self, store, tmp_path):
        build_fixture(store)
        export_dataset(store, tmp_path / "a")
        (tmp_path / "a" / "events.csv").unlink()
        with Store(tmp_path / "second") as other:
            with pytest.raises(errors.SchemaMismatch):
                import_dataset(other, tmp_path / "a")

    def test_missing_blob(self, store, tmp_path):
        build_fixture(store)
        export_dataset(store, tmp_path / "a")
        victim = next((tmp_path / "a" / "images").iterdir())
        victim.unlink()
        with Store(tmp_path / "second") as other:
            with pytest.raises(errors.MissingBlob):
                import_dataset(other, tmp_path / "a")

    def test_timestamps_preserved_verbatim(self, store, tmp_path):
        # session-relative (small) and wall-clock (epoch ms) both round-trip
        sc = ScenarioKey("p1", "office", "work")
        add_widget(store, "w1")
        add_widget(store, "w2")
        place(store, sc, "w1", pose(), at=0)
        place(store, sc, "w2", pose(), at=1700000000000)
        export_dataset(store, tmp_path / "a")
        with Store(tmp_path / "second") as other:
            import_dataset(other, tmp_path / "a")
            assert [e.at for e in other.events[sc]] == [0, 1700000000000]
