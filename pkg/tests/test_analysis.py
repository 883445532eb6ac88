import itertools
import math
import random

import pytest

from conftest import add_widget, annotate, place, pose
from layoutminer import analysis
from layoutminer.dataset import Dataset
from layoutminer.errors import (
    MissingActivityType,
    UnannotatedWidget,
    UnlabeledTask,
)
from layoutminer.model import (
    ActivityType,
    EventKind,
    Layout,
    Pose,
    ScenarioKey,
    Screenshot,
)

SC = ScenarioKey("p1", "office", "work")


def layout_of(positions):
    placements = {wid: Pose(tuple(map(float, p)), (1.0, 0.0, 0.0, 0.0))
                  for wid, p in positions.items()}
    return Layout(SC, placements, len(placements))


def brute_force_partition(positions, threshold):
    """Oracle: repeated pairwise merging until fixpoint."""
    groups = [{w} for w in positions]
    changed = True
    while changed:
        changed = False
        for a, b in itertools.combinations(list(groups), 2):
            if any(math.dist(positions[x], positions[y]) <= threshold
                   for x in a for y in b):
                groups.remove(a)
                groups.remove(b)
                groups.append(a | b)
                changed = True
                break
    return {frozenset(g) for g in groups}


class TestClusterLayout:
    def test_single_widget(self):
        clusters = analysis.cluster_layout(layout_of({"w1": (0, 0, 0)}), 0.5)
        assert len(clusters) == 1 and clusters[0].widget_ids == {"w1"}

    def test_chain_vs_far(self):
        layout = layout_of({"w1": (0, 0, 0), "w2": (0.1, 0, 0), "w3": (5, 0, 0)})
        clusters = analysis.cluster_layout(layout, 0.5)
        assert {frozenset(c.widget_ids) for c in clusters} == {
            frozenset({"w1", "w2"}), frozenset({"w3"})}

    def test_all_coincident(self):
        layout = layout_of({"w%d" % i: (1, 2, 3) for i in range(5)})
        assert len(analysis.cluster_layout(layout, 0.5)) == 1

    def test_matches_brute_force(self):
        rng = random.Random(7)
        for _ in range(50):
            positions = {"w%02d" % i: (rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3))
                         for i in range(rng.randint(1, 12))}
            layout = layout_of(positions)
            got = {frozenset(c.widget_ids)
                   for c in analysis.cluster_layout(layout, 1.0)}
            assert got == brute_force_partition(positions, 1.0)

    def test_order_invariant_deterministic_ids(self):
        positions = {"b": (0, 0, 0), "a": (0.1, 0, 0), "z": (9, 9, 9)}
        l1 = layout_of(positions)
        l2 = layout_of(dict(reversed(list(positions.items()))))
        c1 = analysis.cluster_layout(l1, 0.5)
        c2 = analysis.cluster_layout(l2, 0.5)
        assert [(c.id, sorted(c.widget_ids)) for c in c1] == \
               [(c.id, sorted(c.widget_ids)) for c in c2]
        assert [c.id for c in c1] == ["c001", "c002"]
        assert min(c1[0].widget_ids) < min(c1[1].widget_ids)

    def test_extreme_thresholds(self):
        positions = {"w%d" % i: (float(i), 0, 0) for i in range(6)}
        layout = layout_of(positions)
        assert len(analysis.cluster_layout(layout, 1e9)) == 1
        assert len(analysis.cluster_layout(layout, 1e-9)) == 6


def build_annotated_store(store):
    """4 widgets: 3 Productivity + 1 Music, in office and kitchen scenarios."""
    office = ScenarioKey("p1", "office", "work")
    kitchen = ScenarioKey("p2", "kitchen", "cooking")
    specs = [
        ("w1", office, "Productivity", ("InformationalComponent",), "Email Inbox"),
        ("w2", office, "Productivity", ("InformationalComponent",), "email  INBOX"),
        ("w3", office, "Productivity", ("NavigationalComponent",), "todo list"),
        ("w4", kitchen, "Music", ("InputControl",), "music playlist"),
    ]
    for i, (wid, key, cat, types, func) in enumerate(specs):
        add_widget(store, wid, participant=key.participant_id,
                   crop=(0.0, 0.0, 1.0, 1.0) if i != 0 else (0.2, 0.2, 0.8, 0.8))
        place(store, key, wid, pose(x=i))
        annotate(store, wid, category=cat, ui_types=types, functionality=func,
                 app_name="App%d" % i)
    return office, kitchen


class TestCategoryDistribution:
    def test_counting_oracle(self, store):
        build_annotated_store(store)
        dist = analysis.category_distribution(Dataset.from_store(store))
        assert dist.count("Productivity") == 3
        assert dist.count("Music") == 1
        assert dist.fraction("Productivity") == pytest.approx(0.75)
        assert dist.fraction("Music") == pytest.approx(0.25)

    def test_environment_filter(self, store):
        build_annotated_store(store)
        dist = analysis.category_distribution(Dataset.from_store(store), "kitchen")
        assert dist.total == 1 and dist.fraction("Music") == 1.0

    def test_unannotated_listed(self, store):
        build_annotated_store(store)
        add_widget(store, "w9")
        place(store, ScenarioKey("p1", "office", "work"), "w9", pose())
        with pytest.raises(UnannotatedWidget) as exc:
            analysis.category_distribution(Dataset.from_store(store))
        assert exc.value.widget_ids == ["w9"]

    def test_fractions_sum_to_one(self, store):
        build_annotated_store(store)
        dist = analysis.category_distribution(Dataset.from_store(store))
        assert abs(sum(e.fraction for e in dist.entries.values()) - 1.0) <= 1e-9


class TestUiTypeDistribution:
    def test_counting_oracle(self, store):
        # widgets with types {I}, {I}, {N} -> I 2/3, N 1/3
        office = ScenarioKey("p1", "office", "work")
        for wid, types in [("w1", ("InformationalComponent",)),
                           ("w2", ("InformationalComponent",)),
                           ("w3", ("NavigationalComponent",))]:
            add_widget(store, wid)
            place(store, office, wid, pose())
            annotate(store, wid, ui_types=types, category="Productivity")
        dist = analysis.ui_type_distribution(Dataset.from_store(store))
        assert dist.fraction("InformationalComponent") == pytest.approx(2 / 3)
        assert dist.fraction("NavigationalComponent") == pytest.approx(1 / 3)

    def test_all_three_types_symmetry(self, store):
        office = ScenarioKey("p1", "office", "work")
        add_widget(store, "w1")
        place(store, office, "w1", pose())
        annotate(store, "w1", ui_types=(
            "InputControl", "NavigationalComponent", "InformationalComponent"))
        dist = analysis.ui_type_distribution(Dataset.from_store(store))
        for t in ("InputControl", "NavigationalComponent", "InformationalComponent"):
            assert dist.fraction(t) == pytest.approx(1 / 3)


class TestTopFunctionalities:
    def test_normalization_merges_variants(self, store):
        build_annotated_store(store)
        top = analysis.top_functionalities(Dataset.from_store(store), k=10)
        assert top[0] == ("email inbox", 2)

    def test_tie_break_ascending_label(self, store):
        office = ScenarioKey("p1", "office", "work")
        for wid, func in [("w1", "bbb"), ("w2", "bbb"), ("w3", "aaa"),
                          ("w4", "aaa"), ("w5", "ccc")]:
            add_widget(store, wid)
            place(store, office, wid, pose())
            annotate(store, wid, functionality=func)
        top = analysis.top_functionalities(Dataset.from_store(store), k=2)
        assert top == [("aaa", 2), ("bbb", 2)]

    def test_environment_filter(self, store):
        build_annotated_store(store)
        top = analysis.top_functionalities(Dataset.from_store(store),
                                           environment="kitchen", k=5)
        assert top == [("music playlist", 1)]


class TestCropStatistics:
    def test_counting_oracle(self, store):
        build_annotated_store(store)  # w1 cropped, w2-w4 whole
        stats = analysis.crop_statistics(Dataset.from_store(store))
        assert stats["fraction_cropped"] == pytest.approx(0.25)
        assert stats["fraction_whole"] == pytest.approx(0.75)
        assert stats["fraction_cropped"] + stats["fraction_whole"] == pytest.approx(1.0)

    def test_all_whole(self, store):
        office = ScenarioKey("p1", "office", "work")
        for wid in ("w1", "w2"):
            add_widget(store, wid, crop=(0.0, 0.0, 1.0, 1.0))
            place(store, office, wid, pose())
        stats = analysis.crop_statistics(Dataset.from_store(store))
        assert stats["fraction_cropped"] == 0.0
        assert stats["fraction_whole"] == 1.0


class TestClusterStatistics:
    def _store_with_clusters(self, store):
        # planted clusters of sizes 1, 2, 3 across two scenarios
        office = ScenarioKey("p1", "office", "work")
        kitchen = ScenarioKey("p2", "kitchen", "cooking")
        groups = [(office, ["a1"]), (office, ["b1", "b2"]), (kitchen, ["c1", "c2", "c3"])]
        for gi, (key, wids) in enumerate(groups):
            for wi, wid in enumerate(wids):
                add_widget(store, wid, participant=key.participant_id)
                place(store, key, wid, pose(x=gi * 100 + wi * 0.1))
                annotate(store, wid, cluster_id="g%d" % gi,
                         activity_type=[ActivityType.PRIMARY, ActivityType.PERIPHERAL,
                                        ActivityType.AMBIENT][gi])
        return store

    def test_arithmetic_fixture(self, store):
        self._store_with_clusters(store)
        stats = analysis.cluster_statistics(Dataset.from_store(store), "annotated")
        assert stats.total_clusters == 3
        assert stats.mean_widgets_per_cluster == pytest.approx(2.0)
        assert stats.size_histogram == {1: 1, 2: 1, 3: 1}
        assert stats.fraction_singleton == pytest.approx(1 / 6)
        assert stats.fraction_pairs == pytest.approx(2 / 6)
        assert stats.fraction_3plus == pytest.approx(3 / 6)
        assert stats.fraction_gt5 == 0.0
        total = stats.fraction_singleton + stats.fraction_pairs + stats.fraction_3plus
        assert abs(total - 1.0) <= 1e-9

    def test_computed_matches_geometry(self, store):
        self._store_with_clusters(store)
        stats = analysis.cluster_statistics(Dataset.from_store(store), "computed",
                                            threshold_m=0.5)
        assert stats.total_clusters == 3
        assert stats.size_histogram == {1: 1, 2: 1, 3: 1}

    def test_sd_modes_differ(self, store):
        self._store_with_clusters(store)
        ds = Dataset.from_store(store)
        pop = analysis.cluster_statistics(ds, "annotated", sd_mode="population")
        samp = analysis.cluster_statistics(ds, "annotated", sd_mode="sample")
        assert samp.sd_widgets_per_cluster > pop.sd_widgets_per_cluster


class TestActivityBreakdown:
    def test_all_ambient(self, store):
        office = ScenarioKey("p1", "office", "work")
        for wid in ("w1", "w2"):
            add_widget(store, wid)
            place(store, office, wid, pose())
            annotate(store, wid, cluster_id="g-" + wid, activity_type=ActivityType.AMBIENT)
        result = analysis.activity_breakdown(Dataset.from_store(store))
        assert result.overall.fraction("Ambient") == 1.0

    def test_counting_oracle(self, store):
        # clusters: 1 Primary, 1 Primary, 1 Ambient(size 2) -> P 2/3, A 1/3
        office = ScenarioKey("p1", "office", "work")
        for wid, cid, act in [("w1", "g1", ActivityType.PRIMARY),
                              ("w2", "g2", ActivityType.PRIMARY),
                              ("w3", "g3", ActivityType.AMBIENT),
                              ("w4", "g3", ActivityType.AMBIENT)]:
            add_widget(store, wid)
            place(store, office, wid, pose())
            annotate(store, wid, cluster_id=cid, activity_type=act)
        result = analysis.activity_breakdown(Dataset.from_store(store))
        assert result.overall.fraction("Primary") == pytest.approx(2 / 3)
        assert result.overall.fraction("Ambient") == pytest.approx(1 / 3)
        assert result.by_size[2].fraction("Ambient") == 1.0

    def test_missing_activity_type(self, store):
        office = ScenarioKey("p1", "office", "work")
        add_widget(store, "w1")
        place(store, office, "w1", pose())
        annotate(store, "w1", cluster_id="g1")
        with pytest.raises(MissingActivityType):
            analysis.activity_breakdown(Dataset.from_store(store))


class TestStaticDynamic:
    def test_split(self, store):
        office = ScenarioKey("p1", "office", "work")
        kitchen = ScenarioKey("p1", "kitchen", "cooking")
        for wid, key, cat in [("w1", office, "Productivity"),
                              ("w2", kitchen, "Food & Drink")]:
            add_widget(store, wid)
            place(store, key, wid, pose())
            annotate(store, wid, category=cat)
        labels = {"work": "Static", "cooking": "Dynamic"}
        result = analysis.static_dynamic_distribution(Dataset.from_store(store), labels)
        assert result["Static"].count("Productivity") == 1
        assert result["Dynamic"].count("Food & Drink") == 1
        assert result["Dynamic"].count("Productivity") == 0

    def test_same_category_both_sides(self, store):
        office = ScenarioKey("p1", "office", "work")
        kitchen = ScenarioKey("p1", "kitchen", "cooking")
        for wid, key in [("w1", office), ("w2", kitchen)]:
            add_widget(store, wid)
            place(store, key, wid, pose())
            annotate(store, wid, category="Music")
        labels = {"work": "Static", "cooking": "Dynamic"}
        result = analysis.static_dynamic_distribution(Dataset.from_store(store), labels)
        assert result["Static"].count("Music") == result["Dynamic"].count("Music") == 1

    def test_unlabeled_task(self, store):
        office = ScenarioKey("p1", "office", "work")
        add_widget(store, "w1")
        place(store, office, "w1", pose())
        annotate(store, "w1", category="Music")
        with pytest.raises(UnlabeledTask):
            analysis.static_dynamic_distribution(Dataset.from_store(store), {})


class TestScreenshotStatistics:
    def test_single_participant(self, store):
        ref = store.put_blob(b"img")
        for i in range(4):
            store.put_screenshot(Screenshot("s%d" % i, "p1", ref))
        stats = analysis.screenshot_statistics(Dataset.from_store(store))
        assert stats.overall_mean == 4.0
        assert stats.overall_sd == 0.0

    def test_two_participants(self, store):
        ref = store.put_blob(b"img")
        for i in range(2):
            store.put_screenshot(Screenshot("a%d" % i, "p1", ref))
        for i in range(6):
            store.put_screenshot(Screenshot("b%d" % i, "p2", ref))
        stats = analysis.screenshot_statistics(Dataset.from_store(store))
        assert stats.overall_mean == 4.0

    def test_per_environment_groups(self, store):
        office = ScenarioKey("p1", "office", "work")
        add_widget(store, "w1")  # creates shot-w1 for p1
        place(store, office, "w1", pose())
        stats = analysis.screenshot_statistics(Dataset.from_store(store))
        assert stats.per_environment["office"].mean == 1.0
        assert stats.per_environment["office"].minimum == 1
        assert stats.per_environment["office"].maximum == 1


class TestWidgetsPerScenario:
    def test_single_scenario(self, store):
        office = ScenarioKey("p1", "office", "work")
        for wid in ("w1", "w2", "w3"):
            add_widget(store, wid)
            place(store, office, wid, pose())
        stats = analysis.widgets_per_scenario(Dataset.from_store(store))
        assert stats.mean_per_scenario == 3.0
        assert stats.mean_per_participant == 3.0

    def test_two_scenarios(self, store):
        office = ScenarioKey("p1", "office", "work")
        kitchen = ScenarioKey("p2", "kitchen", "cooking")
        for i, (key, n) in enumerate([(office, 2), (kitchen, 4)]):
            for j in range(n):
                wid = "w%d%d" % (i, j)
                add_widget(store, wid, participant=key.participant_id)
                place(store, key, wid, pose())
        stats = analysis.widgets_per_scenario(Dataset.from_store(store))
        assert stats.mean_per_scenario == 3.0
        assert stats.mean_per_participant == 3.0
        assert stats.per_scenario == {"p1/office/work": 2, "p2/kitchen/cooking": 4}

    def test_update_does_not_double_count(self, store):
        office = ScenarioKey("p1", "office", "work")
        add_widget(store, "w1")
        place(store, office, "w1", pose())
        store.append_event(office, "w1", EventKind.UPDATE, pose(x=1))
        stats = analysis.widgets_per_scenario(Dataset.from_store(store))
        assert stats.mean_per_scenario == 1.0


class TestPurity:
    def test_identical_output_bytes(self, store):
        import json
        build_annotated_store(store)
        ds = Dataset.from_store(store)
        a = json.dumps(analysis.category_distribution(ds).to_json(), sort_keys=True)
        b = json.dumps(analysis.category_distribution(Dataset.from_store(store)).to_json(),
                       sort_keys=True)
        assert a == b
