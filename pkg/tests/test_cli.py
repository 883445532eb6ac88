import json
import subprocess
import sys

import pytest

from conftest import add_widget, annotate, place, pose
from layoutminer.dataset_io import export_dataset
from layoutminer.model import ScenarioKey
from layoutminer.store import Store


def run_cli(*args):
    return subprocess.run([sys.executable, "-m", "layoutminer.cli", *args],
                          capture_output=True, text=True)


@pytest.fixture
def fixture_dataset(tmp_path):
    with Store(tmp_path / "src-store") as store:
        office = ScenarioKey("p1", "office", "work")
        for i, cat in enumerate(["Productivity", "Productivity", "Music"]):
            wid = "w%d" % i
            add_widget(store, wid)
            place(store, office, wid, pose(x=i))
            annotate(store, wid, category=cat, functionality="thing %d" % i,
                     ui_types=("InformationalComponent",))
        export_dataset(store, tmp_path / "dataset")
    return tmp_path / "dataset"


class TestExitCodes:
    def test_no_args_is_usage_error(self):
        result = run_cli()
        assert result.returncode == 2
        assert result.stderr  # usage goes to stderr

    def test_unknown_subcommand(self):
        assert run_cli("frobnicate").returncode == 2

    def test_analyze_empty_store_is_domain_error(self, tmp_path):
        result = run_cli("--data-dir", str(tmp_path / "empty"), "analyze", "categories")
        assert result.returncode == 1
        assert "NoData" in result.stderr


class TestImportAnalyze:
    def test_import_then_analyze(self, tmp_path, fixture_dataset):
        data_dir = str(tmp_path / "store")
        imported = run_cli("--data-dir", data_dir, "import", str(fixture_dataset))
        assert imported.returncode == 0, imported.stderr
        manifest = json.loads(imported.stdout)
        assert manifest["counts"]["widgets"] == 3

        report_path = tmp_path / "categories.json"
        analyzed = run_cli("--data-dir", data_dir, "analyze", "categories",
                           "--out", str(report_path))
        assert analyzed.returncode == 0, analyzed.stderr
        report = json.loads(report_path.read_text())
        assert report["Productivity"]["count"] == 2
        assert report["Music"]["count"] == 1

    def test_export_round_trip(self, tmp_path, fixture_dataset):
        data_dir = str(tmp_path / "store")
        run_cli("--data-dir", data_dir, "import", str(fixture_dataset))
        result = run_cli("--data-dir", data_dir, "export", str(tmp_path / "again"))
        assert result.returncode == 0
        a = sorted(p.name for p in fixture_dataset.iterdir())
        b = sorted(p.name for p in (tmp_path / "again").iterdir())
        assert a == b

    def test_reproducible_reports(self, tmp_path, fixture_dataset):
        data_dir = str(tmp_path / "store")
        run_cli("--data-dir", data_dir, "import", str(fixture_dataset))
        first = run_cli("--data-dir", data_dir, "analyze", "functionalities")
        second = run_cli("--data-dir", data_dir, "analyze", "functionalities")
        assert first.stdout == second.stdout
        assert first.returncode == 0


class TestScene:
    def test_scene_export_file(self, tmp_path, fixture_dataset):
        data_dir = str(tmp_path / "store")
        run_cli("--data-dir", data_dir, "import", str(fixture_dataset))
        out = tmp_path / "layout.scene.json"
        result = run_cli("--data-dir", data_dir, "scene", "p1", "office", "work",
                         "--out", str(out))
        assert result.returncode == 0, result.stderr
        scene = json.loads(out.read_text())
        assert len(scene["widgets"]) == 3

    def test_scene_all_steps(self, tmp_path, fixture_dataset):
        data_dir = str(tmp_path / "store")
        run_cli("--data-dir", data_dir, "import", str(fixture_dataset))
        out_dir = tmp_path / "steps"
        result = run_cli("--data-dir", data_dir, "scene", "p1", "office", "work",
                         "--all-steps", "--out", str(out_dir))
        assert result.returncode == 0, result.stderr
        assert len(list(out_dir.glob("*.scene.json"))) == 3
