"""Single command-line entry point.

Subcommands: serve, import, export, analyze, simulate, preview, scene.
Exit codes: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click

from . import analysis as analysis_mod
from . import clientsim
from .dataset import Dataset
from .dataset_io import export_dataset, import_dataset
from .errors import DomainError, NoData
from .model import ScenarioKey
from .reconstruct import SceneOptions, build_scene, scene_bytes, step_history
from .store import Store

ENV_DATA_DIR = "LAYOUTMINER_DATA_DIR"
ENV_PORT = "LAYOUTMINER_PORT"

ANALYZE_REPORTS = ("categories", "ui-types", "clusters", "activity",
                   "functionalities", "crops", "screenshots", "widgets-per-scenario")


def _open_store(data_dir) -> Store:
    return Store(data_dir)


@click.group(no_args_is_help=False)
@click.option("--data-dir", default=lambda: os.environ.get(ENV_DATA_DIR, "./data"),
              show_default="./data or $%s" % ENV_DATA_DIR,
              help="Store directory.")
@click.pass_context
def main(ctx, data_dir):
    """Event-sourced XR layout store, sync service and analysis tools."""
    ctx.ensure_object(dict)
    ctx.obj["data_dir"] = data_dir


@main.command()
@click.option("--port", default=lambda: int(os.environ.get(ENV_PORT, "8800")),
              show_default="8800 or $%s" % ENV_PORT, type=int)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--ui-dir", default=None, type=click.Path(exists=True),
              help="Optional static directory served at /ui.")
@click.pass_context
def serve(ctx, port, host, ui_dir):
    """Run the collection + annotation HTTP services."""
    import uvicorn
    from .service import create_app
    store = _open_store(ctx.obj["data_dir"])
    app = create_app(store, static_dir=ui_dir)
    uvicorn.run(app, host=host, port=port, log_level="warning")


@main.command("import")
@click.argument("directory", type=click.Path(exists=True, file_okay=False))
@click.pass_context
def import_cmd(ctx, directory):
    """Import a CSV dataset directory into the store."""
    with _open_store(ctx.obj["data_dir"]) as store:
        manifest = import_dataset(store, directory)
    click.echo(json.dumps(manifest.to_json(), indent=2, sort_keys=True))


@main.command("export")
@click.argument("directory", type=click.Path(file_okay=False))
@click.pass_context
def export_cmd(ctx, directory):
    """Export the store as a CSV dataset directory."""
    with _open_store(ctx.obj["data_dir"]) as store:
        manifest = export_dataset(store, directory)
    click.echo(json.dumps(manifest.to_json(), indent=2, sort_keys=True))


@main.command()
@click.argument("report", type=click.Choice(ANALYZE_REPORTS))
@click.option("--env", default=None, help="Restrict to one environment.")
@click.option("--threshold-m", default=analysis_mod.DEFAULT_CLUSTER_THRESHOLD_M,
              show_default=True, type=float)
@click.option("--clusters", "cluster_source", default="annotated", show_default=True,
              type=click.Choice(["annotated", "computed"]))
@click.option("--sd", "sd_mode", default="population", show_default=True,
              type=click.Choice(["population", "sample"]))
@click.option("--top-k", default=10, show_default=True, type=int)
@click.option("--out", default=None, type=click.Path(dir_okay=False),
              help="Write the JSON report here instead of stdout.")
@click.pass_context
def analyze(ctx, report, env, threshold_m, cluster_source, sd_mode, top_k, out):
    """Run one analysis report over the store and emit JSON."""
    with _open_store(ctx.obj["data_dir"]) as store:
        dataset = Dataset.from_store(store)
    if not dataset.events and not dataset.widgets:
        raise NoData("no data in store %s" % ctx.obj["data_dir"])

    if report == "categories":
        result = analysis_mod.category_distribution(dataset, env).to_json()
    elif report == "ui-types":
        result = analysis_mod.ui_type_distribution(dataset, env).to_json()
    elif report == "clusters":
        result = analysis_mod.cluster_statistics(
            dataset, cluster_source, threshold_m, sd_mode).to_json()
    elif report == "activity":
        result = analysis_mod.activity_breakdown(dataset, cluster_source, threshold_m).to_json()
    elif report == "functionalities":
        result = {"top": [{"functionality": f, "count": c}
                          for f, c in analysis_mod.top_functionalities(dataset, env, top_k)]}
    elif report == "crops":
        result = analysis_mod.crop_statistics(dataset)
    elif report == "screenshots":
        result = analysis_mod.screenshot_statistics(dataset, sd_mode).to_json()
    else:
        result = analysis_mod.widgets_per_scenario(dataset, sd_mode).to_json()

    text = json.dumps(result, indent=2, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)


@main.command()
@click.argument("script", type=click.Path(exists=True, dir_okay=False))
@click.option("--endpoint", default="http://127.0.0.1:8800", show_default=True)
def simulate(script, endpoint):
    """Replay a placement session script against a running service."""
    session = clientsim.SessionScript.load(script)
    transcript = clientsim.run_placement(session, endpoint)
    for entry in transcript:
        click.echo("%3d %-12s %s" % (entry.step_index, entry.action,
                                     json.dumps(entry.result, sort_keys=True)))


@main.command()
@click.argument("participant")
@click.argument("environment")
@click.argument("task")
@click.option("--endpoint", default="http://127.0.0.1:8800", show_default=True)
@click.option("--poll-ms", default=250, show_default=True, type=int)
@click.option("--quiet-polls", default=3, show_default=True, type=int)
def preview(participant, environment, task, endpoint, poll_ms, quiet_polls):
    """Run a preview client until the change feed goes quiet; print the layout."""
    key = ScenarioKey(participant, environment, task)
    layout = clientsim.run_preview(key, endpoint, poll_ms, quiet_polls)
    out = {"as_of_seq": layout.as_of_seq,
           "placements": {wid: {"position": list(p.position),
                                "orientation": list(p.orientation)}
                          for wid, p in sorted(layout.placements.items())}}
    click.echo(json.dumps(out, indent=2, sort_keys=True))


@main.command()
@click.argument("participant")
@click.argument("environment")
@click.argument("task")
@click.option("--step", default=None, type=int,
              help="Export the scene after this event; default: full log.")
@click.option("--all-steps", is_flag=True,
              help="Export the whole interaction history, one file per event.")
@click.option("--quad-width-m", default=0.30, show_default=True, type=float)
@click.option("--flip-normals", is_flag=True)
@click.option("--out", default=None, type=click.Path(),
              help="Output file (or directory with --all-steps).")
@click.pass_context
def scene(ctx, participant, environment, task, step, all_steps, quad_width_m,
          flip_normals, out):
    """Export a scenario layout as a .scene.json file."""
    key = ScenarioKey(participant, environment, task)
    opts = SceneOptions(quad_width_m=quad_width_m, flip_normals=flip_normals)
    with _open_store(ctx.obj["data_dir"]) as store:
        dataset = Dataset.from_store(store)
    if all_steps:
        out_dir = Path(out or ".")
        out_dir.mkdir(parents=True, exist_ok=True)
        for k, data in enumerate(step_history(dataset, key, opts), start=1):
            (out_dir / ("%s_%s_%s_step%03d.scene.json"
                        % (participant, environment, task, k))).write_bytes(data)
        click.echo("wrote %d scene files to %s" % (len(dataset.event_log(key)), out_dir))
    else:
        data = scene_bytes(build_scene(dataset, key, step, opts))
        if out:
            Path(out).write_bytes(data)
        else:
            click.echo(data.decode("utf-8"), nl=False)


def run() -> int:
    try:
        main(standalone_mode=False)
        return 0
    except click.UsageError as exc:
        exc.show(file=sys.stderr)
        return 2
    except click.ClickException as exc:
        exc.show(file=sys.stderr)
        return 1
    except click.exceptions.Abort:
        return 1
    except DomainError as exc:
        print("error [%s]: %s" % (exc.code, exc.message), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(run())
