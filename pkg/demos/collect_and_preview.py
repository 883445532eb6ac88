"""End-to-end walkthrough: serve, run a scripted placement session, preview it.

Starts an in-process server on a free port, drives a small placement script
through the HTTP client simulator, then opens a preview session and shows that
the previewed layout converges to what the placement client produced.

Run:  python3 demos/collect_and_preview.py
"""

import socket
import tempfile
import threading
import time

import uvicorn

from layoutminer.clientsim import (
    SessionScript,
    check_convergence,
    run_placement,
    run_preview,
    transcript_layout,
)
from layoutminer.model import ScenarioKey
from layoutminer.service import create_app
from layoutminer.store import Store


def start_server(store):
    sock = socket.socket()
    sock.bind(("127.0.0.1", 0))
    port = sock.getsockname()[1]
    sock.close()
    server = uvicorn.Server(uvicorn.Config(create_app(store), host="127.0.0.1",
                                           port=port, log_level="warning"))
    threading.Thread(target=server.run, daemon=True).start()
    while not server.started:
        time.sleep(0.01)
    return server, "http://127.0.0.1:%d" % port


def pose(x, y=1.2, z=-0.5):
    return {"px": x, "py": y, "pz": z, "qw": 1, "qx": 0, "qy": 0, "qz": 0}


def main():
    scenario = ScenarioKey("demo-p1", "office", "focus work")
    script = SessionScript.from_json({
        "scenario": {"participant_id": scenario.participant_id,
                     "environment": scenario.environment, "task": scenario.task},
        "steps": [
            {"at_ms": 0, "action": "CreateWidget", "payload": {"widget_id": "calendar"}},
            {"at_ms": 10, "action": "Place",
             "payload": {"widget_id": "calendar", "pose": pose(-0.4)}},
            {"at_ms": 20, "action": "CreateWidget", "payload": {"widget_id": "todo"}},
            {"at_ms": 30, "action": "Place",
             "payload": {"widget_id": "todo", "pose": pose(0.4)}},
            {"at_ms": 40, "action": "AdjustLast", "payload": {"pose": pose(0.55)}},
            {"at_ms": 50, "action": "Reselect",
             "payload": {"widget_id": "calendar", "pose": pose(-0.55)}},
        ],
    })

    with tempfile.TemporaryDirectory() as tmp, Store(tmp) as store:
        server, endpoint = start_server(store)
        try:
            transcript = run_placement(script, endpoint)
            print("placement session: %d steps, final seq %d"
                  % (len(transcript), transcript[-1].result["seq"]))

            preview = run_preview(scenario, endpoint, poll_interval_ms=20,
                                  stop_after_quiet_polls=2)
            expected = transcript_layout(scenario, transcript)
            report = check_convergence(expected, preview)
            print("preview converged:", report.equal)
            for wid, p in sorted(preview.placements.items()):
                print("  %-10s at (%.2f, %.2f, %.2f)" % (wid, *p.position))
        finally:
            server.should_exit = True


if __name__ == "__main__":
    main()
