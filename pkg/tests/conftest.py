import socket
import threading
import time

import pytest
import uvicorn

from layoutminer.model import (
    ActivityType,
    Annotation,
    CropRegion,
    EventKind,
    Pose,
    ScenarioKey,
    Screenshot,
    Widget,
)
from layoutminer.service import create_app
from layoutminer.store import Store


def pose(x=0.0, y=0.0, z=0.0, q=(1.0, 0.0, 0.0, 0.0)):
    return Pose((float(x), float(y), float(z)), tuple(float(c) for c in q))


def add_widget(store, wid, participant="p1", crop=(0.0, 0.0, 1.0, 1.0), app_hint=None):
    """Create blob + screenshot + widget with deterministic ids."""
    blob = ("img-" + wid).encode()
    ref = store.put_blob(blob)
    sid = "shot-" + wid
    store.put_screenshot(Screenshot(sid, participant, ref, app_hint, 0, False))
    store.put_widget(Widget(wid, sid, CropRegion(*crop), ref, 0))
    return wid


def place(store, scenario, wid, p, kind=EventKind.ADD, at=0):
    return store.append_event(scenario, wid, kind, p, at)


def annotate(store, wid, **kwargs):
    current = store.annotations.get(wid)
    version = current.version if current else 0
    anno = Annotation(widget_id=wid, **kwargs)
    return store.upsert_annotation(wid, anno, version)


@pytest.fixture
def store(tmp_path):
    with Store(tmp_path / "data") as s:
        yield s


@pytest.fixture
def scenario():
    return ScenarioKey("p1", "office", "focus work")


class LiveServer:
    def __init__(self, base_url, store):
        self.base_url = base_url
        self.store = store


@pytest.fixture(scope="session")
def live_server(tmp_path_factory):
    """One uvicorn instance shared by the networked tests."""
    data_dir = tmp_path_factory.mktemp("server-data")
    store = Store(data_dir, durable=False)
    app = create_app(store)

    sock = socket.socket()
    sock.bind(("127.0.0.1", 0))
    port = sock.getsockname()[1]
    sock.close()

    config = uvicorn.Config(app, host="127.0.0.1", port=port, log_level="warning")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.monotonic() + 10
    while not server.started:
        if time.monotonic() > deadline:
            raise RuntimeError("server did not start")
        time.sleep(0.01)
    yield LiveServer("http://127.0.0.1:%d" % port, store)
    server.should_exit = True
    thread.join(timeout=5)
    store.close()
