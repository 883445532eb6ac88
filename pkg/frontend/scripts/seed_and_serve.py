"""Test fixture server: seed a 1000-row store and serve the HTTP API.

Prints "PORT <n>" once the server accepts connections, then runs until
killed. Used by the frontend test suite's global setup.
"""

import socket
import sys
import tempfile
import threading
import time

import uvicorn

from layoutminer.categories import APP_STORE_CATEGORIES
from layoutminer.model import (
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

ENVS = ["office", "kitchen", "living room", "bedroom"]
UI_TYPES = ["InputControl", "NavigationalComponent", "InformationalComponent"]


def seed(store):
    """40 scenarios x 25 widgets = 1000 placement rows; 5 left unannotated."""
    n = 0
    for p in range(10):
        for e, env in enumerate(ENVS):
            key = ScenarioKey("p%02d" % p, env, "task%d" % (e % 2))
            for i in range(25):
                wid = "fx-w%04d" % n
                ref = store.put_blob(("img-" + wid).encode())
                store.put_screenshot(Screenshot("shot-" + wid, key.participant_id, ref))
                store.put_widget(Widget(wid, "shot-" + wid, CropRegion(0, 0, 1, 1), ref))
                store.append_event(key, wid, EventKind.ADD,
                                   Pose((i * 0.3 - 3.0, 1.2, e - 1.5),
                                        (1.0, 0.0, 0.0, 0.0)))
                if n >= 5:  # first five stay unannotated
                    store.upsert_annotation(wid, Annotation(
                        widget_id=wid,
                        app_name="App %d" % (n % 30),
                        functionality="functionality %d" % (n % 12),
                        category=APP_STORE_CATEGORIES[n % len(APP_STORE_CATEGORIES)],
                        ui_types=(UI_TYPES[n % 3],)), 0)
                n += 1
    assert n == 1000


def main():
    tmp = tempfile.mkdtemp(prefix="webui-fixture-")
    store = Store(tmp, durable=False)
    seed(store)

    sock = socket.socket()
    sock.bind(("127.0.0.1", 0))
    port = sock.getsockname()[1]
    sock.close()

    server = uvicorn.Server(uvicorn.Config(create_app(store), host="127.0.0.1",
                                           port=port, log_level="warning"))
    threading.Thread(target=server.run, daemon=True).start()
    while not server.started:
        time.sleep(0.01)
    print("PORT %d" % port, flush=True)
    try:
        while True:
            time.sleep(3600)
    except KeyboardInterrupt:
        sys.exit(0)


if __name__ == "__main__":
    main()
