from __future__ import annotations

import pytest

from lore_sidecar.backend import SidecarConfig
from lore_sidecar.server import create_app
from lore_sidecar.tiny import DEFAULT_WORDS, build_tiny_model

# entity words used by the synthetic SQuAD sample; adding them to the tiny
# vocabulary keeps its prompts from collapsing entirely to <unk>
SAMPLE_WORDS = DEFAULT_WORDS + [f"sector{i}" for i in range(30)] + [
    "red", "yellow", "violet", "amber", "teal",
    "falcons", "otters", "herons", "badgers", "lynxes",
]


@pytest.fixture(scope="session")
def tiny_model_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("tiny_model")
    return build_tiny_model(out, seed=0, words=SAMPLE_WORDS)


@pytest.fixture(scope="session")
def sidecar_config(tiny_model_dir):
    return SidecarConfig(generator_model_name=str(tiny_model_dir), max_tokens_cap=32)


@pytest.fixture(scope="session")
def client(sidecar_config):
    from fastapi.testclient import TestClient

    with TestClient(create_app(sidecar_config)) as c:
        yield c


@pytest.fixture(scope="session")
def sidecar_url(sidecar_config):
    """The sidecar served over real HTTP, for consumers outside this process."""
    import socket
    import threading
    import time

    import requests
    import uvicorn

    probe = socket.socket()
    probe.bind(("127.0.0.1", 0))
    port = probe.getsockname()[1]
    probe.close()

    server = uvicorn.Server(
        uvicorn.Config(create_app(sidecar_config), host="127.0.0.1", port=port, log_level="warning")
    )
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    url = f"http://127.0.0.1:{port}"
    deadline = time.time() + 60
    while time.time() < deadline:
        try:
            if requests.get(url + "/healthz", timeout=1).status_code == 200:
                break
        except requests.RequestException:
            time.sleep(0.2)
    else:
        raise RuntimeError("sidecar server did not come up")
    yield url
    server.should_exit = True
    thread.join(timeout=10)
