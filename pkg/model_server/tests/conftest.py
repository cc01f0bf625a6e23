"""Server fixtures: a small three-class model served on an ephemeral port."""

from __future__ import annotations

import json
import socket
import threading

import pytest

from model_server import ClassifierServer, LinearBagOfWords, Mode, ServerConfig

VOCAB_WEIGHTS = {
    "great": [2.0, -1.0, 0.0],
    "awful": [-2.0, 2.5, 0.0],
    "meh": [0.0, 0.0, 1.5],
    "film": [0.3, 0.1, -0.2],
    "boring": [-1.0, 1.2, 0.4],
}


@pytest.fixture
def model(tmp_path):
    backend = LinearBagOfWords(3, [0.1, 0.0, -0.1], VOCAB_WEIGHTS)
    artifact = tmp_path / "model.json"
    backend.save(artifact)
    return backend, artifact


def start_server(artifact, mode: Mode, max_batch: int = 64):
    server = ClassifierServer(
        ServerConfig(port=0, mode=mode, artifact=artifact, max_batch=max_batch)
    )
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    return server


@pytest.fixture
def score_server(model):
    _, artifact = model
    server = start_server(artifact, Mode.SCORE)
    yield server
    server.shutdown()
    server.server_close()


@pytest.fixture
def decision_server(model):
    _, artifact = model
    server = start_server(artifact, Mode.DECISION)
    yield server
    server.shutdown()
    server.server_close()


class RawClient:
    """Line-oriented test client that exposes raw reply dictionaries."""

    def __init__(self, port: int, timeout: float = 5.0):
        self.sock = socket.create_connection(("127.0.0.1", port), timeout=timeout)
        self.reader = self.sock.makefile("r", encoding="utf-8")
        self.handshake = json.loads(self.reader.readline())

    def send_line(self, line: str) -> dict:
        self.sock.sendall((line + "\n").encode("utf-8"))
        return json.loads(self.reader.readline())

    def request(self, request_id: int, texts) -> dict:
        return self.send_line(json.dumps({"id": request_id, "texts": texts}))

    def close(self):
        self.reader.close()
        self.sock.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
