"""TCP classification service.

Protocol: newline-delimited JSON over TCP, UTF-8.  On connect the server
sends one handshake line {"mode": ..., "num_classes": ...}; afterwards each
request line {"id": <uint>, "texts": [[token, ...], ...]} is answered by
exactly one reply line.  Score mode replies carry labels and probability
vectors; decision mode replies carry labels only and never a "probs" key.
Malformed requests get {"id": <uint or null>, "error": ...} and the
connection stays open.
"""

from __future__ import annotations

import json
import logging
import socketserver
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .backends import Backend, load_backend

log = logging.getLogger(__name__)

DEFAULT_MAX_BATCH = 64


class Mode(Enum):
    SCORE = "score"
    DECISION = "decision"


@dataclass(frozen=True)
class ServerConfig:
    host: str = "127.0.0.1"
    port: int = 0  # 0 picks an ephemeral port
    mode: Mode = Mode.SCORE
    backend: str = "linear_bow"
    artifact: str | Path = "model.json"
    max_batch: int = DEFAULT_MAX_BATCH
    num_classes: int | None = None  # checked against the model when given


class _RequestError(Exception):
    def __init__(self, message: str, request_id: int | None):
        super().__init__(message)
        self.request_id = request_id


def _parse_request(line: str, max_batch: int) -> tuple[int, list[list[str]]]:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise _RequestError(f"malformed JSON: {exc}", None) from None
    if not isinstance(obj, dict):
        raise _RequestError("request must be a JSON object", None)
    request_id = obj.get("id")
    if not isinstance(request_id, int) or isinstance(request_id, bool) or request_id < 0:
        raise _RequestError("missing or invalid 'id'", None)
    texts = obj.get("texts")
    if not isinstance(texts, list):
        raise _RequestError("missing 'texts'", request_id)
    if len(texts) > max_batch:
        raise _RequestError(f"batch of {len(texts)} exceeds the limit of {max_batch}", request_id)
    parsed: list[list[str]] = []
    for i, text in enumerate(texts):
        if not isinstance(text, list) or not all(isinstance(t, str) for t in text):
            raise _RequestError(f"texts[{i}] must be a list of strings", request_id)
        parsed.append(text)
    return request_id, parsed


class _Handler(socketserver.StreamRequestHandler):
    def handle(self) -> None:
        server: ClassifierServer = self.server  # type: ignore[assignment]
        self._send(
            {"mode": server.config.mode.value, "num_classes": server.backend.num_classes}
        )
        for raw in self.rfile:
            line = raw.decode("utf-8")
            if not line.strip():
                continue
            try:
                request_id, texts = _parse_request(line, server.config.max_batch)
                verdicts = server.backend.predict(texts)
            except _RequestError as exc:
                self._send({"id": exc.request_id, "error": str(exc)})
                continue
            except Exception as exc:  # backend failure: report, keep serving
                log.exception("backend failed")
                self._send({"id": request_id, "error": f"backend failure: {exc}"})
                continue
            reply: dict = {"id": request_id, "labels": [label for label, _ in verdicts]}
            if server.config.mode is Mode.SCORE:
                reply["probs"] = [probs for _, probs in verdicts]
            self._send(reply)

    def _send(self, payload: dict) -> None:
        self.wfile.write((json.dumps(payload) + "\n").encode("utf-8"))


class ClassifierServer(socketserver.ThreadingTCPServer):
    """One thread per connection; requests within a connection are answered
    strictly in order."""

    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, config: ServerConfig):
        self.config = config
        self.backend: Backend = load_backend(config.backend, config.artifact)
        if config.num_classes is not None and config.num_classes != self.backend.num_classes:
            raise ValueError(
                f"config says {config.num_classes} classes, model has {self.backend.num_classes}"
            )
        super().__init__((config.host, config.port), _Handler)

    @property
    def address(self) -> tuple[str, int]:
        return self.server_address[0], self.server_address[1]


def serve(config: ServerConfig) -> None:
    """Load the model and serve until interrupted; raises before binding if
    the artifact cannot be loaded."""
    with ClassifierServer(config) as server:
        host, port = server.address
        log.info("serving %s model on %s:%d (%s mode)",
                 config.backend, host, port, config.mode.value)
        server.serve_forever()
