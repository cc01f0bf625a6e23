"""Victim-model oracles: a deterministic lexicon classifier for offline work,
and a TCP client for the newline-delimited JSON model-server protocol."""

from __future__ import annotations

import json
import math
import socket
from pathlib import Path
from typing import Mapping, Sequence

from .errors import OracleTransport, ProtocolViolation
from .objectives import Mode, Prediction, VictimOracle
from .space import TokenSequence


class LexiconClassifier(VictimOracle):
    """Binary bag-of-words classifier.

    P(class 1) = logistic(sum of word weights), unknown words contribute 0;
    the predicted label is 1 iff P(class 1) > 0.5, so a dead tie goes to
    class 0.  Stateless and safe to share across workers.
    """

    num_classes = 2

    def __init__(self, weights: Mapping[str, float], mode: Mode = Mode.SCORE) -> None:
        self.weights = dict(weights)
        self.mode = mode

    @classmethod
    def from_file(cls, path: str | Path, mode: Mode = Mode.SCORE) -> LexiconClassifier:
        """Load a lexicon JSON file: {"weights": {word: number, ...}}."""
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
        weights = obj["weights"]
        if not isinstance(weights, dict):
            raise ValueError(f"{path}: 'weights' must be an object")
        return cls({str(w): float(v) for w, v in weights.items()}, mode=mode)

    def score(self, x: TokenSequence) -> float:
        return sum(self.weights.get(token, 0.0) for token in x)

    def classify(self, texts: Sequence[TokenSequence]) -> list[Prediction]:
        out: list[Prediction] = []
        for x in texts:
            s = self.score(x)
            # numerically stable logistic
            if s >= 0:
                p1 = 1.0 / (1.0 + math.exp(-s))
            else:
                e = math.exp(s)
                p1 = e / (1.0 + e)
            label = 1 if p1 > 0.5 else 0
            probs = (1.0 - p1, p1) if self.mode is Mode.SCORE else None
            out.append(Prediction(label=label, probs=probs))
        return out


class RemoteOracle(VictimOracle):
    """Client for the NDJSON-over-TCP classifier protocol.

    On connect the server sends one line {"mode": ..., "num_classes": ...};
    afterwards every request line is answered by exactly one reply line whose
    id must match.  A decision-mode client discards any probabilities the
    server happens to send, so the information boundary is enforced on this
    side too.  One session per attack worker; sessions are not shared.
    """

    def __init__(
        self,
        host: str,
        port: int,
        timeout: float = 10.0,
        mode: Mode | None = None,
    ) -> None:
        try:
            self._sock = socket.create_connection((host, port), timeout=timeout)
        except OSError as exc:
            raise OracleTransport(f"cannot connect to {host}:{port}: {exc}") from None
        self._sock.settimeout(timeout)
        self._reader = self._sock.makefile("r", encoding="utf-8", newline="\n")
        self._next_id = 0
        handshake = self._read_reply()
        try:
            server_mode = Mode(handshake["mode"])
            self.num_classes = int(handshake["num_classes"])
        except (KeyError, ValueError, TypeError) as exc:
            raise OracleTransport(f"bad handshake {handshake!r}: {exc}") from None
        if mode is None:
            self.mode = server_mode
        elif mode is Mode.SCORE and server_mode is Mode.DECISION:
            raise ValueError("server is decision-mode and cannot provide probabilities")
        else:
            self.mode = mode

    def close(self) -> None:
        try:
            self._reader.close()
        finally:
            self._sock.close()

    def __enter__(self) -> RemoteOracle:
        return self

    def __exit__(self, *exc_info: object) -> None:
        self.close()

    def _read_reply(self) -> dict:
        try:
            line = self._reader.readline()
        except (OSError, socket.timeout) as exc:
            raise OracleTransport(f"read failed: {exc}") from None
        if not line:
            raise OracleTransport("connection closed by server")
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise OracleTransport(f"malformed reply: {exc}") from None
        if not isinstance(obj, dict):
            raise OracleTransport(f"malformed reply: expected an object, got {obj!r}")
        return obj

    def classify(self, texts: Sequence[TokenSequence]) -> list[Prediction]:
        request_id = self._next_id
        self._next_id += 1
        payload = {"id": request_id, "texts": [list(x.tokens) for x in texts]}
        try:
            self._sock.sendall((json.dumps(payload) + "\n").encode("utf-8"))
        except OSError as exc:
            raise OracleTransport(f"send failed: {exc}") from None
        reply = self._read_reply()
        if "error" in reply:
            raise OracleTransport(f"server error: {reply['error']}")
        if reply.get("id") != request_id:
            raise OracleTransport(f"reply id {reply.get('id')!r} does not match request {request_id}")
        labels = reply.get("labels")
        if not isinstance(labels, list) or len(labels) != len(texts):
            raise ProtocolViolation(f"expected {len(texts)} labels, got {labels!r}")
        if self.mode is Mode.DECISION:
            return [Prediction(label=int(label)) for label in labels]
        probs = reply.get("probs")
        if not isinstance(probs, list) or len(probs) != len(texts):
            raise ProtocolViolation(f"expected {len(texts)} probability vectors")
        predictions = []
        for label, vector in zip(labels, probs):
            if not isinstance(vector, list) or len(vector) != self.num_classes:
                raise ProtocolViolation(
                    f"probability vector has length {len(vector) if isinstance(vector, list) else 'n/a'}, "
                    f"expected {self.num_classes}"
                )
            predictions.append(Prediction(label=int(label), probs=tuple(float(p) for p in vector)))
        return predictions
