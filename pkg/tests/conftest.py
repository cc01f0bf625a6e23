"""Shared toy fixtures: a four-word instance, a lexicon victim, a small
embedding table with distinct vectors (distinct vectors keep f3 values
tie-free, which several termination tests rely on), and a scripted stub
server for remote-oracle tests."""

from __future__ import annotations

import json
import random
import socket
import threading

import pytest

from hydratext import (
    AttackGoal,
    CandidateSets,
    EmbeddingSimilarity,
    EmbeddingTable,
    LexiconClassifier,
    TokenSequence,
)


class StubServer:
    """Scripted protocol server: sends a handshake per connection, then
    answers each request line via the supplied handler (None hangs up)."""

    def __init__(self, handshake: dict, handler, connections: int = 1):
        self.handshake = handshake
        self.handler = handler
        self._listener = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        self._listener.bind(("127.0.0.1", 0))
        self._listener.listen(connections)
        self.port = self._listener.getsockname()[1]
        self._threads = [
            threading.Thread(target=self._serve, daemon=True) for _ in range(connections)
        ]
        for t in self._threads:
            t.start()

    def _serve(self):
        try:
            conn, _ = self._listener.accept()
        except OSError:
            return
        with conn:
            conn.sendall((json.dumps(self.handshake) + "\n").encode("utf-8"))
            reader = conn.makefile("r", encoding="utf-8")
            for line in reader:
                reply = self.handler(json.loads(line))
                if reply is None:
                    return  # hang up
                conn.sendall((reply + "\n").encode("utf-8"))

    def close(self):
        self._listener.close()

TOY_WEIGHTS = {
    "good": 2.0,
    "movie": 0.5,
    "bad": -2.0,
    "awful": -3.0,
    "film": 0.2,
    "flick": 0.1,
}


@pytest.fixture
def toy_x() -> TokenSequence:
    return TokenSequence.from_words("the movie is good".split())


@pytest.fixture
def toy_candidates(toy_x) -> CandidateSets:
    return CandidateSets.for_tokens(toy_x, [[], ["film", "flick"], [], ["bad", "awful"]])


@pytest.fixture
def toy_oracle() -> LexiconClassifier:
    return LexiconClassifier(TOY_WEIGHTS)


@pytest.fixture
def toy_goal() -> AttackGoal:
    return AttackGoal(1)


@pytest.fixture
def toy_similarity(toy_x, toy_candidates) -> EmbeddingSimilarity:
    rng = random.Random(99)
    words = set(toy_x) | {w for group in toy_candidates.per_position for w in group}
    table = EmbeddingTable(4, {w: [rng.uniform(-1.0, 1.0) for _ in range(4)] for w in words})
    return EmbeddingSimilarity(table)
