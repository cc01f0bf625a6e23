"""Classifier backends hosted by the server.

The reference backend is a linear bag-of-words model persisted as JSON, so
integration tests need nothing downloaded.  Further backends register
themselves in BACKENDS under a string identifier.
"""

from __future__ import annotations

import json
import math
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence


class Backend(ABC):
    """A deterministic multi-class text classifier."""

    num_classes: int

    @abstractmethod
    def predict(self, texts: Sequence[Sequence[str]]) -> list[tuple[int, list[float]]]:
        """Per text: (label, probability vector of length num_classes)."""


def _softmax(scores: Sequence[float]) -> list[float]:
    peak = max(scores)
    exps = [math.exp(s - peak) for s in scores]
    total = sum(exps)
    return [e / total for e in exps]


class LinearBagOfWords(Backend):
    """scores = bias + sum of per-word weight vectors; softmax probabilities.

    Unknown words contribute nothing.  The label is the argmax, ties going to
    the lowest class index.
    """

    def __init__(self, num_classes: int, bias: Sequence[float], weights: Mapping[str, Sequence[float]]):
        if num_classes < 2:
            raise ValueError("need at least two classes")
        if len(bias) != num_classes:
            raise ValueError(f"bias has length {len(bias)}, expected {num_classes}")
        for word, vec in weights.items():
            if len(vec) != num_classes:
                raise ValueError(f"weights for {word!r} have length {len(vec)}")
        self.num_classes = num_classes
        self.bias = [float(b) for b in bias]
        self.weights = {w: [float(v) for v in vec] for w, vec in weights.items()}

    def scores(self, tokens: Sequence[str]) -> list[float]:
        out = list(self.bias)
        for token in tokens:
            vec = self.weights.get(token)
            if vec is not None:
                for k in range(self.num_classes):
                    out[k] += vec[k]
        return out

    def predict(self, texts: Sequence[Sequence[str]]) -> list[tuple[int, list[float]]]:
        results = []
        for tokens in texts:
            probs = _softmax(self.scores(tokens))
            label = max(range(self.num_classes), key=lambda k: (probs[k], -k))
            results.append((label, probs))
        return results

    def save(self, path: str | Path) -> None:
        payload = {
            "backend": "linear_bow",
            "num_classes": self.num_classes,
            "bias": self.bias,
            "weights": self.weights,
        }
        Path(path).write_text(json.dumps(payload, sort_keys=True), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> LinearBagOfWords:
        try:
            payload = json.loads(Path(path).read_text(encoding="utf-8"))
            if payload.get("backend") != "linear_bow":
                raise ValueError(f"artifact is not a linear_bow model: {payload.get('backend')!r}")
            return cls(payload["num_classes"], payload["bias"], payload["weights"])
        except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
            raise ValueError(f"cannot load model from {path}: {exc}") from None


def fit_linear_bow(
    samples: Iterable[tuple[Sequence[str], int]],
    num_classes: int,
    epochs: int = 50,
    learning_rate: float = 0.5,
) -> LinearBagOfWords:
    """Plain softmax-regression fit over word counts; deterministic given the
    sample order."""
    samples = list(samples)
    vocab = sorted({token for tokens, _ in samples for token in tokens})
    model = LinearBagOfWords(num_classes, [0.0] * num_classes, {w: [0.0] * num_classes for w in vocab})
    for _ in range(epochs):
        for tokens, label in samples:
            probs = _softmax(model.scores(tokens))
            grad = [p - (1.0 if k == label else 0.0) for k, p in enumerate(probs)]
            counts: dict[str, int] = {}
            for token in tokens:
                counts[token] = counts.get(token, 0) + 1
            for k in range(num_classes):
                model.bias[k] -= learning_rate * grad[k]
            for token, count in counts.items():
                vec = model.weights[token]
                for k in range(num_classes):
                    vec[k] -= learning_rate * grad[k] * count
    return model


BACKENDS: dict[str, Callable[[str | Path], Backend]] = {
    "linear_bow": LinearBagOfWords.load,
}


def load_backend(kind: str, artifact: str | Path) -> Backend:
    try:
        loader = BACKENDS[kind]
    except KeyError:
        raise ValueError(f"unknown backend {kind!r}; available: {sorted(BACKENDS)}") from None
    return loader(artifact)
