"""Similarity providers: mean-pooled static word embeddings with cosine
similarity (the default), and a token-overlap fallback for when no embedding
table is available."""

from __future__ import annotations

from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import DimensionMismatch
from .objectives import SimilarityProvider
from .space import TokenSequence


class EmbeddingTable:
    """Immutable word -> vector map with a fixed dimension."""

    def __init__(self, dimension: int, vectors: Mapping[str, Sequence[float]]) -> None:
        if dimension < 1:
            raise ValueError("embedding dimension must be at least 1")
        self._dim = dimension
        self._vectors: dict[str, np.ndarray] = {}
        for word, vec in vectors.items():
            arr = np.asarray(vec, dtype=np.float64)
            if arr.shape != (dimension,):
                raise ValueError(
                    f"vector for {word!r} has shape {arr.shape}, expected ({dimension},)"
                )
            self._vectors[word] = arr

    @property
    def dimension(self) -> int:
        return self._dim

    def __len__(self) -> int:
        return len(self._vectors)

    def __contains__(self, word: str) -> bool:
        return word in self._vectors

    def get(self, word: str) -> np.ndarray | None:
        return self._vectors.get(word)

    @classmethod
    def from_file(cls, path: str | Path) -> EmbeddingTable:
        """Load a word2vec-style text file: a "count dim" header line, then
        one word and dim decimal floats per line (UTF-8)."""
        path = Path(path)
        with path.open("r", encoding="utf-8") as fh:
            header = fh.readline().split()
            if len(header) != 2:
                raise ValueError(f"{path}: header must be 'count dim'")
            try:
                count, dim = int(header[0]), int(header[1])
            except ValueError:
                raise ValueError(f"{path}: header must hold two integers") from None
            vectors: dict[str, list[float]] = {}
            for lineno, line in enumerate(fh, start=2):
                parts = line.split()
                if not parts:
                    continue
                if len(parts) != dim + 1:
                    raise ValueError(f"{path}:{lineno}: expected a word and {dim} floats")
                vectors[parts[0]] = [float(v) for v in parts[1:]]
        if len(vectors) != count:
            raise ValueError(f"{path}: header promises {count} words, found {len(vectors)}")
        return cls(dim, vectors)


def embed(table: EmbeddingTable, x: TokenSequence) -> np.ndarray:
    """Mean-pooled sequence embedding.

    Unknown tokens contribute a zero vector but still count in the divisor,
    so swapping an unknown word for a known one changes the embedding.
    """
    acc = np.zeros(table.dimension, dtype=np.float64)
    for token in x:
        vec = table.get(token)
        if vec is not None:
            acc += vec
    return acc / len(x)


def cosine_similarity(a: Sequence[float] | np.ndarray, b: Sequence[float] | np.ndarray) -> float:
    """Cosine of two equal-length vectors, clipped to [-1, 1].

    Identical vectors score exactly 1.0; if either vector has zero norm the
    angle is undefined and 0.0 is returned instead.
    """
    va = np.asarray(a, dtype=np.float64)
    vb = np.asarray(b, dtype=np.float64)
    if va.shape != vb.shape:
        raise DimensionMismatch(f"vector lengths differ: {va.shape} vs {vb.shape}")
    na = float(np.linalg.norm(va))
    nb = float(np.linalg.norm(vb))
    if na == 0.0 or nb == 0.0:
        return 0.0
    if np.array_equal(va, vb):
        return 1.0
    value = float(np.dot(va, vb) / (na * nb))
    return max(-1.0, min(1.0, value))


class EmbeddingSimilarity(SimilarityProvider):
    """Cosine of mean-pooled embeddings; identical token sequences score 1.0
    even when every token is unknown."""

    def __init__(self, table: EmbeddingTable) -> None:
        self.table = table

    def similarity(self, a: TokenSequence, b: TokenSequence) -> float:
        if a.tokens == b.tokens:
            return 1.0
        return cosine_similarity(embed(self.table, a), embed(self.table, b))


class TokenOverlapSimilarity(SimilarityProvider):
    """Jaccard overlap of token sets; a crude, embedding-free fallback."""

    def similarity(self, a: TokenSequence, b: TokenSequence) -> float:
        if a.tokens == b.tokens:
            return 1.0
        sa, sb = set(a), set(b)
        return len(sa & sb) / len(sa | sb)
