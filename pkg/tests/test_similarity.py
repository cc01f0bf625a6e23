"""Embedding table, mean pooling, cosine, and the overlap fallback."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hydratext import (
    DimensionMismatch,
    EmbeddingSimilarity,
    EmbeddingTable,
    TokenOverlapSimilarity,
    TokenSequence,
    cosine_similarity,
    embed,
)


@pytest.fixture
def table() -> EmbeddingTable:
    return EmbeddingTable(2, {"good": (1.0, 0.0), "nice": (0.8, 0.6)})


class TestEmbed:
    def test_all_unknown_tokens_give_zero_vector(self, table):
        x = TokenSequence.from_words(["completely", "unknown"])
        assert np.array_equal(embed(table, x), np.zeros(2))

    def test_mean_with_unknowns_in_divisor(self, table):
        x = TokenSequence.from_words("the movie is good".split())
        assert np.allclose(embed(table, x), [0.25, 0.0])

    def test_mean_two_known(self, table):
        x = TokenSequence.from_words("the movie is nice".split())
        assert np.allclose(embed(table, x), [0.2, 0.15])


class TestCosine:
    def test_identical_nonzero_vectors(self):
        assert cosine_similarity([0.3, 0.4], [0.3, 0.4]) == 1.0

    def test_hand_computed(self):
        # dot = 0.05, norms 0.25 and 0.25
        assert cosine_similarity([0.25, 0.0], [0.2, 0.15]) == pytest.approx(0.8, abs=1e-12)

    def test_orthogonal(self):
        assert cosine_similarity([1.0, 0.0], [0.0, 1.0]) == 0.0

    def test_zero_norm_guard(self):
        assert cosine_similarity([0.0, 0.0], [1.0, 0.0]) == 0.0
        assert cosine_similarity([0.0, 0.0], [0.0, 0.0]) == 0.0

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            cosine_similarity([1.0], [1.0, 2.0])

    def test_result_clipped_to_range(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            a, b = rng.normal(size=3), rng.normal(size=3)
            assert -1.0 <= cosine_similarity(a, b) <= 1.0


words = st.lists(st.sampled_from(["good", "nice", "blob", "zz"]), min_size=1, max_size=6)


class TestProviders:
    def test_identity_is_one_even_for_unknown_tokens(self, table):
        provider = EmbeddingSimilarity(table)
        x = TokenSequence.from_words(["blob", "zz"])
        assert provider.similarity(x, x) == 1.0

    @given(a=words, b=words)
    @settings(max_examples=150)
    def test_symmetry(self, a, b):
        provider = EmbeddingSimilarity(
            EmbeddingTable(2, {"good": (1.0, 0.0), "nice": (0.8, 0.6)})
        )
        xa, xb = TokenSequence.from_words(a), TokenSequence.from_words(b)
        assert provider.similarity(xa, xb) == provider.similarity(xb, xa)

    @given(a=words, b=words, scale=st.floats(min_value=0.1, max_value=50.0))
    @settings(max_examples=150)
    def test_scale_invariance(self, a, b, scale):
        base = {"good": (1.0, 0.0), "nice": (0.8, 0.6)}
        scaled = {w: (v[0] * scale, v[1] * scale) for w, v in base.items()}
        p1 = EmbeddingSimilarity(EmbeddingTable(2, base))
        p2 = EmbeddingSimilarity(EmbeddingTable(2, scaled))
        xa, xb = TokenSequence.from_words(a), TokenSequence.from_words(b)
        assert p1.similarity(xa, xb) == pytest.approx(p2.similarity(xa, xb), abs=1e-9)

    def test_overlap_fallback(self):
        provider = TokenOverlapSimilarity()
        a = TokenSequence.from_words(["a", "b", "c"])
        b = TokenSequence.from_words(["a", "b", "d"])
        assert provider.similarity(a, a) == 1.0
        assert provider.similarity(a, b) == pytest.approx(2 / 4)


class TestEmbeddingFile:
    def test_roundtrip(self, tmp_path):
        path = tmp_path / "vectors.txt"
        path.write_text("2 3\ngood 1.0 0.0 0.5\nnice 0.8 0.6 -0.25\n", encoding="utf-8")
        table = EmbeddingTable.from_file(path)
        assert table.dimension == 3
        assert len(table) == 2
        assert np.allclose(table.get("nice"), [0.8, 0.6, -0.25])
        assert "blob" not in table

    def test_bad_header(self, tmp_path):
        path = tmp_path / "vectors.txt"
        path.write_text("oops\n", encoding="utf-8")
        with pytest.raises(ValueError):
            EmbeddingTable.from_file(path)

    def test_wrong_column_count(self, tmp_path):
        path = tmp_path / "vectors.txt"
        path.write_text("1 3\ngood 1.0 0.0\n", encoding="utf-8")
        with pytest.raises(ValueError):
            EmbeddingTable.from_file(path)

    def test_count_mismatch(self, tmp_path):
        path = tmp_path / "vectors.txt"
        path.write_text("2 2\ngood 1.0 0.0\n", encoding="utf-8")
        with pytest.raises(ValueError):
            EmbeddingTable.from_file(path)

    def test_vector_length_validated_at_construction(self):
        with pytest.raises(ValueError):
            EmbeddingTable(2, {"good": (1.0, 0.0, 0.3)})
