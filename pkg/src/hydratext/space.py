"""Search space for word-substitution attacks.

An attack instance is an original token sequence plus, for every position, a
list of candidate substitute words.  A solution picks at most one substitute
per position; applying it to the original yields the perturbed text.  Three
one-word variations (insertion, deletion, exchange) connect solutions that
differ in exactly one position's state.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterator, Mapping, Sequence

from .errors import DatasetFormat, InfeasibleSolution


def _check_word(word: object, what: str) -> str:
    if not isinstance(word, str) or not word or any(ch.isspace() for ch in word):
        raise ValueError(f"{what} must be a non-empty string without whitespace, got {word!r}")
    return word


@dataclass(frozen=True)
class TokenSequence:
    """Ordered words of one input; immutable for the lifetime of an attack."""

    tokens: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.tokens:
            raise ValueError("a token sequence needs at least one word")
        for tok in self.tokens:
            _check_word(tok, "token")

    @classmethod
    def from_words(cls, words: Sequence[str]) -> TokenSequence:
        return cls(tuple(words))

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self) -> Iterator[str]:
        return iter(self.tokens)

    def __getitem__(self, i: int) -> str:
        return self.tokens[i]

    def text(self) -> str:
        return " ".join(self.tokens)


@dataclass(frozen=True)
class CandidateSets:
    """Per-position substitute lists.

    A candidate is always identified by its (position, word) pair, so equal
    words offered at different positions never collide.  Within one position
    candidates are pairwise distinct and never equal the original word.
    """

    per_position: tuple[tuple[str, ...], ...]

    @classmethod
    def for_tokens(cls, x: TokenSequence, lists: Sequence[Sequence[str]]) -> CandidateSets:
        """Validate candidate lists against the original tokens."""
        if len(lists) != len(x):
            raise ValueError(
                f"candidate lists cover {len(lists)} positions, input has {len(x)} tokens"
            )
        checked: list[tuple[str, ...]] = []
        for i, (original, raw) in enumerate(zip(x, lists)):
            cands = tuple(_check_word(c, f"candidate at position {i}") for c in raw)
            if len(set(cands)) != len(cands):
                raise ValueError(f"duplicate candidates at position {i}: {cands!r}")
            if original in cands:
                raise ValueError(
                    f"candidate at position {i} equals the original word {original!r}"
                )
            checked.append(cands)
        return cls(tuple(checked))

    def __len__(self) -> int:
        return len(self.per_position)

    def __getitem__(self, i: int) -> tuple[str, ...]:
        return self.per_position[i]

    def search_space_size(self) -> int:
        """Number of feasible solutions, the product of (|B_i| + 1)."""
        return math.prod(len(b) + 1 for b in self.per_position)


@dataclass(frozen=True)
class Solution:
    """A feasible subset: a partial map position -> substitute word.

    The choice tuple is kept sorted by position, which makes equality and
    hashing canonical; two solutions are equal iff their choice maps are.
    """

    choices: tuple[tuple[int, str], ...] = ()

    def __post_init__(self) -> None:
        positions = [pos for pos, _ in self.choices]
        if positions != sorted(set(positions)):
            raise ValueError("choices must be sorted by position and unique per position")

    @classmethod
    def empty(cls) -> Solution:
        return cls(())

    @classmethod
    def of(cls, mapping: Mapping[int, str]) -> Solution:
        return cls(tuple(sorted(mapping.items())))

    def __len__(self) -> int:
        return len(self.choices)

    @property
    def cardinality(self) -> int:
        return len(self.choices)

    def get(self, position: int) -> str | None:
        for pos, word in self.choices:
            if pos == position:
                return word
        return None

    def positions(self) -> tuple[int, ...]:
        return tuple(pos for pos, _ in self.choices)

    def as_dict(self) -> dict[int, str]:
        return dict(self.choices)

    def with_choice(self, position: int, word: str) -> Solution:
        """New solution with the choice at `position` set to `word`."""
        kept = [(p, w) for p, w in self.choices if p != position]
        kept.append((position, word))
        return Solution(tuple(sorted(kept)))

    def without(self, position: int) -> Solution:
        """New solution with the choice at `position` dropped."""
        return Solution(tuple((p, w) for p, w in self.choices if p != position))

    def is_feasible(self, candidates: CandidateSets) -> bool:
        return all(
            0 <= pos < len(candidates) and word in candidates[pos]
            for pos, word in self.choices
        )


class VariationKind(Enum):
    INSERTION = "insertion"
    DELETION = "deletion"
    EXCHANGE = "exchange"


@dataclass(frozen=True)
class Variation:
    """One-word change: set an unmapped position, clear a mapped one, or swap
    a mapped position to a different candidate."""

    kind: VariationKind
    position: int
    word: str | None = None  # absent for deletion

    def apply(self, solution: Solution) -> Solution:
        current = solution.get(self.position)
        if self.kind is VariationKind.INSERTION:
            if current is not None or self.word is None:
                raise InfeasibleSolution(f"insertion needs an unmapped position, got {self!r}")
            return solution.with_choice(self.position, self.word)
        if self.kind is VariationKind.DELETION:
            if current is None:
                raise InfeasibleSolution(f"deletion needs a mapped position, got {self!r}")
            return solution.without(self.position)
        if current is None or self.word is None or self.word == current:
            raise InfeasibleSolution(
                f"exchange needs a mapped position and a different word, got {self!r}"
            )
        return solution.with_choice(self.position, self.word)


def apply_solution(x: TokenSequence, candidates: CandidateSets, solution: Solution) -> TokenSequence:
    """Perturbed text: token i replaced by the chosen substitute where mapped."""
    if len(candidates) != len(x):
        raise InfeasibleSolution(
            f"candidate sets cover {len(candidates)} positions, input has {len(x)}"
        )
    if not solution.is_feasible(candidates):
        raise InfeasibleSolution(f"solution {solution.choices!r} violates the candidate sets")
    tokens = list(x.tokens)
    for pos, word in solution.choices:
        tokens[pos] = word
    return TokenSequence(tuple(tokens))


def modification_rate(solution: Solution, n: int) -> float:
    """Fraction of input words replaced, |S| / n."""
    if n < 1:
        raise ValueError("input length must be at least 1")
    return len(solution) / n


def _insertion_moves(solution: Solution, candidates: CandidateSets) -> list[tuple[int, str]]:
    mapped = set(solution.positions())
    return [
        (pos, word)
        for pos in range(len(candidates))
        if pos not in mapped
        for word in candidates[pos]
    ]


def _exchange_moves(solution: Solution, candidates: CandidateSets) -> list[tuple[int, str]]:
    return [
        (pos, word)
        for pos, current in solution.choices
        for word in candidates[pos]
        if word != current
    ]


def sample_variation(
    solution: Solution, candidates: CandidateSets, rng: random.Random
) -> list[Solution]:
    """Up to three offspring, one per variation kind.

    Each offspring is drawn uniformly among that kind's valid moves; a kind
    with no valid move contributes nothing.  Offspring come in insertion,
    deletion, exchange order.
    """
    offspring: list[Solution] = []
    insertions = _insertion_moves(solution, candidates)
    if insertions:
        pos, word = rng.choice(insertions)
        offspring.append(solution.with_choice(pos, word))
    if solution.choices:
        offspring.append(solution.without(rng.choice(solution.positions())))
    exchanges = _exchange_moves(solution, candidates)
    if exchanges:
        pos, word = rng.choice(exchanges)
        offspring.append(solution.with_choice(pos, word))
    return offspring


def neighborhood_size(solution: Solution, candidates: CandidateSets) -> int:
    """Exact count of distinct one-variation neighbors."""
    mapped = set(solution.positions())
    insertions = sum(len(candidates[i]) for i in range(len(candidates)) if i not in mapped)
    exchanges = sum(len(candidates[i]) - 1 for i in mapped)
    return insertions + len(solution) + exchanges


def enumerate_neighbors(solution: Solution, candidates: CandidateSets) -> set[Solution]:
    """All distinct solutions reachable by one variation."""
    neighbors: set[Solution] = set()
    for pos, word in _insertion_moves(solution, candidates):
        neighbors.add(solution.with_choice(pos, word))
    for pos in solution.positions():
        neighbors.add(solution.without(pos))
    for pos, word in _exchange_moves(solution, candidates):
        neighbors.add(solution.with_choice(pos, word))
    return neighbors


@dataclass(frozen=True)
class AttackInstance:
    """One input to attack: tokens, its true (and correctly predicted) label,
    and the candidate substitutes per position."""

    x: TokenSequence
    label: int
    candidates: CandidateSets


def parse_instance(obj: object, where: str = "instance") -> AttackInstance:
    """Build an instance from a decoded JSON object.

    The expected shape is {"tokens": [...], "label": int, "candidates": [[...], ...]}
    with one candidate list per token.
    """
    if not isinstance(obj, dict):
        raise DatasetFormat(f"{where}: expected a JSON object, got {type(obj).__name__}")
    try:
        tokens = obj["tokens"]
        label = obj["label"]
        candidates = obj["candidates"]
    except KeyError as exc:
        raise DatasetFormat(f"{where}: missing key {exc.args[0]!r}") from None
    if not isinstance(tokens, list) or not isinstance(candidates, list):
        raise DatasetFormat(f"{where}: 'tokens' and 'candidates' must be lists")
    if not isinstance(label, int) or isinstance(label, bool) or label < 0:
        raise DatasetFormat(f"{where}: 'label' must be a non-negative integer")
    try:
        x = TokenSequence.from_words(tokens)
        sets = CandidateSets.for_tokens(x, candidates)
    except ValueError as exc:
        raise DatasetFormat(f"{where}: {exc}") from None
    return AttackInstance(x=x, label=label, candidates=sets)


def load_instance(path: str | Path) -> AttackInstance:
    """Read a single attack-instance JSON file (UTF-8)."""
    path = Path(path)
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise DatasetFormat(f"{path}: {exc}") from None
    return parse_instance(obj, where=str(path))
