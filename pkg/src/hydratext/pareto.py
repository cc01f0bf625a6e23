"""Dominance relations and the non-weakly-dominated population.

Weak domination compares f1 and f2 only; full domination adds strictness or,
for (f1, f2)-ties, a strict f3 advantage.  Because any two entries with equal
f2 weakly dominate one another, a non-weakly-dominated set holds at most one
entry per solution cardinality, so the population is stored as a map keyed by
|S|.  Sorting entries by descending f2 always yields strictly ascending f1,
and at most one entry can be successful: the f1 argmax.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .errors import EmptyPopulation
from .objectives import ObjectiveVector
from .space import Solution


def weakly_dominates(a: ObjectiveVector, b: ObjectiveVector) -> bool:
    """True iff a is at least as good as b on both f1 and f2 (f3 ignored)."""
    return a.f1 >= b.f1 and a.f2 >= b.f2


def dominates(a: ObjectiveVector, b: ObjectiveVector) -> bool:
    """True iff a weakly dominates b with a strict f1 or f2 advantage, or ties
    b exactly on (f1, f2) and wins on f3."""
    if weakly_dominates(a, b) and (a.f1 > b.f1 or a.f2 > b.f2):
        return True
    return a.f1 == b.f1 and a.f2 == b.f2 and a.f3 > b.f3


@dataclass(frozen=True)
class ScoredSolution:
    """A solution paired with its evaluated objectives."""

    solution: Solution
    objectives: ObjectiveVector

    def __post_init__(self) -> None:
        if self.objectives.f2 != -len(self.solution):
            raise ValueError(
                f"objectives carry f2={self.objectives.f2} for a solution of "
                f"cardinality {len(self.solution)}"
            )


class Population:
    """The archive of non-weakly-dominated solutions, one slot per cardinality.

    Owned by a single engine run; not meant for concurrent mutation.
    """

    def __init__(self) -> None:
        self._entries: dict[int, ScoredSolution] = {}

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self) -> Iterator[ScoredSolution]:
        return iter(self.entries())

    def entries(self) -> list[ScoredSolution]:
        """Entries in ascending cardinality order (descending f2)."""
        return [self._entries[card] for card in sorted(self._entries)]

    def insert_offspring(self, offspring: ScoredSolution) -> bool:
        """Archive update for one offspring.

        Rejected (and the population left unchanged) iff some entry dominates
        it; otherwise every entry it weakly dominates is dropped and the
        offspring takes the slot for its cardinality.  An offspring tying an
        incumbent exactly on all three objectives replaces it.
        """
        vec = offspring.objectives
        if any(dominates(entry.objectives, vec) for entry in self._entries.values()):
            return False
        dropped = [
            card
            for card, entry in self._entries.items()
            if weakly_dominates(vec, entry.objectives)
        ]
        for card in dropped:
            del self._entries[card]
        self._entries[len(offspring.solution)] = offspring
        return True

    def best_solution(self) -> ScoredSolution:
        """The unique entry with maximal f1 (equivalently minimal f2)."""
        if not self._entries:
            raise EmptyPopulation("population holds no solutions")
        return max(self._entries.values(), key=lambda entry: entry.objectives.f1)

    def check_invariants(self, n: int | None = None) -> None:
        """Raise AssertionError if any structural guarantee is broken.

        Intended for tests and debug builds; cost is quadratic in the
        population size.
        """
        for card, entry in self._entries.items():
            if card != len(entry.solution) or entry.objectives.f2 != -card:
                raise AssertionError(f"entry at slot {card} has inconsistent cardinality")
        if n is not None:
            if len(self._entries) > n + 1:
                raise AssertionError(f"population exceeds n+1 entries ({len(self._entries)} > {n + 1})")
            if any(card < 0 or card > n for card in self._entries):
                raise AssertionError("cardinality outside [0, n]")
        ordered = self.entries()  # descending f2
        for prev, nxt in zip(ordered, ordered[1:]):
            if not prev.objectives.f1 < nxt.objectives.f1:
                raise AssertionError("f1 is not strictly ascending along descending f2")
        successes = [e for e in ordered if e.objectives.success]
        if len(successes) > 1:
            raise AssertionError("more than one successful entry")
        if successes and successes[0] is not self.best_solution():
            raise AssertionError("the successful entry is not the f1 argmax")
        for i, a in enumerate(ordered):
            for j, b in enumerate(ordered):
                if i != j and weakly_dominates(a.objectives, b.objectives):
                    raise AssertionError("an entry weakly dominates another")

    def snapshot(self) -> list[dict[str, object]]:
        """JSON-ready view of the population, for debugging."""
        return [
            {
                "cardinality": len(entry.solution),
                "f1": entry.objectives.f1.json_value(),
                "f2": entry.objectives.f2,
                "f3": entry.objectives.f3,
                "success": entry.objectives.success,
                "choices": [[pos, word] for pos, word in entry.solution.choices],
            }
            for entry in self.entries()
        ]
