"""Attack objectives over pluggable victim-oracle and similarity interfaces.

Three values are attached to every candidate solution: attack progress (f1),
the negated substitution count (f2), and semantic similarity to the original
input (f3).  f1 carries a Success sentinel that compares above every real
value, so score-based and decision-based attacks share one ordering.
"""

from __future__ import annotations

import functools
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .errors import MissingProbabilities
from .space import CandidateSets, Solution, TokenSequence, apply_solution


class Mode(Enum):
    """What the victim model reveals per query: the full probability vector
    (score) or only the top label (decision)."""

    SCORE = "score"
    DECISION = "decision"


@dataclass(frozen=True)
class Prediction:
    """One oracle verdict: the top label, plus the probability vector in
    score mode (absent in decision mode)."""

    label: int
    probs: tuple[float, ...] | None = None


class VictimOracle(ABC):
    """Black-box victim model queried in batches."""

    mode: Mode
    num_classes: int

    @abstractmethod
    def classify(self, texts: Sequence[TokenSequence]) -> list[Prediction]:
        """Classify a batch, preserving order and cardinality."""


class SimilarityProvider(ABC):
    """Semantic similarity between two token sequences, in [-1, 1].

    Providers must be symmetric, map identical sequences to 1.0, and never
    touch the victim oracle (similarity costs no model queries).
    """

    @abstractmethod
    def similarity(self, a: TokenSequence, b: TokenSequence) -> float:
        ...


@dataclass(frozen=True)
class AttackGoal:
    """Untargeted (flip away from the original label) or targeted (reach one
    specific wrong label)."""

    original_label: int
    target_label: int | None = None

    def __post_init__(self) -> None:
        if self.original_label < 0:
            raise ValueError("labels are non-negative")
        if self.target_label is not None:
            if self.target_label < 0:
                raise ValueError("labels are non-negative")
            if self.target_label == self.original_label:
                raise ValueError("target label must differ from the original label")

    @property
    def is_targeted(self) -> bool:
        return self.target_label is not None

    def reached_by(self, predicted: int) -> bool:
        if self.target_label is not None:
            return predicted == self.target_label
        return predicted != self.original_label


@functools.total_ordering
@dataclass(frozen=True)
class F1Value:
    """Attack-progress value with a maximal Success sentinel.

    All successful solutions are equally good: Success == Success, and
    Success > Real(v) for every v.  Real values compare numerically.
    """

    value: float | None = None  # None encodes Success

    @classmethod
    def success(cls) -> F1Value:
        return cls(None)

    @classmethod
    def real(cls, value: float) -> F1Value:
        return cls(float(value))

    @property
    def is_success(self) -> bool:
        return self.value is None

    def __lt__(self, other: object) -> bool:
        if not isinstance(other, F1Value):
            return NotImplemented
        if self.is_success:
            return False
        if other.is_success:
            return True
        return self.value < other.value  # type: ignore[operator]

    def json_value(self) -> float | str:
        return "success" if self.value is None else self.value

    def __repr__(self) -> str:
        return "F1Value.success()" if self.is_success else f"F1Value.real({self.value!r})"


@dataclass(frozen=True)
class ObjectiveVector:
    """(f1, f2, f3) for one solution; f2 is exactly -|S|."""

    f1: F1Value
    f2: int
    f3: float

    def __post_init__(self) -> None:
        if self.f2 > 0:
            raise ValueError("f2 is the negated substitution count and cannot be positive")

    @property
    def success(self) -> bool:
        return self.f1.is_success


def eval_f1(goal: AttackGoal, mode: Mode, reply: Prediction, cardinality: int) -> F1Value:
    """Attack progress of one oracle reply.

    Success when the goal is reached.  Otherwise: score mode reports how close
    the prediction is to flipping (1 - P[original] untargeted, P[target]
    targeted); decision mode falls back to the substitution count, which
    separates unsuccessful solutions by how far they have wandered.
    """
    if goal.reached_by(reply.label):
        return F1Value.success()
    if mode is Mode.DECISION:
        return F1Value.real(float(cardinality))
    if reply.probs is None:
        raise MissingProbabilities("score mode requires a probability vector")
    if goal.target_label is not None:
        return F1Value.real(reply.probs[goal.target_label])
    return F1Value.real(1.0 - reply.probs[goal.original_label])


def eval_objectives(
    x: TokenSequence,
    candidates: CandidateSets,
    solution: Solution,
    goal: AttackGoal,
    oracle: VictimOracle,
    sim: SimilarityProvider,
) -> ObjectiveVector:
    """Full objective vector for one solution; issues exactly one oracle query."""
    x_adv = apply_solution(x, candidates, solution)
    reply = oracle.classify([x_adv])[0]
    f1 = eval_f1(goal, oracle.mode, reply, len(solution))
    return ObjectiveVector(f1=f1, f2=-len(solution), f3=sim.similarity(x_adv, x))
