"""The attack loop and its verification companions.

Each generation draws a uniform-random parent from the population, produces
up to three offspring (insertion, deletion, exchange), evaluates them through
a query archive so duplicates never hit the oracle, and folds them into the
non-weakly-dominated population.  The run stops at the generation cap, when
the query budget is spent, or once every one-variation neighbor of the
incumbent best solution has been visited, which certifies it as a local
optimum on attack progress.

Also here: an exhaustive enumerator used as an independent reference at desk
scale, and diagnostic probes for monotonicity and submodularity of arbitrary
set functions.
"""

from __future__ import annotations

import io
import itertools
import json
import random
from dataclasses import dataclass
from enum import Enum
from typing import Callable

from .errors import (
    GroundSetTooLarge,
    InvalidLabel,
    OriginalMisclassified,
    SearchSpaceTooLarge,
)
from .objectives import (
    AttackGoal,
    F1Value,
    Mode,
    ObjectiveVector,
    SimilarityProvider,
    VictimOracle,
    eval_f1,
)
from .pareto import Population, ScoredSolution
from .space import (
    CandidateSets,
    Solution,
    TokenSequence,
    apply_solution,
    neighborhood_size,
    sample_variation,
)


@dataclass(frozen=True)
class EngineConfig:
    """Knobs for one attack run.

    The defaults pair a generation cap of 2000 with a query budget of 6000,
    i.e. budget = 3 * generations, three offspring per generation.
    """

    max_generations: int = 2000
    max_queries: int = 6000
    rng_seed: int = 0
    mode: Mode = Mode.SCORE
    targeted: bool = False
    log_trajectory: bool = False

    def __post_init__(self) -> None:
        if self.max_generations < 1:
            raise ValueError("max_generations must be at least 1")
        if self.max_queries < 1:
            raise ValueError("max_queries must be at least 1")


class QueryArchive:
    """Cache of every solution ever evaluated.

    oracle_queries counts distinct solutions sent to the oracle; re-meeting
    an archived solution bumps cache_hits only.
    """

    def __init__(self) -> None:
        self._seen: dict[Solution, ObjectiveVector] = {}
        self.oracle_queries = 0
        self.cache_hits = 0

    def __len__(self) -> int:
        return len(self._seen)

    def __contains__(self, solution: Solution) -> bool:
        return solution in self._seen

    def lookup(self, solution: Solution) -> ObjectiveVector | None:
        """Archived vector for a re-encountered solution; counts a cache hit."""
        vec = self._seen.get(solution)
        if vec is not None:
            self.cache_hits += 1
        return vec

    def store(self, solution: Solution, vec: ObjectiveVector) -> None:
        """Record one fresh oracle evaluation."""
        if solution in self._seen:
            raise ValueError("solution already archived; lookup it instead")
        self._seen[solution] = vec
        self.oracle_queries += 1


class VisitedNeighborhood:
    """Which one-variation neighbors of the incumbent best solution have been
    evaluated.  Rebuilt from scratch whenever the incumbent changes."""

    def __init__(self, anchor: Solution, candidates: CandidateSets) -> None:
        self.anchor = anchor
        self.total = neighborhood_size(anchor, candidates)
        self._visited: set[Solution] = set()

    @staticmethod
    def _is_neighbor(anchor: Solution, other: Solution) -> bool:
        a, b = anchor.as_dict(), other.as_dict()
        differing = sum(1 for pos in a.keys() | b.keys() if a.get(pos) != b.get(pos))
        return differing == 1

    def mark(self, solution: Solution) -> None:
        if self._is_neighbor(self.anchor, solution):
            self._visited.add(solution)

    @property
    def visited_count(self) -> int:
        return len(self._visited)

    @property
    def exhausted(self) -> bool:
        return len(self._visited) >= self.total


class TerminationReason(Enum):
    BUDGET_EXHAUSTED = "budget_exhausted"
    GENERATION_CAP = "generation_cap"
    NEIGHBORHOOD_EXHAUSTED = "neighborhood_exhausted"


@dataclass(frozen=True)
class TrajectoryPoint:
    generation: int
    pop_size: int
    f1: F1Value
    f2: int
    f3: float
    queries: int


@dataclass(frozen=True)
class AttackResult:
    """Outcome of one run: the returned solution (successful or the best
    failure), full query accounting, and why the loop stopped."""

    success: bool
    solution: Solution
    objectives: ObjectiveVector
    oracle_queries: int
    cache_hits: int
    generations: int
    termination_reason: TerminationReason
    trajectory: tuple[TrajectoryPoint, ...] | None = None

    def to_json_dict(self) -> dict[str, object]:
        return {
            "success": self.success,
            "choices": [[pos, word] for pos, word in self.solution.choices],
            "cardinality": len(self.solution),
            "f1": self.objectives.f1.json_value(),
            "f2": self.objectives.f2,
            "f3": self.objectives.f3,
            "oracle_queries": self.oracle_queries,
            "cache_hits": self.cache_hits,
            "generations": self.generations,
            "termination_reason": self.termination_reason.value,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)

    def trajectory_csv(self) -> str:
        """Per-generation log as CSV with header generation,pop_size,f1,f2,f3,queries."""
        if self.trajectory is None:
            raise ValueError("run was executed with trajectory logging disabled")
        out = io.StringIO()
        out.write("generation,pop_size,f1,f2,f3,queries\n")
        for p in self.trajectory:
            out.write(f"{p.generation},{p.pop_size},{p.f1.json_value()},{p.f2},{p.f3},{p.queries}\n")
        return out.getvalue()


def _validate_setup(
    x: TokenSequence,
    candidates: CandidateSets,
    goal: AttackGoal,
    oracle: VictimOracle,
    config: EngineConfig,
) -> None:
    if len(candidates) != len(x):
        raise ValueError("candidate sets do not match the input length")
    if oracle.mode is not config.mode:
        raise ValueError(f"oracle is {oracle.mode.value}-mode but config says {config.mode.value}")
    if goal.is_targeted != config.targeted:
        raise ValueError("goal kind does not match config.targeted")
    for label in (goal.original_label, goal.target_label):
        if label is not None and not 0 <= label < oracle.num_classes:
            raise InvalidLabel(f"label {label} outside [0, {oracle.num_classes})")


def run_attack(
    x: TokenSequence,
    candidates: CandidateSets,
    goal: AttackGoal,
    oracle: VictimOracle,
    sim: SimilarityProvider,
    config: EngineConfig,
) -> AttackResult:
    """Run one attack.

    The first query checks that the oracle assigns the expected original
    label (raising OriginalMisclassified otherwise) and doubles as the
    evaluation of the empty solution; it counts against the budget.  With a
    fixed seed and a deterministic oracle the whole trajectory, including all
    counters, is reproducible bit for bit.
    """
    _validate_setup(x, candidates, goal, oracle, config)
    rng = random.Random(config.rng_seed)
    archive = QueryArchive()

    reply = oracle.classify([x])[0]
    if reply.label != goal.original_label:
        raise OriginalMisclassified(
            f"oracle predicts {reply.label}, expected {goal.original_label}"
        )
    empty = Solution.empty()
    base_vec = ObjectiveVector(
        f1=eval_f1(goal, config.mode, reply, 0), f2=0, f3=sim.similarity(x, x)
    )
    archive.store(empty, base_vec)

    population = Population()
    population.insert_offspring(ScoredSolution(empty, base_vec))
    best = population.best_solution()
    visited = VisitedNeighborhood(best.solution, candidates)
    trajectory: list[TrajectoryPoint] | None = [] if config.log_trajectory else None

    reason = TerminationReason.GENERATION_CAP
    t = 0
    while t < config.max_generations:
        parent = rng.choice(population.entries())
        offspring = sample_variation(parent.solution, candidates, rng)

        # Plan the generation: cached offspring are free, fresh ones must fit
        # the remaining budget.  The first one that does not fit cuts the
        # generation short (everything after it is dropped).
        planned: list[tuple[Solution, bool]] = []
        misses: list[Solution] = []
        budget_hit = False
        for child in offspring:
            if child in archive:
                planned.append((child, True))
            elif archive.oracle_queries + len(misses) < config.max_queries:
                planned.append((child, False))
                misses.append(child)
            else:
                budget_hit = True
                break

        fresh: dict[Solution, ObjectiveVector] = {}
        if misses:
            texts = [apply_solution(x, candidates, child) for child in misses]
            replies = oracle.classify(texts)  # one request per generation
            for child, adv, rep in zip(misses, texts, replies, strict=True):
                vec = ObjectiveVector(
                    f1=eval_f1(goal, config.mode, rep, len(child)),
                    f2=-len(child),
                    f3=sim.similarity(adv, x),
                )
                archive.store(child, vec)
                fresh[child] = vec

        for child, cached in planned:
            vec = archive.lookup(child) if cached else fresh[child]
            assert vec is not None
            population.insert_offspring(ScoredSolution(child, vec))
            visited.mark(child)

        best = population.best_solution()
        if best.solution != visited.anchor:
            visited = VisitedNeighborhood(best.solution, candidates)
        if __debug__:
            population.check_invariants(n=len(x))
        if trajectory is not None:
            trajectory.append(
                TrajectoryPoint(
                    generation=t + 1,
                    pop_size=len(population),
                    f1=best.objectives.f1,
                    f2=best.objectives.f2,
                    f3=best.objectives.f3,
                    queries=archive.oracle_queries,
                )
            )
        if budget_hit:
            reason = TerminationReason.BUDGET_EXHAUSTED
            break
        if visited.exhausted:
            reason = TerminationReason.NEIGHBORHOOD_EXHAUSTED
            break
        t += 1

    return AttackResult(
        success=best.objectives.success,
        solution=best.solution,
        objectives=best.objectives,
        oracle_queries=archive.oracle_queries,
        cache_hits=archive.cache_hits,
        generations=t,
        termination_reason=reason,
        trajectory=tuple(trajectory) if trajectory is not None else None,
    )


@dataclass(frozen=True)
class ExhaustiveReference:
    """Ground truth for a small instance: the exact non-weakly-dominated set
    (ascending cardinality) and, if any solution succeeds, the successful one
    of minimal cardinality (highest f3 among those)."""

    front: tuple[ScoredSolution, ...]
    minimal_success: ScoredSolution | None
    evaluated: int


_ENUMERATION_LIMIT = 10**6
_BATCH = 512


def exhaustive_reference(
    x: TokenSequence,
    candidates: CandidateSets,
    goal: AttackGoal,
    oracle: VictimOracle,
    sim: SimilarityProvider,
    limit: int = _ENUMERATION_LIMIT,
) -> ExhaustiveReference:
    """Evaluate every feasible solution and reduce exactly.

    Within one cardinality only the lexicographically best (f1, f3) survives;
    across cardinalities a survivor must strictly improve f1 over every
    smaller one.  Ties keep the first solution in enumeration order.
    """
    size = candidates.search_space_size()
    if size > limit:
        raise SearchSpaceTooLarge(f"{size} feasible solutions exceed the limit of {limit}")

    options: list[list[tuple[int, str] | None]] = [
        [None] + [(pos, word) for word in candidates[pos]] for pos in range(len(candidates))
    ]
    best_per_card: dict[int, ScoredSolution] = {}
    evaluated = 0

    def consider(entry: ScoredSolution) -> None:
        card = len(entry.solution)
        incumbent = best_per_card.get(card)
        if incumbent is None:
            best_per_card[card] = entry
            return
        new_key = (entry.objectives.f1, entry.objectives.f3)
        old_key = (incumbent.objectives.f1, incumbent.objectives.f3)
        if new_key > old_key:  # strict improvement only: first encountered wins ties
            best_per_card[card] = entry

    combos = itertools.product(*options)
    while True:
        chunk = list(itertools.islice(combos, _BATCH))
        if not chunk:
            break
        solutions = [
            Solution(tuple(choice for choice in combo if choice is not None))
            for combo in chunk
        ]
        texts = [apply_solution(x, candidates, s) for s in solutions]
        replies = oracle.classify(texts)
        for solution, adv, rep in zip(solutions, texts, replies, strict=True):
            vec = ObjectiveVector(
                f1=eval_f1(goal, oracle.mode, rep, len(solution)),
                f2=-len(solution),
                f3=sim.similarity(adv, x),
            )
            consider(ScoredSolution(solution, vec))
            evaluated += 1

    front: list[ScoredSolution] = []
    for card in sorted(best_per_card):
        entry = best_per_card[card]
        if not front or entry.objectives.f1 > front[-1].objectives.f1:
            front.append(entry)

    reference = Population()
    for entry in front:
        reference.insert_offspring(entry)
    reference.check_invariants(n=len(x))

    minimal_success = next((e for e in front if e.objectives.success), None)
    return ExhaustiveReference(
        front=tuple(front), minimal_success=minimal_success, evaluated=evaluated
    )


# --- set-function probes ----------------------------------------------------

_GROUND_CAP = 12

SetFunction = Callable[[frozenset[int]], float]


def _tabulate(f: SetFunction, ground_size: int) -> list[float]:
    if not 0 <= ground_size <= _GROUND_CAP:
        raise GroundSetTooLarge(f"ground size {ground_size} exceeds the cap of {_GROUND_CAP}")
    return [
        float(f(frozenset(i for i in range(ground_size) if mask >> i & 1)))
        for mask in range(1 << ground_size)
    ]


def _mask_set(mask: int, ground_size: int) -> frozenset[int]:
    return frozenset(i for i in range(ground_size) if mask >> i & 1)


def _proper_submasks(mask: int):
    sub = (mask - 1) & mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def probe_monotonicity(f: SetFunction, ground_size: int) -> list[tuple[frozenset[int], frozenset[int]]]:
    """All pairs X subset-of Y with f(X) > f(Y); empty iff f is monotone here.

    A subset-max sweep first flags supersets that can violate at all, so the
    expensive pair enumeration only happens where violations exist.
    """
    table = _tabulate(f, ground_size)
    submax = list(table)
    for b in range(ground_size):
        bit = 1 << b
        for mask in range(1 << ground_size):
            if mask & bit and submax[mask ^ bit] > submax[mask]:
                submax[mask] = submax[mask ^ bit]
    violations: list[tuple[frozenset[int], frozenset[int]]] = []
    for sup in range(1 << ground_size):
        if submax[sup] > table[sup]:
            for sub in _proper_submasks(sup):
                if table[sub] > table[sup]:
                    violations.append((_mask_set(sub, ground_size), _mask_set(sup, ground_size)))
    return violations


def probe_submodularity(
    f: SetFunction, ground_size: int
) -> list[tuple[frozenset[int], frozenset[int], int]]:
    """All triples (S1 subset-of S2, e outside S2) where adding e gains more
    on the larger set; empty iff f is submodular here."""
    table = _tabulate(f, ground_size)
    size = 1 << ground_size
    violations: list[tuple[frozenset[int], frozenset[int], int]] = []
    for e in range(ground_size):
        bit = 1 << e
        gain = [0.0] * size
        for mask in range(size):
            if not mask & bit:
                gain[mask] = table[mask | bit] - table[mask]
        # minimum gain over all subsets, computed only on masks avoiding e
        submin = list(gain)
        for b in range(ground_size):
            if b == e:
                continue
            other = 1 << b
            for mask in range(size):
                if mask & bit or not mask & other:
                    continue
                if submin[mask ^ other] < submin[mask]:
                    submin[mask] = submin[mask ^ other]
        for sup in range(size):
            if sup & bit or submin[sup] >= gain[sup]:
                continue
            for sub in _proper_submasks(sup):
                if gain[sub] < gain[sup]:
                    violations.append(
                        (_mask_set(sub, ground_size), _mask_set(sup, ground_size), e)
                    )
    return violations


def lexicon_f1_function(
    x: TokenSequence,
    candidates: CandidateSets,
    goal: AttackGoal,
    oracle: VictimOracle,
) -> tuple[SetFunction, tuple[tuple[int, str], ...]]:
    """Attack progress as a plain set function, for probing.

    Ground items are the candidate substitutions in position order.  Every
    position may carry at most one candidate so that all subsets of the
    ground set are feasible; successful subsets score 1.0.
    """
    if oracle.mode is not Mode.SCORE:
        raise ValueError("probing expects a score-mode oracle")
    if any(len(candidates[i]) > 1 for i in range(len(candidates))):
        raise ValueError("probing needs at most one candidate per position")
    ground = tuple(
        (pos, candidates[pos][0]) for pos in range(len(candidates)) if candidates[pos]
    )

    def f(subset: frozenset[int]) -> float:
        solution = Solution.of({ground[i][0]: ground[i][1] for i in subset})
        adv = apply_solution(x, candidates, solution)
        value = eval_f1(goal, Mode.SCORE, oracle.classify([adv])[0], len(solution))
        return 1.0 if value.is_success else value.value  # type: ignore[return-value]

    return f, ground
