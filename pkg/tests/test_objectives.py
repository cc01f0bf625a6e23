"""Objective evaluation in all four (goal, mode) quadrants, and the ordered
attack-progress value."""

from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hydratext import (
    AttackGoal,
    CandidateSets,
    EmbeddingSimilarity,
    EmbeddingTable,
    F1Value,
    LexiconClassifier,
    MissingProbabilities,
    Mode,
    ObjectiveVector,
    Prediction,
    Solution,
    TokenSequence,
    eval_f1,
    eval_objectives,
)


class TestAttackGoal:
    def test_untargeted_reached_by_any_other_label(self):
        goal = AttackGoal(1)
        assert not goal.is_targeted
        assert goal.reached_by(0) and goal.reached_by(2)
        assert not goal.reached_by(1)

    def test_targeted_reached_only_by_target(self):
        goal = AttackGoal(0, target_label=2)
        assert goal.is_targeted
        assert goal.reached_by(2)
        assert not goal.reached_by(0) and not goal.reached_by(1)

    def test_target_must_differ(self):
        with pytest.raises(ValueError):
            AttackGoal(1, target_label=1)


class TestF1Value:
    def test_success_is_strictly_greatest(self):
        assert F1Value.success() > F1Value.real(0.99)
        assert F1Value.success() > F1Value.real(1.0)
        assert F1Value.success() > F1Value.real(math.inf)
        assert F1Value.success() == F1Value.success()
        assert not F1Value.success() > F1Value.success()

    def test_real_values_order_numerically(self):
        assert F1Value.real(0.1) < F1Value.real(0.2)
        assert F1Value.real(0.2) == F1Value.real(0.2)
        assert F1Value.real(3.0) >= F1Value.real(3.0)

    @given(
        a=st.one_of(st.none(), st.floats(allow_nan=False, width=32)),
        b=st.one_of(st.none(), st.floats(allow_nan=False, width=32)),
        c=st.one_of(st.none(), st.floats(allow_nan=False, width=32)),
    )
    @settings(max_examples=300)
    def test_total_order_properties(self, a, b, c):
        va, vb, vc = F1Value(a), F1Value(b), F1Value(c)
        # exactly one of <, ==, > holds
        assert sum([va < vb, va == vb, va > vb]) == 1
        # antisymmetry and transitivity
        if va <= vb and vb <= va:
            assert va == vb
        if va <= vb and vb <= vc:
            assert va <= vc

    def test_json_value(self):
        assert F1Value.success().json_value() == "success"
        assert F1Value.real(0.25).json_value() == 0.25


class TestEvalF1:
    def test_untargeted_score_unsuccessful(self):
        goal = AttackGoal(0)
        got = eval_f1(goal, Mode.SCORE, Prediction(0, (0.9, 0.1)), 2)
        assert got == F1Value.real(1.0 - 0.9)

    def test_untargeted_score_success(self):
        goal = AttackGoal(0)
        assert eval_f1(goal, Mode.SCORE, Prediction(1, (0.2, 0.8)), 1).is_success

    def test_untargeted_decision_unsuccessful_is_cardinality(self):
        goal = AttackGoal(0)
        assert eval_f1(goal, Mode.DECISION, Prediction(0), 3) == F1Value.real(3.0)

    def test_untargeted_decision_success(self):
        assert eval_f1(AttackGoal(0), Mode.DECISION, Prediction(1), 3).is_success

    def test_targeted_score_unsuccessful_is_target_probability(self):
        goal = AttackGoal(0, target_label=2)
        got = eval_f1(goal, Mode.SCORE, Prediction(1, (0.3, 0.5, 0.2)), 1)
        assert got == F1Value.real(0.2)

    def test_targeted_score_success(self):
        goal = AttackGoal(0, target_label=2)
        assert eval_f1(goal, Mode.SCORE, Prediction(2, (0.1, 0.2, 0.7)), 1).is_success

    def test_targeted_decision(self):
        goal = AttackGoal(0, target_label=2)
        assert eval_f1(goal, Mode.DECISION, Prediction(1), 4) == F1Value.real(4.0)
        assert eval_f1(goal, Mode.DECISION, Prediction(2), 4).is_success

    def test_score_mode_requires_probabilities(self):
        with pytest.raises(MissingProbabilities):
            eval_f1(AttackGoal(0), Mode.SCORE, Prediction(0), 1)


class _CountingOracle(LexiconClassifier):
    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.calls = 0
        self.texts_seen = 0

    def classify(self, texts):
        self.calls += 1
        self.texts_seen += len(texts)
        return super().classify(texts)


class TestEvalObjectives:
    def test_empty_solution(self, toy_x, toy_candidates, toy_goal, toy_similarity):
        oracle = _CountingOracle({"good": 2.0, "movie": 0.5})
        vec = eval_objectives(
            toy_x, toy_candidates, Solution.empty(), toy_goal, oracle, toy_similarity
        )
        p1 = 1.0 / (1.0 + math.exp(-2.5))
        assert vec.f1 == F1Value.real(1.0 - p1)
        assert vec.f2 == 0
        assert vec.f3 == 1.0
        assert not vec.success

    def test_f2_is_negated_cardinality(self, toy_x, toy_candidates, toy_goal, toy_similarity):
        oracle = LexiconClassifier({"good": 5.0, "film": 1.0, "bad": 1.0})
        s = Solution.of({1: "film", 3: "bad"})
        vec = eval_objectives(toy_x, toy_candidates, s, toy_goal, oracle, toy_similarity)
        assert vec.f2 == -2

    def test_mean_pooled_cosine_example(self):
        # embedding table with good -> (1,0) and nice -> (0.8,0.6):
        # mean vectors are (0.25,0) and (0.2,0.15); cosine = 0.05/(0.25*0.25)
        x = TokenSequence.from_words("the movie is good".split())
        sets = CandidateSets.for_tokens(x, [[], [], [], ["nice"]])
        table = EmbeddingTable(2, {"good": (1.0, 0.0), "nice": (0.8, 0.6)})
        oracle = LexiconClassifier({"good": 1.0, "nice": 1.0})
        vec = eval_objectives(
            x, sets, Solution.of({3: "nice"}), AttackGoal(1), oracle, EmbeddingSimilarity(table)
        )
        assert vec.f3 == pytest.approx(0.8, abs=1e-12)

    def test_exactly_one_oracle_query_per_call(self, toy_x, toy_candidates, toy_goal, toy_similarity):
        oracle = _CountingOracle({"good": 2.0})
        for s in (Solution.empty(), Solution.of({1: "film"}), Solution.of({3: "bad"})):
            before = oracle.calls
            eval_objectives(toy_x, toy_candidates, s, toy_goal, oracle, toy_similarity)
            assert oracle.calls == before + 1
            assert oracle.texts_seen == oracle.calls  # batches of one

    def test_decision_mode_unsuccessful_f1_equals_minus_f2(
        self, toy_x, toy_candidates, toy_similarity
    ):
        # the weight sits on an unsubstitutable word, so no perturbation flips it
        oracle = LexiconClassifier(
            {"the": 9.0, "film": 0.1, "flick": 0.1, "bad": -0.1, "awful": -0.1},
            mode=Mode.DECISION,
        )
        goal = AttackGoal(1)
        for s in (
            Solution.empty(),
            Solution.of({1: "film"}),
            Solution.of({1: "flick", 3: "bad"}),
        ):
            vec = eval_objectives(toy_x, toy_candidates, s, goal, oracle, toy_similarity)
            assert not vec.success
            assert vec.f1 == F1Value.real(float(-vec.f2))

    def test_objective_vector_rejects_positive_f2(self):
        with pytest.raises(ValueError):
            ObjectiveVector(F1Value.real(0.5), 1, 0.0)
