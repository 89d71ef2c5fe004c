"""One-step operators: worked examples, algebraic laws and oracle equivalence."""

from __future__ import annotations

import pytest
from hypothesis import given

from congame import (
    GameGraph,
    UnknownAction,
    UnknownState,
    a_set,
    afpre1,
    afpre_action_fixpoint,
    apre1,
    b_set,
    pre1,
)

from .conftest import games_with_subset
from .oracles import oracle_afpre1, oracle_apre1, oracle_pre1


def oracle_a_set(g, v, Y, gamma2):
    y, excused = frozenset(Y), frozenset(gamma2)
    return frozenset(
        a for a in g.p1_actions(v)
        if all(g.succ(v, a, b) in y
               for b in g.p2_actions(v) if b not in excused))


def oracle_b_set(g, v, X, gamma1):
    x, allowed = frozenset(X), frozenset(gamma1)
    return frozenset(
        b for b in g.p2_actions(v)
        if any(g.succ(v, a, b) in x for a in allowed))


class TestActionSets:
    def test_a_set_examples(self, buchi_game, cobuchi_game):
        assert a_set(buchi_game, "A", ["C"], ()) == {"a"}
        assert a_set(cobuchi_game, "S2", ["S0", "S1"], ()) == frozenset()
        assert a_set(cobuchi_game, "S2", ["S0", "S1"], ["e", "f"]) == {"a", "y"}

    def test_b_set_examples(self, buchi_game, cobuchi_game):
        assert b_set(buchi_game, "B", ["C"], ["a"]) == {"a", "b"}
        assert b_set(cobuchi_game, "S2", ["S0", "S1"], ["a", "y"]) == {"d"}
        assert b_set(cobuchi_game, "S2", ["S0", "S1"], ()) == frozenset()

    def test_validation(self, buchi_game):
        with pytest.raises(UnknownState):
            a_set(buchi_game, "Z", ["C"], ())
        with pytest.raises(UnknownState):
            a_set(buchi_game, "A", ["Z"], ())
        with pytest.raises(UnknownAction):
            a_set(buchi_game, "A", ["C"], ["z"])
        with pytest.raises(UnknownAction):
            b_set(buchi_game, "A", ["C"], ["z"])

    @given(games_with_subset(n_subsets=1))
    def test_a_set_matches_oracle(self, gs):
        g, y = gs
        for v in g.states:
            for k in range(len(g.p2_actions(v)) + 1):
                gamma2 = g.p2_actions(v)[:k]
                assert a_set(g, v, y, gamma2) == oracle_a_set(g, v, y, gamma2)

    @given(games_with_subset(n_subsets=1))
    def test_b_set_matches_oracle(self, gs):
        g, x = gs
        for v in g.states:
            for k in range(len(g.p1_actions(v)) + 1):
                gamma1 = g.p1_actions(v)[:k]
                assert b_set(g, v, x, gamma1) == oracle_b_set(g, v, x, gamma1)


class TestPredecessors:
    def test_pre1_examples(self, buchi_game, safety_game):
        assert pre1(buchi_game, ["C"]) == {"A", "B", "C"}
        assert pre1(buchi_game, ["A"]) == {"B"}
        assert pre1(buchi_game, []) == frozenset()
        assert pre1(safety_game, ["g"]) == {"g"}

    def test_apre1_examples(self, buchi_game, safety_game):
        v = frozenset(buchi_game.states)
        assert apre1(buchi_game, v, ["C"]) == {"A", "B", "C"}
        assert apre1(buchi_game, ["C"], ["C"]) == {"A", "B", "C"}
        assert apre1(safety_game, ["g", "t"], ["t"]) == {"g", "t"}
        assert apre1(safety_game, ["g"], ["g"]) == {"g"}

    @given(games_with_subset(n_subsets=1))
    def test_pre1_matches_oracle(self, gs):
        g, x = gs
        assert pre1(g, x) == oracle_pre1(g, x)

    @given(games_with_subset(n_subsets=2))
    def test_apre1_matches_oracle(self, gs):
        g, y, x = gs
        assert apre1(g, y, x) == oracle_apre1(g, y, x)

    @given(games_with_subset(n_subsets=1))
    def test_pre1_equals_apre1_diagonal(self, gs):
        g, x = gs
        assert pre1(g, x) == apre1(g, x, x)

    @given(games_with_subset(n_subsets=2))
    def test_apre1_within_pre1_of_y(self, gs):
        g, y, x = gs
        assert apre1(g, y, x) <= pre1(g, y)

    @given(games_with_subset(n_subsets=2))
    def test_pre1_monotone(self, gs):
        g, x, x2 = gs
        assert pre1(g, x & x2) <= pre1(g, x)


class TestAfpre:
    def test_fixpoint_example(self, cobuchi_game):
        g = cobuchi_game
        v_all = frozenset(g.states)
        x1 = frozenset({"S0", "S1", "S2", "S3"})
        fix = afpre_action_fixpoint(g, "S2", v_all, x1, x1)
        assert fix == {"a", "b", "x", "y"}

    def test_fixpoint_stays_in_z(self, cobuchi_game):
        g = cobuchi_game
        z = frozenset({"S0", "S1", "S2", "S3"})
        fix = afpre_action_fixpoint(g, "S2", z, z, frozenset({"S0", "S1"}))
        for a in fix:
            for b in g.p2_actions("S2"):
                assert g.succ("S2", a, b) in z

    def test_empty_z_kills_everything(self, buchi_game):
        assert afpre1(buchi_game, (), buchi_game.states, buchi_game.states) \
            == frozenset()
        assert afpre_action_fixpoint(buchi_game, "A", (), ["C"], ["C"]) \
            == frozenset()

    def test_full_arguments_allow_everything(self, buchi_game):
        v = frozenset(buchi_game.states)
        assert afpre1(buchi_game, v, v, v) == v

    @given(games_with_subset(n_subsets=3))
    def test_afpre1_matches_oracle(self, gs):
        g, z, y, x = gs
        assert afpre1(g, z, y, x) == oracle_afpre1(g, z, y, x)

    @given(games_with_subset(n_subsets=3))
    def test_afpre1_monotone_in_x(self, gs):
        g, z, y, x = gs
        assert afpre1(g, z, y, x & y) <= afpre1(g, z, y, x)

    @given(games_with_subset(n_subsets=3))
    def test_fixpoint_subset_of_stay_actions(self, gs):
        g, z, y, x = gs
        for v in g.states:
            fix = afpre_action_fixpoint(g, v, z, y, x)
            assert fix <= a_set(g, v, z, ())
