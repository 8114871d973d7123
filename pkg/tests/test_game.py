from fractions import Fraction
from itertools import combinations
import random

import pytest
from hypothesis import given, strategies as st

from ahg.errors import ContractError
from ahg.game import (
    ALL_MODELS,
    Aggregate,
    Coalition,
    CoalitionStructure,
    Preference,
    UtilityModel as M,
    UtilityValue,
    compare,
    friend_aggregate,
    make_game,
    move_to_empty,
    to_numeric,
    utility,
    valuation,
)

from conftest import A, B, C, D, E, random_graph

N = [A, B, C, D, E]
C4 = [A, B, C, D]


def test_valuation_examples(ex1):
    assert [valuation(ex1, i, N) for i in N] == [8, 14, 14, 14, 2]
    assert [valuation(ex1, i, C4) for i in C4] == [9, 15, 15, 9]
    assert valuation(ex1, E, [E]) == 0


def test_valuation_requires_membership(ex1):
    with pytest.raises(ContractError):
        valuation(ex1, E, C4)


def test_friend_aggregate_examples(ex1):
    assert friend_aggregate(ex1, D, N, "min") == 2
    assert friend_aggregate(ex1, B, N, Aggregate.AVG, with_self=True) == Fraction(25, 2)
    lonely = make_game(3)
    for agg in ("avg", "min"):
        assert friend_aggregate(lonely, 0, [0], agg) == 0


def test_utility_examples(ex1):
    assert utility(ex1, D, C4, M.MIN_AL) == UtilityValue(15, 9)
    assert utility(ex1, B, N, M.AVG_EQ) == UtilityValue(Fraction(25, 2), 0)
    assert utility(ex1, E, N, M.MIN_SF) == UtilityValue(2, 14)


def test_to_numeric():
    assert to_numeric(UtilityValue(15, 9), M.MIN_AL, 625) == 9384
    assert to_numeric(UtilityValue(Fraction(25, 2), 0), M.AVG_EQ, 10 ** 9) == Fraction(25, 2)
    assert to_numeric(UtilityValue(2, 14), M.MIN_SF, 625) == 1264


def test_compare_examples(ex1):
    assert compare(ex1, A, C4, N, M.MIN_EQ) is Preference.PREFERS_C
    assert compare(ex1, B, C4, N, M.AVG_EQ) is Preference.PREFERS_D
    for m in ALL_MODELS:
        assert compare(ex1, C, C4, C4, m) is Preference.INDIFFERENT
    with pytest.raises(ContractError):
        compare(ex1, E, C4, N, M.MIN_EQ)


def test_model_tags_roundtrip():
    assert {m.tag for m in ALL_MODELS} == {"avg-sf", "avg-eq", "avg-al", "min-sf", "min-eq", "min-al"}
    for m in ALL_MODELS:
        assert M.parse(m.tag) is m and M.parse(m.tag.upper()) is m
    with pytest.raises(ValueError):
        M.parse("sum-eq")


def test_move_to_empty_examples():
    gamma = CoalitionStructure.grand(5)
    assert move_to_empty(gamma, C4) == CoalitionStructure.of(5, [C4, [E]])
    gamma = CoalitionStructure.of(5, [[A, B], [C, D], [E]])
    assert move_to_empty(gamma, [C, D]) == gamma
    assert move_to_empty(gamma, [B, C]) == CoalitionStructure.of(5, [[B, C], [A], [D], [E]])
    with pytest.raises(ContractError):
        move_to_empty(gamma, [])


def test_structure_validation():
    with pytest.raises(ContractError, match="overlaps"):
        CoalitionStructure.of(3, [[0, 1], [1, 2]])
    with pytest.raises(ContractError, match="not covered"):
        CoalitionStructure.of(3, [[0, 1]])
    with pytest.raises(ContractError, match="empty"):
        CoalitionStructure.of(2, [[0, 1], []])


@st.composite
def structure_and_coalition(draw):
    n = draw(st.integers(1, 9))
    labels = draw(st.lists(st.integers(0, n - 1), min_size=n, max_size=n))
    groups = {}
    for i, lab in enumerate(labels):
        groups.setdefault(lab, []).append(i)
    members = draw(st.sets(st.integers(0, n - 1), min_size=1))
    return CoalitionStructure.of(n, groups.values()), Coalition.of(members)


@given(structure_and_coalition())
def test_move_to_empty_is_partition(args):
    gamma, c = args
    out = move_to_empty(gamma, c)
    assert c in out.blocks
    union = 0
    for b in out.blocks:
        assert b.mask and not union & b.mask
        union |= b.mask
    assert union == (1 << gamma.n) - 1
    for b in out.blocks:
        if b != c:
            assert any(b.mask == old.mask & ~c.mask for old in gamma.blocks)


def _counts(game, i, members):
    friends = sum(1 for j in members if game.graph.has_edge(i, j))
    enemies = len(members) - 1 - friends
    return friends, -enemies


def test_friend_oriented_order_exhaustive():
    rng = random.Random(3)
    for n in range(1, 7):
        for _ in range(4):
            game = make_game(n, random_graph(rng, n).edges)
            subsets = [s for r in range(1, n + 1) for s in combinations(range(n), r)]
            for i in range(n):
                mine = [s for s in subsets if i in s]
                for c in mine:
                    for d in mine:
                        lhs = valuation(game, i, c) > valuation(game, i, d)
                        assert lhs == (_counts(game, i, c) > _counts(game, i, d))


def test_eq_degeneracy_for_friendless_member():
    rng = random.Random(5)
    for _ in range(100):
        n = rng.randint(1, 7)
        game = make_game(n, random_graph(rng, n, 0.4).edges)
        members = [j for j in range(n) if rng.random() < 0.6] or [0]
        c = Coalition.of(members)
        for i in c:
            if game.friends[i] & c.mask == 0:
                v = valuation(game, i, c)
                assert utility(game, i, c, M.AVG_EQ).primary == v
                assert utility(game, i, c, M.MIN_EQ).primary == v
