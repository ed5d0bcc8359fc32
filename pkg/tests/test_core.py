import random
from fractions import Fraction

import pytest

from conftest import make_explicit, make_network, UNIT
from fillgames import (
    Arc,
    EnumerationOverflowError,
    ExplicitSpace,
    GameInstance,
    GeneratorParams,
    NetworkSpace,
    RateFunction,
    Resource,
    ValidationError,
    enumerate_strategies,
    generate,
    validate_instance,
)
from oracles import count_paths


def test_minimal_wellformed_instance():
    inst = make_explicit(2, [10], [[[0]], [[0]]])
    assert inst.num_players == 2
    assert inst.capacities == (Fraction(10),)


def test_negative_capacity_reported_with_resource_id():
    with pytest.raises(ValidationError) as err:
        make_explicit(2, [-1], [[[0]], [[0]]])
    assert "negative capacity at resource 0" in str(err.value)


def test_unreachable_sink_is_an_empty_strategy_set():
    # player 1's sink 2 has no incoming arcs
    with pytest.raises(ValidationError) as err:
        make_network(2, [(0, 1)], [1], [(0, 1), (0, 2)])
    assert "player 1: empty strategy set" in str(err.value)


def test_validation_collects_every_violation():
    bad = GameInstance(
        num_players=2,
        resources=(Resource(0, Fraction(-2)), Resource(2, Fraction(1))),
        space=ExplicitSpace((((0,),), ())),
        rates=(RateFunction.from_pairs([(0, 1)]), RateFunction.from_pairs([(0, 0)])),
    )
    with pytest.raises(ValidationError) as err:
        validate_instance(bad)
    text = str(err.value)
    assert "negative capacity at resource 0" in text
    assert "dense" in text
    assert "player 1: empty strategy set" in text
    assert "final rate must be positive" in text


def test_monotone_flag_contradiction():
    rate = RateFunction(pieces=((Fraction(0), Fraction(-1)), (Fraction(1), Fraction(1))), monotone=True)
    with pytest.raises(ValidationError) as err:
        make_explicit(1, [1], [[[0]]], rates=[rate])
    assert "monotone_flag contradiction" in str(err.value)


def test_nonmonotone_integral_must_stay_nonnegative():
    rate = RateFunction(pieces=((Fraction(0), Fraction(-1)), (Fraction(1), Fraction(2))), monotone=False)
    with pytest.raises(ValidationError) as err:
        make_explicit(1, [1], [[[0]]], rates=[rate])
    assert "drops below 0" in str(err.value)


def test_duplicate_and_empty_strategies_rejected():
    with pytest.raises(ValidationError) as err:
        make_explicit(1, [1, 1], [[[0], [0]]])
    assert "duplicate strategy" in str(err.value)
    with pytest.raises(ValidationError) as err:
        make_explicit(1, [1], [[[]]])
    assert "empty strategy" in str(err.value)


def test_enumerate_parallel_and_diamond():
    inst = make_network(1, [(0, 1), (0, 1)], [1, 1], [(0, 1)])
    assert enumerate_strategies(inst, 0) == ((0,), (1,))
    diamond = make_network(
        1, [("s", "a"), ("a", "t"), ("s", "b"), ("b", "t")], [1, 1, 1, 1], [("s", "t")]
    )
    assert enumerate_strategies(diamond, 0) == ((0, 1), (2, 3))


def test_enumerate_k_spoa_gadget_count_matches_dfs_oracle():
    built = generate(GeneratorParams(family="c", n=4, k=2))
    space = built.instance.space
    strategies = enumerate_strategies(built.instance, 0)
    arc_list = [(a.tail, a.head) for a in space.arcs]
    assert len(strategies) == count_paths(arc_list, *space.endpoints[0]) == 108


def test_enumeration_exactly_once_against_membership():
    rng = random.Random(42)
    for _ in range(30):
        nodes = rng.randint(3, 5)
        arcs = [(j, j + 1) for j in range(nodes - 1)]
        while len(arcs) < min(10, rng.randint(3, 10)):
            tail = rng.randint(0, nodes - 2)
            arcs.append((tail, rng.randint(tail + 1, nodes - 1)))
        inst = make_network(1, arcs, [1] * len(arcs), [(0, nodes - 1)])
        listed = enumerate_strategies(inst, 0)
        assert len(set(listed)) == len(listed)
        assert len(listed) == count_paths(arcs, 0, nodes - 1)
        for strat in listed:
            assert inst.space.is_valid_strategy(0, strat)
        # every member appears exactly once: count valid subsets exhaustively
        all_subsets_found = sum(
            1
            for mask in range(1, 2 ** len(arcs))
            if inst.space.is_valid_strategy(
                0, tuple(i for i in range(len(arcs)) if mask >> i & 1)
            )
        )
        assert all_subsets_found == len(listed)


def test_enumeration_overflow_reports_limit_and_lower_bound():
    built = generate(GeneratorParams(family="c", n=4, k=2))
    with pytest.raises(EnumerationOverflowError) as err:
        enumerate_strategies(built.instance, 0, limit=10)
    assert err.value.limit == 10
    assert err.value.at_least >= 11


def test_network_strategy_membership_rejects_non_paths():
    diamond = make_network(
        1, [("s", "a"), ("a", "t"), ("s", "b"), ("b", "t")], [1, 1, 1, 1], [("s", "t")]
    )
    space = diamond.space
    assert not space.is_valid_strategy(0, (0,))  # stops short of the sink
    assert not space.is_valid_strategy(0, (0, 3))  # disconnected pair
    assert not space.is_valid_strategy(0, (0, 1, 2, 3))  # two outgoing arcs at s
    assert space.is_valid_strategy(0, (0, 1))
