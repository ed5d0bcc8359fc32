import random
from fractions import Fraction
from itertools import product

import pytest

from conftest import make_explicit, make_network, UNIT
from fillgames import (
    BudgetExceededError,
    GeneratorParams,
    RateFunction,
    StepLimitError,
    best_response,
    find_pne_brute,
    generate,
    improvement_dynamics,
    is_nash,
    is_strong_equilibrium,
    potential_vector,
    progressive_fill,
    single_resource_bandwidth,
)
from oracles import exhaustive_best_response
from suites import monotone_suite, random_explicit

F = Fraction


def singleton_game():
    return make_explicit(3, [F(9, 10), F(9, 10), 3], [[[0], [1], [2]]] * 3)


def test_single_resource_bandwidth_examples():
    solo = make_explicit(1, [7], [[[0]]])
    assert single_resource_bandwidth(solo, ((0,),), 0, 0) == F(7)
    inst = singleton_game()
    assert single_resource_bandwidth(inst, ((0,), (2,), (2,)), 0, 2) == F(1)
    weighted = make_explicit(
        2, [8], [[[0]]] * 2, rates=[UNIT, RateFunction.constant(3)]
    )
    assert single_resource_bandwidth(weighted, ((0,), (0,)), 0, 0) == F(2)


def test_best_response_examples():
    inst = singleton_game()
    strategy, value = best_response(inst, ((0,), (2,), (2,)), 0)
    assert strategy == (2,) and value == F(1)

    solo = make_network(1, [(0, 1), (0, 1)], [2, 5], [(0, 1)])
    assert best_response(solo, ((0,),), 0) == ((1,), F(5))

    diamond = make_network(
        1,
        [("s", "a"), ("a", "t"), ("s", "b"), ("b", "t")],
        [3, 1, 2, 2],
        [("s", "t")],
    )
    strategy, value = best_response(diamond, ((0, 1),), 0)
    assert strategy == (2, 3) and value == F(2)
    assert exhaustive_best_response(diamond, ((0, 1),), 0)[1] == value


def test_best_response_matches_exhaustive_scan():
    rng = random.Random(31)
    for _ in range(80):
        kind = rng.choice(["constant", "monotone", "uniform"])
        inst = random_explicit(rng, rate_kind=kind)
        state = tuple(rng.choice(lst) for lst in inst.strategy_lists)
        for player in range(inst.num_players):
            strategy, value = best_response(inst, state, player)
            oracle_strategy, oracle_value = exhaustive_best_response(inst, state, player)
            assert value == oracle_value
            probe = state[:player] + (strategy,) + state[player + 1 :]
            achieved = progressive_fill(inst, probe).bandwidths[player]
            assert achieved == value


def test_is_nash_on_the_multicommodity_construction():
    built = generate(GeneratorParams(family="a", n=4))
    ok, witness = is_nash(built.instance, built.states["unique_pne"])
    assert ok and witness is None


def test_is_nash_single_player_widest_path():
    solo = make_network(1, [(0, 1), (0, 1)], [2, 5], [(0, 1)])
    assert is_nash(solo, ((1,),))[0]
    ok, witness = is_nash(solo, ((0,),))
    assert not ok and witness.new_strategies == ((1,),)


def test_no_pne_counterexample_all_states_refuted():
    built = generate(GeneratorParams(family="e"))
    assert find_pne_brute(built.instance) is None
    for state in product(*built.instance.strategy_lists):
        ok, witness = is_nash(built.instance, state)
        assert not ok
        assert witness.new_bandwidths[0] > witness.old_bandwidths[0]


def test_strong_equilibrium_examples():
    inst = singleton_game()
    pne = ((2,), (2,), (2,))
    assert is_strong_equilibrium(inst, pne, 3)[0]
    solo = make_network(1, [(0, 1), (0, 1)], [2, 5], [(0, 1)])
    assert is_strong_equilibrium(solo, ((1,),), 1)[0]


def test_strong_equilibrium_budget_guard():
    inst = singleton_game()
    with pytest.raises(BudgetExceededError):
        is_strong_equilibrium(inst, ((2,), (2,), (2,)), 3, budget=4)


def test_dynamics_converges_to_the_unique_pne():
    inst = singleton_game()
    start = ((0,),) * 3
    trace = improvement_dynamics(inst, start, 1)
    assert trace.terminal == ((2,), (2,), (2,))
    # brute force confirms uniqueness
    pnes = [s for s in product(*inst.strategy_lists) if is_nash(inst, s)[0]]
    assert pnes == [((2,), (2,), (2,))]
    # potentials strictly increase along the recorded steps
    potentials = [step.potential for step in trace.steps] + [trace.terminal_potential]
    assert all(a < b for a, b in zip(potentials, potentials[1:]))


def test_dynamics_fixed_point_is_zero_steps():
    inst = singleton_game()
    pne = ((2,), (2,), (2,))
    trace = improvement_dynamics(inst, pne, 1)
    assert trace.step_count == 0 and trace.terminal == pne


def test_dynamics_step_limit_error_carries_trace():
    inst = singleton_game()
    with pytest.raises(StepLimitError) as err:
        improvement_dynamics(inst, ((0,),) * 3, 1, step_limit=1)
    assert err.value.trace.step_count == 1


def test_coalitional_dynamics_reach_strong_equilibria():
    rng = random.Random(37)
    count = 0
    for inst in monotone_suite(count=120, seed=9917):
        state = tuple(rng.choice(lst) for lst in inst.strategy_lists)
        trace = improvement_dynamics(inst, state, inst.num_players)
        ok, _ = is_strong_equilibrium(inst, trace.terminal, inst.num_players)
        assert ok
        potentials = [s.potential for s in trace.steps] + [trace.terminal_potential]
        assert all(a < b for a, b in zip(potentials, potentials[1:]))
        count += trace.step_count
    assert count > 0


def test_find_pne_brute_examples():
    built = generate(GeneratorParams(family="a", n=4))
    assert find_pne_brute(built.instance) == built.states["unique_pne"]
    solo = make_network(1, [(0, 1), (0, 1)], [2, 5], [(0, 1)])
    assert find_pne_brute(solo) == ((1,),)
    with pytest.raises(BudgetExceededError):
        find_pne_brute(singleton_game(), budget=2)


def test_witnessed_deviations_are_strict_and_potential_increasing():
    rng = random.Random(41)
    for inst in monotone_suite(count=60, seed=5501):
        state = tuple(rng.choice(lst) for lst in inst.strategy_lists)
        ok, witness = is_nash(inst, state)
        if ok:
            continue
        assert all(
            nb > ob
            for nb, ob in zip(witness.new_bandwidths, witness.old_bandwidths)
        )
        after = witness.apply(state)
        assert potential_vector(inst, after) > potential_vector(inst, state)
