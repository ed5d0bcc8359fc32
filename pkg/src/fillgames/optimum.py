"""Throughput optimization: exact MCAP, uniform MCAP, a 3-path
approximation for single-commodity networks, and allocation-rate design.

The MCAP (maximum capacity allocation problem) asks for a state plus
feasible bandwidths maximizing total bandwidth; it is not restricted to
waterfilling outcomes.  Rate design turns any feasible solution into a
game whose filling reproduces it exactly: give player i the constant rate
a_i, and every saturated resource fires at time 1.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from itertools import combinations_with_replacement, product
from typing import Optional, Tuple

from .core import GameInstance, NetworkSpace, RateFunction, State, canonical_strategy
from .errors import BudgetExceededError, EngineError, ValidationError
from .flownet import lex_least_path, widest_path
from .packing import pack_explicit, pack_network
from .simplex import lex_maximize
from .waterfill import progressive_fill, social_welfare
from .equilibrium import improvement_dynamics

ZERO = Fraction(0)
ONE = Fraction(1)

DEFAULT_OPT_BUDGET = 10**6

# Per-player constant rates used by designed games.
RateProfile = Tuple[Fraction, ...]


@dataclass(frozen=True)
class McapSolution:
    """A state with feasible bandwidths; value is their sum."""

    state: State
    allocation: tuple
    value: Fraction


@dataclass(frozen=True)
class ExactOptima:
    """The MCAP optimum plus, separately, the best waterfilling outcome."""

    mcap: McapSolution
    pf_state: State
    pf_value: Fraction


def mcap_for_state(
    instance: GameInstance, state: State, *, check_state: bool = True
) -> McapSolution:
    """Maximize total bandwidth over the fixed state's capacity constraints.

    Solved by exact rational simplex; among the optimal vertices the
    lexicographically greatest allocation is returned.
    """
    n = instance.num_players
    if check_state and not instance.is_valid_state(state):
        raise ValidationError(["state is not part of the strategy space"])
    rows = []
    rhs = []
    for r in range(instance.num_resources):
        row = [ONE if r in state[i] else ZERO for i in range(n)]
        if any(row):
            rows.append(row)
            rhs.append(instance.capacities[r])
    if not rows:
        raise EngineError("state uses no resources")
    objectives = [[ONE] * n]
    for i in range(n):
        unit = [ZERO] * n
        unit[i] = ONE
        objectives.append(unit)
    allocation = lex_maximize(objectives, rows, rhs)
    return McapSolution(
        state=state, allocation=tuple(allocation), value=sum(allocation, ZERO)
    )


def mcap_exact(
    instance: GameInstance, *, budget: int = DEFAULT_OPT_BUDGET
) -> ExactOptima:
    """Maximize the MCAP over all states, and the filling welfare over all
    states, by pruned enumeration.

    The sum of per-strategy bottleneck capacities bounds both objectives
    for a state, so states whose bound does not beat the incumbent are
    skipped; witnesses are the first states in scan order achieving each
    maximum.
    """
    lists = instance.strategy_lists
    caps = instance.capacities
    total_states = 1
    for lst in lists:
        total_states *= len(lst)
    if total_states > budget:
        raise BudgetExceededError(budget, "enumerating states for the exact optimum")
    bottleneck = [
        {strat: min(caps[r] for r in strat) for strat in lst} for lst in lists
    ]
    best_sol: Optional[McapSolution] = None
    best_pf_value: Optional[Fraction] = None
    best_pf_state: Optional[State] = None
    for state in product(*lists):
        bound = sum(bottleneck[i][strat] for i, strat in enumerate(state))
        if best_sol is None or bound > best_sol.value:
            sol = mcap_for_state(instance, state, check_state=False)
            if best_sol is None or sol.value > best_sol.value:
                best_sol = sol
        if best_pf_value is None or bound > best_pf_value:
            welfare = social_welfare(
                progressive_fill(instance, state, check_state=False)
            )
            if best_pf_value is None or welfare > best_pf_value:
                best_pf_value = welfare
                best_pf_state = state
    return ExactOptima(mcap=best_sol, pf_state=best_pf_state, pf_value=best_pf_value)


def uniform_mcap(instance: GameInstance, *, budget: int = DEFAULT_OPT_BUDGET) -> Fraction:
    """Largest v such that some state supports the allocation (v, ..., v).

    At the optimum some resource is shared by j players at exactly
    capacity/j, so it suffices to test the candidate values c_r/j in
    descending order, checking each by strategy packing with bounds
    floor(c_r / v).
    """
    rates = instance.constant_rates
    if rates is None or any(r != 1 for r in rates):
        raise EngineError("uniform MCAP requires uniform unit rates")
    n = instance.num_players
    caps = instance.capacities
    candidates = sorted(
        {caps[r] / j for r in range(instance.num_resources) for j in range(1, n + 1)},
        reverse=True,
    )
    space = instance.space
    use_flow = isinstance(space, NetworkSpace) and space.is_single_commodity
    for v in candidates:
        if v == 0:
            return ZERO
        bounds = [min(n, int(caps[r] // v)) for r in range(instance.num_resources)]
        if use_flow:
            packed = pack_network(space, range(n), bounds, budget=budget)
        else:
            packed = pack_explicit(instance.strategy_lists, bounds, budget=budget)
        if packed is not None:
            return v
    return ZERO


def _augment(flow, path, delta):
    for key in path:
        aid, back = key
        flow[aid] += -delta if back else delta


def three_splittable_approx(
    instance: GameInstance, *, budget: int = DEFAULT_OPT_BUDGET
) -> McapSolution:
    """3-path MCAP approximation for 3-player single-commodity networks.

    Runs the maximum-capacity augmenting path algorithm for two iterations
    and splits the resulting flow into at most three simple paths
    (circulations discarded), found by exact search over path triples of
    the flow support; when fewer distinct paths suffice, the largest one is
    duplicated with its flow shared equally.  The value achieved is within
    a factor 3/2 of the optimum.
    """
    space = instance.space
    if not isinstance(space, NetworkSpace) or not space.is_single_commodity:
        raise EngineError("the 3-path approximation requires a single-commodity network")
    if instance.num_players != 3:
        raise EngineError("the 3-path approximation requires exactly 3 players")
    source, sink = space.endpoints[0]
    caps = instance.capacities
    flow = [ZERO] * instance.num_resources

    def residual_arcs():
        out = []
        for arc in space.arcs:
            out.append(((arc.id, False), arc.tail, arc.head, caps[arc.id] - flow[arc.id]))
            out.append(((arc.id, True), arc.head, arc.tail, flow[arc.id]))
        return out

    total = ZERO
    for _ in range(2):
        found = widest_path(residual_arcs(), source, sink)
        if found is None:
            if total == 0:
                raise EngineError(f"no route from {source} to {sink}")
            break
        path, delta = found
        if delta <= 0:
            break
        _augment(flow, path, delta)
        total += delta

    if total == 0:
        path = lex_least_path(
            [(arc.id, arc.tail, arc.head) for arc in space.arcs], source, sink
        )
        if path is None:
            raise EngineError(f"no route from {source} to {sink}")
        strat = canonical_strategy(path)
        return McapSolution(state=(strat,) * 3, allocation=(ZERO,) * 3, value=ZERO)

    support_ids = [r for r in range(instance.num_resources) if flow[r] > 0]
    sub = NetworkSpace(
        arcs=tuple(a for a in space.arcs if flow[a.id] > 0),
        endpoints=((source, sink),),
    )
    paths = [canonical_strategy(seq) for seq in sub.iter_paths(source, sink)]

    best_alloc = None
    best_value = ZERO
    best_triple = None
    tried = 0
    for triple in combinations_with_replacement(paths, 3):
        tried += 1
        if tried > budget:
            raise BudgetExceededError(budget, "searching path triples")
        rows = []
        rhs = []
        for r in support_ids:
            row = [ONE if r in p else ZERO for p in triple]
            if any(row):
                rows.append(row)
                rhs.append(flow[r])
        objectives = [[ONE, ONE, ONE], [ONE, ZERO, ZERO], [ZERO, ONE, ZERO], [ZERO, ZERO, ONE]]
        z = lex_maximize(objectives, rows, rhs)
        value = sum(z, ZERO)
        if best_triple is None or value > best_value:
            best_triple, best_alloc, best_value = list(triple), list(z), value
        if value == total:
            break

    # Spread the value over three positive shares: fill empty slots with a
    # copy of the largest one split in half, then average identical paths.
    while best_value > 0 and any(z == 0 for z in best_alloc):
        jmax = best_alloc.index(max(best_alloc))
        jzero = best_alloc.index(ZERO)
        best_triple[jzero] = best_triple[jmax]
        half = best_alloc[jmax] / 2
        best_alloc[jmax] = half
        best_alloc[jzero] = half
    for path in set(best_triple):
        idx = [j for j in range(3) if best_triple[j] == path]
        if len(idx) > 1:
            mean = sum(best_alloc[j] for j in idx) / len(idx)
            for j in idx:
                best_alloc[j] = mean
    return McapSolution(
        state=tuple(best_triple), allocation=tuple(best_alloc), value=best_value
    )


def design_rates(
    instance: GameInstance, solution: McapSolution
) -> Tuple[GameInstance, State]:
    """Re-equip the game with constant rates equal to the solution's
    bandwidths.

    Filling the solution state in the designed game then freezes every
    player with a saturated resource at time exactly 1 with bandwidth
    exactly a_i; for an exact optimum that is every player, and the state
    is a strong equilibrium of the designed game.  Zero components (legal
    in degenerate optima) get a vanishing positive rate instead, since
    rates must be positive; such players no longer reproduce exactly.
    """
    n = instance.num_players
    if len(solution.state) != n or len(solution.allocation) != n:
        raise ValidationError(["solution does not match the instance's player count"])
    if not instance.is_valid_state(solution.state):
        raise ValidationError(["solution state is not part of the strategy space"])
    if any(a < 0 for a in solution.allocation):
        raise ValidationError(["negative bandwidth in solution"])
    for r in range(instance.num_resources):
        load = sum(
            (solution.allocation[i] for i in range(n) if r in solution.state[i]), ZERO
        )
        if load > instance.capacities[r]:
            raise ValidationError([f"allocation violates capacity at resource {r}"])
    positives = [a for a in solution.allocation if a > 0]
    if not positives:
        raise ValidationError(["cannot design rates for an all-zero allocation"])
    tiny = min(positives) / (n * (1 + sum(instance.capacities, ZERO)))
    rates = tuple(
        RateFunction.constant(a if a > 0 else tiny) for a in solution.allocation
    )
    designed = replace(instance, rates=rates)
    return designed, solution.state


def stabilize(
    instance: GameInstance,
    start: State,
    max_coalition_size: int = 1,
    *,
    step_limit: int = 10_000,
    budget: int = DEFAULT_OPT_BUDGET,
) -> State:
    """Run improvement dynamics from a designed start state.

    In a designed game no finishing time ever drops below 1, so total
    welfare can only grow; the terminal equilibrium is returned and the
    welfare comparison is asserted exactly.
    """
    before = social_welfare(progressive_fill(instance, start))
    trace = improvement_dynamics(
        instance, start, max_coalition_size, step_limit=step_limit, budget=budget
    )
    after = social_welfare(progressive_fill(instance, trace.terminal, check_state=False))
    if after < before:
        raise EngineError("social welfare decreased during stabilization")
    return trace.terminal
