"""Best responses, Nash/strong equilibrium checks, improvement dynamics.

Deviation scans run in a fixed deterministic order so every trace is
reproducible: coalitions by size then lexicographically by member tuple
(size-1 coalitions are simply players in ascending order), and joint
deviations in product order over the members' strategy lists with the
rightmost member varying fastest.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Optional, Tuple

from .core import ExplicitSpace, GameInstance, State, Strategy, canonical_strategy
from .errors import BudgetExceededError, EngineError, StepLimitError
from .flownet import widest_path
from .waterfill import (
    AllocationResult,
    improves_all,
    probe_base_constant,
    probe_constant,
    progressive_fill,
)

DEFAULT_DEVIATION_BUDGET = 10**6


@dataclass(frozen=True)
class DeviationWitness:
    """A coalition move in which every member strictly gains."""

    coalition: tuple
    new_strategies: tuple
    old_bandwidths: tuple
    new_bandwidths: tuple

    def apply(self, state: State) -> State:
        out = list(state)
        for i, strat in zip(self.coalition, self.new_strategies):
            out[i] = strat
        return tuple(out)


@dataclass(frozen=True)
class DynamicsStep:
    state: State
    potential: tuple
    witness: DeviationWitness


@dataclass(frozen=True)
class DynamicsTrace:
    """An improvement sequence: visited states with the deviations taken."""

    steps: tuple
    terminal: State
    terminal_potential: tuple

    @property
    def step_count(self) -> int:
        return len(self.steps)


def single_resource_bandwidth(
    instance: GameInstance, state: State, player: int, resource: int
) -> Fraction:
    """The player's bandwidth when routed over the single given resource,
    everyone else unchanged."""
    if not 0 <= resource < instance.num_resources:
        raise EngineError(f"unknown resource {resource}")
    probe = state[:player] + ((resource,),) + state[player + 1 :]
    result = progressive_fill(instance, probe, check_state=False)
    return result.bandwidths[player]


def best_response(
    instance: GameInstance, state: State, player: int
) -> Tuple[Strategy, Fraction]:
    """A bandwidth-maximizing strategy for the player against the others.

    With monotone rates the bandwidth of any alternative equals the minimum
    of its per-resource single-route bandwidths, so explicit spaces are
    scanned with that formula and network spaces reduce to a widest
    (maximum-bottleneck) path over per-arc values.  Ties go to the first
    strategy in enumeration order / the lexicographically least path.
    """
    if not instance.all_monotone:
        raise EngineError("best_response requires monotone rates")
    space = instance.space
    if isinstance(space, ExplicitSpace):
        values = {}
        best_strat = None
        best_val = None
        for strat in instance.strategy_lists[player]:
            for r in strat:
                if r not in values:
                    values[r] = single_resource_bandwidth(instance, state, player, r)
            val = min(values[r] for r in strat)
            if best_val is None or val > best_val:
                best_strat, best_val = strat, val
        return best_strat, best_val
    values = [
        single_resource_bandwidth(instance, state, player, arc.id)
        for arc in space.arcs
    ]
    source, sink = space.endpoints[player]
    labelled = [(arc.id, arc.tail, arc.head, values[arc.id]) for arc in space.arcs]
    found = widest_path(labelled, source, sink)
    if found is None:
        raise EngineError(f"player {player}: no route from {source} to {sink}")
    path, bottleneck = found
    return canonical_strategy(path), bottleneck


def _witness(
    instance: GameInstance,
    state: State,
    coalition: tuple,
    choice: tuple,
    before: AllocationResult,
    *,
    nonstandard: bool = False,
) -> DeviationWitness:
    new_state = list(state)
    for j, i in enumerate(coalition):
        new_state[i] = choice[j]
    after = progressive_fill(
        instance, tuple(new_state), nonstandard=nonstandard, check_state=False
    )
    old = tuple(before.bandwidths[i] for i in coalition)
    new = tuple(after.bandwidths[i] for i in coalition)
    if not all(nb > ob for nb, ob in zip(new, old)):
        raise EngineError("deviation witness is not strictly improving")
    return DeviationWitness(
        coalition=coalition,
        new_strategies=tuple(choice),
        old_bandwidths=old,
        new_bandwidths=new,
    )


def _first_improving(
    instance: GameInstance,
    state: State,
    max_size: int,
    budget: int,
    current: Optional[AllocationResult] = None,
    min_size: int = 1,
) -> Optional[DeviationWitness]:
    """First strictly improving coalition deviation in scan order, or None."""
    if current is None:
        current = progressive_fill(instance, state, check_state=False)
    lists = instance.strategy_lists
    bandwidths = current.bandwidths
    n = instance.num_players
    max_size = min(max_size, n)
    fast = instance.all_constant
    count = 0
    for size in range(min_size, max_size + 1):
        for coalition in combinations(range(n), size):
            watched = {i: bandwidths[i] for i in coalition}
            watched_pairs = {
                i: (b.numerator, b.denominator) for i, b in watched.items()
            }
            options = [lists[i] for i in coalition]
            base = tuple(state[i] for i in coalition)
            probe_base = probe_base_constant(instance, state, coalition) if fast else None
            for choice in product(*options):
                if choice == base:
                    continue
                count += 1
                if count > budget:
                    raise BudgetExceededError(
                        budget, f"scanning coalition deviations (size <= {max_size})"
                    )
                if fast:
                    hit = probe_constant(
                        instance, state, coalition, choice, watched_pairs, probe_base
                    )
                else:
                    new_state = list(state)
                    for j, i in enumerate(coalition):
                        new_state[i] = choice[j]
                    hit = improves_all(instance, tuple(new_state), watched)
                if hit:
                    return _witness(instance, state, coalition, choice, current)
    return None


def _first_improving_nonstandard(
    instance: GameInstance, state: State, budget: int
) -> Optional[DeviationWitness]:
    """Unilateral improvement search by direct filling (non-monotone rates)."""
    current = progressive_fill(instance, state, nonstandard=True, check_state=False)
    count = 0
    for player in range(instance.num_players):
        for alt in instance.strategy_lists[player]:
            if alt == state[player]:
                continue
            count += 1
            if count > budget:
                raise BudgetExceededError(budget, "scanning unilateral deviations")
            probe = state[:player] + (alt,) + state[player + 1 :]
            after = progressive_fill(instance, probe, nonstandard=True, check_state=False)
            if after.bandwidths[player] > current.bandwidths[player]:
                return _witness(
                    instance, state, (player,), (alt,), current, nonstandard=True
                )
    return None


def is_nash(
    instance: GameInstance, state: State, *, budget: int = DEFAULT_DEVIATION_BUDGET
) -> Tuple[bool, Optional[DeviationWitness]]:
    """Whether no player has a strictly improving unilateral deviation."""
    if instance.all_monotone:
        witness = _first_improving(instance, state, 1, budget)
    else:
        witness = _first_improving_nonstandard(instance, state, budget)
    return witness is None, witness


def is_strong_equilibrium(
    instance: GameInstance,
    state: State,
    max_coalition_size: int,
    *,
    budget: int = DEFAULT_DEVIATION_BUDGET,
) -> Tuple[bool, Optional[DeviationWitness]]:
    """Whether no coalition of size <= max_coalition_size can deviate so that
    every member strictly gains.  max_coalition_size = n checks a full
    strong equilibrium."""
    if not instance.all_monotone:
        raise EngineError("strong equilibrium checks require monotone rates")
    if max_coalition_size < 1:
        raise ValueError("max_coalition_size must be >= 1")
    witness = _first_improving(instance, state, max_coalition_size, budget)
    return witness is None, witness


def improvement_dynamics(
    instance: GameInstance,
    start: State,
    max_coalition_size: int = 1,
    *,
    step_limit: int = 10_000,
    budget: int = DEFAULT_DEVIATION_BUDGET,
) -> DynamicsTrace:
    """Apply first improving deviations until none remains.

    After every step the sorted finishing-time vector must strictly
    increase lexicographically, and the coalition's move may not drag any
    earlier-finishing player below its old finishing time nor any
    later-finishing player down to the coalition minimum; violations are
    internal-consistency failures, not game properties, and raise.
    """
    if not instance.all_monotone:
        raise EngineError("improvement dynamics require monotone rates")
    current = progressive_fill(instance, start, check_state=True)
    state = start
    steps: list = []
    while True:
        witness = _first_improving(
            instance, state, max_coalition_size, budget, current=current
        )
        if witness is None:
            break
        if len(steps) >= step_limit:
            raise StepLimitError(
                step_limit,
                DynamicsTrace(
                    steps=tuple(steps),
                    terminal=state,
                    terminal_potential=tuple(sorted(current.finishing_times)),
                ),
            )
        new_state = witness.apply(state)
        after = progressive_fill(instance, new_state, check_state=False)
        phi_before = tuple(sorted(current.finishing_times))
        phi_after = tuple(sorted(after.finishing_times))
        if not phi_after > phi_before:
            raise EngineError(
                "potential vector did not increase lexicographically on an improving move"
            )
        coalition_min = min(current.finishing_times[i] for i in witness.coalition)
        for i in range(instance.num_players):
            t_old = current.finishing_times[i]
            t_new = after.finishing_times[i]
            if t_old <= coalition_min and t_new < t_old:
                raise EngineError("an early-finishing player lost finishing time")
            if t_old > coalition_min and t_new <= coalition_min:
                raise EngineError("a late-finishing player fell to the coalition minimum")
        steps.append(DynamicsStep(state=state, potential=phi_before, witness=witness))
        state, current = new_state, after
    return DynamicsTrace(
        steps=tuple(steps),
        terminal=state,
        terminal_potential=tuple(sorted(current.finishing_times)),
    )


def find_pne_brute(
    instance: GameInstance, *, budget: int = DEFAULT_DEVIATION_BUDGET
) -> Optional[State]:
    """Scan all states in deterministic order for the first pure Nash
    equilibrium; None when the game has none."""
    count = 0
    for state in product(*instance.strategy_lists):
        count += 1
        if count > budget:
            raise BudgetExceededError(budget, "enumerating states")
        ok, _ = is_nash(instance, state, budget=budget)
        if ok:
            return state
    return None
