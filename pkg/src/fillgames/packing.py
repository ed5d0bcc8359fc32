"""Strategy packing oracles and the Dual Greedy strong-equilibrium algorithm.

Strategy packing asks for a state in which each resource r is used by at
most ``u_r`` players.  Dual Greedy computes a strong equilibrium of a
uniform-rate game by repeatedly shrinking the per-resource bound whose
current residual-capacity share is smallest, probing feasibility through a
packing oracle, and freezing the players of the first resource whose bound
can shrink no further.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

from .core import GameInstance, NetworkSpace, State, canonical_strategy
from .errors import BudgetExceededError, EngineError, EnumerationOverflowError
from .flownet import extract_paths, max_flow_int
from .waterfill import progressive_fill

# Per-resource player-count upper bounds, aligned with resource ids.
PackingBounds = Tuple[int, ...]

DEFAULT_PACKING_BUDGET = 10**6


@dataclass(frozen=True)
class FixBatch:
    """Players frozen together when a resource's bound became tight."""

    resource: int
    players: tuple
    bandwidth: Fraction


@dataclass(frozen=True)
class DualGreedyResult:
    """Output state plus the full iteration trace for auditing."""

    state: State
    fix_batches: tuple
    final_bounds: tuple
    trace: tuple  # per-iteration (selected resource, residual/bound ratio)

    @property
    def min_bandwidth(self) -> Fraction:
        return min(batch.bandwidth for batch in self.fix_batches)


def pack_explicit(
    strategy_lists: Sequence[Sequence[tuple]],
    bounds: Sequence[int],
    *,
    budget: int = DEFAULT_PACKING_BUDGET,
) -> Optional[State]:
    """Backtracking strategy packing over explicit per-player lists.

    Deterministic: players in the given order, strategies in stored order;
    returns the first state satisfying the bounds, or None.
    """
    n = len(strategy_lists)
    counts = [0] * len(bounds)
    chosen: list = [None] * n
    nodes = 0

    def descend(p: int) -> bool:
        nonlocal nodes
        if p == n:
            return True
        for strat in strategy_lists[p]:
            nodes += 1
            if nodes > budget:
                raise BudgetExceededError(budget, "strategy packing search")
            if all(counts[r] < bounds[r] for r in strat):
                for r in strat:
                    counts[r] += 1
                chosen[p] = strat
                if descend(p + 1):
                    return True
                for r in strat:
                    counts[r] -= 1
        return False

    return tuple(chosen) if descend(0) else None


def pack_network(
    space: NetworkSpace,
    active: Sequence[int],
    bounds: Sequence[int],
    *,
    budget: int = DEFAULT_PACKING_BUDGET,
) -> Optional[tuple]:
    """Strategy packing over a network space, one strategy per active player.

    Single-commodity spaces reduce to an integral maximum flow under the
    bounds: feasible iff its value covers the active players, in which case
    a value-sized subflow is split into that many simple paths (cycles
    discarded, lexicographically least saturating path first).  Other
    spaces fall back to explicit packing over enumerated paths.
    """
    if not isinstance(space, NetworkSpace):
        raise EngineError("network packing oracle requires a network strategy space")
    active = list(active)
    if not active:
        return ()
    if not space.is_single_commodity:
        lists = []
        for i in active:
            source, sink = space.endpoints[i]
            paths = []
            for seq in space.iter_paths(source, sink):
                if len(paths) >= budget:
                    raise EnumerationOverflowError(budget, len(paths) + 1)
                paths.append(canonical_strategy(seq))
            lists.append(tuple(paths))
        return pack_explicit(lists, bounds, budget=budget)
    source, sink = space.endpoints[active[0]]
    arcs = [(arc.tail, arc.head) for arc in space.arcs]
    value, flow = max_flow_int(arcs, list(bounds), source, sink)
    if value < len(active):
        return None
    paths = extract_paths(arcs, flow, source, sink, len(active))
    return tuple(canonical_strategy(p) for p in paths)


def _oracle_for(
    instance: GameInstance, oracle: str, budget: int
) -> Callable[[List[int], List[int]], Optional[tuple]]:
    if oracle == "explicit":
        lists = instance.strategy_lists

        def query(active, bounds):
            return pack_explicit([lists[i] for i in active], bounds, budget=budget)

        return query
    if oracle == "network":
        space = instance.space
        if not isinstance(space, NetworkSpace):
            raise EngineError("network oracle requires a network strategy space")

        def query(active, bounds):
            return pack_network(space, active, bounds, budget=budget)

        return query
    raise ValueError(f"unknown oracle {oracle!r} (expected 'explicit' or 'network')")


def dual_greedy(
    instance: GameInstance,
    oracle: str = "explicit",
    *,
    budget: int = DEFAULT_PACKING_BUDGET,
) -> DualGreedyResult:
    """Compute a strong equilibrium of a uniform-rate game.

    Bounds start at n on every resource.  Each iteration decrements the
    bound of the resource minimizing residual/bound (ties to the smallest
    id) and asks the oracle whether a packing still exists; if not, the
    decrement is reverted and every player routed over that resource in the
    last feasible packing is frozen at bandwidth residual/bound, shrinking
    bounds and residuals along their strategies.
    """
    rates = instance.constant_rates
    if rates is None or any(r != 1 for r in rates):
        raise EngineError("dual greedy requires uniform unit rates")
    n = instance.num_players
    m = instance.num_resources
    query = _oracle_for(instance, oracle, budget)

    bounds = [n] * m
    resid = list(instance.capacities)
    active = list(range(n))
    final: dict = {}
    batches: list = []
    trace: list = []

    pack = query(active, bounds)
    if pack is None:
        raise EngineError("no feasible state under the trivial bounds")
    guard = n * m + n + m + 4
    while active:
        guard -= 1
        if guard < 0:
            raise EngineError("dual greedy failed to terminate")
        best_ratio = None
        best_r = -1
        for r in range(m):
            if bounds[r] <= 0:
                continue
            ratio = resid[r] / bounds[r]
            if best_ratio is None or ratio < best_ratio:
                best_ratio, best_r = ratio, r
        if best_r < 0:
            raise EngineError("no resource with a positive bound remains")
        trace.append((best_r, best_ratio))
        bounds[best_r] -= 1
        probe = query(active, bounds)
        if probe is not None:
            pack = probe
            continue
        bounds[best_r] += 1
        bandwidth = best_ratio
        packed = dict(zip(active, pack))
        batch = [i for i in active if best_r in packed[i]]
        if not batch:
            raise EngineError("bound became tight on a resource no packing uses")
        for i in batch:
            final[i] = packed[i]
            for r in packed[i]:
                bounds[r] -= 1
                resid[r] -= bandwidth
                if bounds[r] < 0 or resid[r] < 0:
                    raise EngineError("negative bound or residual while fixing a batch")
        batch_set = set(batch)
        active = [i for i in active if i not in batch_set]
        batches.append(FixBatch(best_r, tuple(batch), bandwidth))
        if active:
            pack = query(active, bounds)
            if pack is None:
                raise EngineError("packing disappeared after fixing a batch")

    for (_, a), (_, b) in zip(trace, trace[1:]):
        if b < a:
            raise EngineError("selected residual/bound ratio decreased")

    state = tuple(final[i] for i in range(n))
    filled = progressive_fill(instance, state, check_state=False)
    for batch in batches:
        for i in batch.players:
            if filled.bandwidths[i] != batch.bandwidth:
                raise EngineError("dual greedy bandwidths disagree with waterfilling")
    return DualGreedyResult(
        state=state,
        fix_batches=tuple(batches),
        final_bounds=tuple(bounds),
        trace=tuple(trace),
    )
