"""Exact-rational data model for progressive filling games.

A game consists of players, capacitated resources, a strategy space
(either explicit per-player lists of resource subsets, or a directed
multigraph whose arcs are the resources and whose simple source-sink
paths are the strategies), and one allocation-rate function per player.
All numeric quantities are ``fractions.Fraction``; nothing in this
package ever touches floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import gcd
from typing import Iterable, Iterator, Optional, Union

from .errors import EnumerationOverflowError, ValidationError

Rational = Fraction
NodeId = Union[int, str]

# A strategy is a canonical (sorted, duplicate-free) tuple of resource ids.
Strategy = tuple
# A state assigns one strategy to every player, indexed by player.
State = tuple

# Safety ceiling for implicit path enumeration when no explicit limit is given.
DEFAULT_ENUMERATION_CEILING = 200_000


def canonical_strategy(resource_ids: Iterable[int]) -> Strategy:
    """Normalize a collection of resource ids to the canonical strategy form."""
    return tuple(sorted(set(resource_ids)))


@dataclass(frozen=True)
class Resource:
    """A capacitated resource (a link, in network terms)."""

    id: int
    capacity: Fraction


@dataclass(frozen=True)
class RateFunction:
    """A piecewise-constant allocation rate.

    ``pieces`` is a sequence of ``(breakpoint, rate)`` pairs: the rate holds
    on ``[breakpoint, next_breakpoint)`` and the final rate holds forever.
    The integral V(t) is therefore piecewise linear, V(0) = 0, and the final
    rate must be positive so that V(t) grows without bound.  ``monotone``
    declares that V is non-decreasing (all rates non-negative); rate
    functions with ``monotone=False`` are only accepted by the filling
    engine in nonstandard mode.
    """

    pieces: tuple
    monotone: bool = True

    @staticmethod
    def constant(rate) -> "RateFunction":
        rate = Fraction(rate)
        return RateFunction(pieces=((Fraction(0), rate),), monotone=rate >= 0)

    @staticmethod
    def from_pairs(pairs, monotone: Optional[bool] = None) -> "RateFunction":
        pieces = tuple((Fraction(t), Fraction(r)) for t, r in pairs)
        if monotone is None:
            monotone = all(r >= 0 for _, r in pieces)
        return RateFunction(pieces=pieces, monotone=monotone)

    @property
    def is_constant(self) -> bool:
        return len(self.pieces) == 1

    @cached_property
    def table(self):
        """(breakpoints, integral values at breakpoints, slopes) for fast evaluation."""
        bps = tuple(t for t, _ in self.pieces)
        slopes = tuple(r for _, r in self.pieces)
        vals = [Fraction(0)]
        for j in range(1, len(bps)):
            vals.append(vals[-1] + slopes[j - 1] * (bps[j] - bps[j - 1]))
        return bps, tuple(vals), slopes

    def value(self, t) -> Fraction:
        """V(t): the integral of the rate from 0 to t (t >= 0)."""
        bps, vals, slopes = self.table
        j = len(bps) - 1
        while j > 0 and bps[j] > t:
            j -= 1
        return vals[j] + slopes[j] * (t - bps[j])

    def violations(self, label: str):
        out = []
        if not self.pieces:
            out.append(f"{label}: rate function has no pieces")
            return out
        bps = [t for t, _ in self.pieces]
        if bps[0] != 0:
            out.append(f"{label}: first breakpoint must be 0, got {bps[0]}")
        for a, b in zip(bps, bps[1:]):
            if not b > a:
                out.append(f"{label}: breakpoints must be strictly increasing")
                break
        if any(t < 0 for t in bps):
            out.append(f"{label}: negative breakpoint")
        if self.pieces[-1][1] <= 0:
            out.append(f"{label}: final rate must be positive")
        if self.monotone and any(r < 0 for _, r in self.pieces):
            out.append(f"{label}: monotone_flag contradiction (negative rate)")
        if not self.monotone:
            # V must stay non-negative; V is piecewise linear with an
            # increasing tail, so checking it at every breakpoint suffices.
            _, vals, _ = self.table
            if any(v < 0 for v in vals):
                out.append(f"{label}: integral of rate drops below 0")
        return out


@dataclass(frozen=True)
class Arc:
    """A directed arc of a network strategy space; its id is the resource id."""

    id: int
    tail: NodeId
    head: NodeId


@dataclass(frozen=True)
class ExplicitSpace:
    """Per-player explicit strategy lists (canonical resource-id tuples)."""

    strategies: tuple  # tuple over players of tuples of Strategy

    @property
    def num_players(self) -> int:
        return len(self.strategies)

    @cached_property
    def _membership(self):
        return tuple(frozenset(lst) for lst in self.strategies)

    def is_valid_strategy(self, player: int, strategy: Strategy) -> bool:
        return strategy in self._membership[player]


@dataclass(frozen=True)
class NetworkSpace:
    """A directed multigraph; player strategies are simple source-sink paths."""

    arcs: tuple  # tuple of Arc, ids dense 0..m-1
    endpoints: tuple  # per player: (source, sink)

    @property
    def num_players(self) -> int:
        return len(self.endpoints)

    @property
    def is_single_commodity(self) -> bool:
        return len(set(self.endpoints)) <= 1

    @cached_property
    def arcs_by_tail(self):
        out: dict = {}
        for arc in self.arcs:
            out.setdefault(arc.tail, []).append(arc)
        for lst in out.values():
            lst.sort(key=lambda a: a.id)
        return out

    @cached_property
    def arc_by_id(self):
        return {a.id: a for a in self.arcs}

    def reachable(self, source: NodeId) -> set:
        seen = {source}
        stack = [source]
        while stack:
            node = stack.pop()
            for arc in self.arcs_by_tail.get(node, ()):
                if arc.head not in seen:
                    seen.add(arc.head)
                    stack.append(arc.head)
        return seen

    def iter_paths(self, source: NodeId, sink: NodeId) -> Iterator[tuple]:
        """Yield all simple source-sink paths as arc-id sequences, in
        lexicographic order of the arc-id sequence."""
        if source == sink:
            return
        arc_seq: list = []
        visited = {source}

        def walk(node) -> Iterator[tuple]:
            for arc in self.arcs_by_tail.get(node, ()):
                if arc.head in visited:
                    continue
                arc_seq.append(arc.id)
                if arc.head == sink:
                    yield tuple(arc_seq)
                else:
                    visited.add(arc.head)
                    yield from walk(arc.head)
                    visited.remove(arc.head)
                arc_seq.pop()

        yield from walk(source)

    def is_valid_strategy(self, player: int, strategy: Strategy) -> bool:
        """True iff the arc-id set forms a simple source-sink path."""
        source, sink = self.endpoints[player]
        arcs = {}
        by_id = self.arc_by_id
        for rid in strategy:
            arc = by_id.get(rid)
            if arc is None:
                return False
            if arc.tail in arcs:
                return False  # two outgoing arcs from one node: not a path
            arcs[arc.tail] = arc
        node = source
        visited = {source}
        used = 0
        while node != sink:
            arc = arcs.get(node)
            if arc is None:
                return False
            node = arc.head
            if node in visited:
                return False
            visited.add(node)
            used += 1
        return used == len(strategy)


StrategySpace = Union[ExplicitSpace, NetworkSpace]


@dataclass(frozen=True)
class GameInstance:
    """A progressive filling game: players, resources, strategies, rates."""

    num_players: int
    resources: tuple  # tuple of Resource, ids dense 0..m-1
    space: StrategySpace
    rates: tuple  # tuple of RateFunction, one per player

    @property
    def num_resources(self) -> int:
        return len(self.resources)

    @cached_property
    def capacities(self) -> tuple:
        return tuple(r.capacity for r in self.resources)

    @cached_property
    def _capacity_pairs(self) -> tuple:
        return tuple((c.numerator, c.denominator) for c in self.capacities)

    @cached_property
    def all_monotone(self) -> bool:
        return all(r.monotone for r in self.rates)

    @cached_property
    def all_constant(self) -> bool:
        return all(r.is_constant for r in self.rates)

    @cached_property
    def constant_rates(self) -> Optional[tuple]:
        if not self.all_constant:
            return None
        return tuple(r.pieces[0][1] for r in self.rates)

    @cached_property
    def _integer_rate_scale(self):
        """(scale W, integer numerators u_i) with rate_i = u_i / W, for the
        constant-rate fast path."""
        rates = self.constant_rates
        if rates is None:
            return None
        scale = 1
        for r in rates:
            scale = scale * r.denominator // gcd(scale, r.denominator)
        return scale, tuple(int(r * scale) for r in rates)

    @cached_property
    def strategy_lists(self) -> tuple:
        """All players' strategy lists (paths enumerated for network spaces)."""
        return tuple(
            enumerate_strategies(self, i, limit=DEFAULT_ENUMERATION_CEILING)
            for i in range(self.num_players)
        )

    def is_valid_state(self, state: State) -> bool:
        if len(state) != self.num_players:
            return False
        return all(
            self.space.is_valid_strategy(i, s) for i, s in enumerate(state)
        )


def validate_instance(candidate: GameInstance) -> GameInstance:
    """Check every structural invariant of an instance.

    Returns the instance unchanged when valid; otherwise raises a
    ``ValidationError`` listing every violation with the offending element.
    """
    v: list = []
    n = candidate.num_players
    if n < 1:
        v.append("players must be >= 1")

    for idx, res in enumerate(candidate.resources):
        if res.id != idx:
            v.append(f"resource ids must be dense 0..m-1 (position {idx} has id {res.id})")
        if res.capacity < 0:
            v.append(f"negative capacity at resource {res.id}")

    if len(candidate.rates) != n:
        v.append(f"expected {n} rate functions, got {len(candidate.rates)}")
    for i, rate in enumerate(candidate.rates):
        v.extend(rate.violations(f"player {i}"))

    m = len(candidate.resources)
    space = candidate.space
    if isinstance(space, ExplicitSpace):
        if space.num_players != n:
            v.append(f"expected {n} strategy lists, got {space.num_players}")
        for i, lst in enumerate(space.strategies):
            if len(lst) == 0:
                v.append(f"player {i}: empty strategy set")
            seen = set()
            for strat in lst:
                if len(strat) == 0:
                    v.append(f"player {i}: empty strategy")
                if tuple(strat) != canonical_strategy(strat):
                    v.append(f"player {i}: strategy {strat} is not canonical (sorted, no duplicates)")
                if any(r < 0 or r >= m for r in strat):
                    v.append(f"player {i}: strategy {strat} uses unknown resources")
                if strat in seen:
                    v.append(f"player {i}: duplicate strategy {strat}")
                seen.add(strat)
    elif isinstance(space, NetworkSpace):
        if len(space.arcs) != m:
            v.append(f"network must have one arc per resource ({m}), got {len(space.arcs)}")
        for idx, arc in enumerate(space.arcs):
            if arc.id != idx:
                v.append(f"arc ids must be dense 0..m-1 (position {idx} has id {arc.id})")
        if space.num_players != n:
            v.append(f"expected {n} endpoint pairs, got {space.num_players}")
        for i, (source, sink) in enumerate(space.endpoints):
            if source == sink:
                v.append(f"player {i}: source equals sink")
            elif sink not in space.reachable(source):
                v.append(f"player {i}: empty strategy set")
    else:
        v.append(f"unknown strategy space type {type(space).__name__}")

    if v:
        raise ValidationError(v)
    return candidate


def enumerate_strategies(
    instance: GameInstance, player: int, limit: Optional[int] = None
) -> tuple:
    """The player's full strategy list, in deterministic order.

    Explicit spaces return the stored list.  Network spaces return all
    simple source-sink paths ordered lexicographically by arc-id sequence,
    each path canonicalized to its sorted arc-id tuple.  If ``limit`` is
    given and exceeded, an ``EnumerationOverflowError`` is raised instead of
    silently truncating.
    """
    space = instance.space
    if isinstance(space, ExplicitSpace):
        lst = space.strategies[player]
        if limit is not None and len(lst) > limit:
            raise EnumerationOverflowError(limit, len(lst))
        return tuple(lst)
    source, sink = space.endpoints[player]
    ceiling = DEFAULT_ENUMERATION_CEILING if limit is None else limit
    out = []
    for seq in space.iter_paths(source, sink):
        if len(out) >= ceiling:
            raise EnumerationOverflowError(ceiling, len(out) + 1)
        out.append(canonical_strategy(seq))
    return tuple(out)
