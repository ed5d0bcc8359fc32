"""Progressive filling: the waterfilling engine and fairness reductions.

Every player's bandwidth is raised simultaneously at its own rate; when a
resource's residual capacity is exhausted, all active players using it are
frozen at their current level and the residuals along their strategies
shrink accordingly.  With exact rational rates and capacities every
saturation time is the root of a piecewise-linear equation, so the whole
process runs in exact arithmetic.

Two engines share the same semantics: a fast path for constant rates
(integer cross-multiplication for the saturation argmin) and a generic
piecewise-constant path.  Their agreement is property-tested.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Dict, Optional

from .core import GameInstance, RateFunction, State
from .errors import EngineError

ZERO = Fraction(0)


@dataclass(frozen=True)
class FixRound:
    """One saturation event: who froze, when, and on which resource."""

    time: Fraction
    players: tuple
    resource: int


@dataclass(frozen=True)
class AllocationResult:
    """Outcome of progressive filling on one state.

    ``saturation_times[r]`` is None when resource r never saturates (its
    users all froze elsewhere while r kept slack); it is set for every
    resource whose residual reaches exactly zero.
    """

    bandwidths: tuple
    finishing_times: tuple
    saturation_times: tuple
    fix_rounds: tuple


PotentialVector = tuple


def _users_by_resource(instance: GameInstance, state: State):
    users = [[] for _ in range(instance.num_resources)]
    for i, strat in enumerate(state):
        for r in strat:
            users[r].append(i)
    return users


def _check_state(instance: GameInstance, state: State) -> None:
    if len(state) != instance.num_players:
        raise EngineError(
            f"state has {len(state)} strategies for {instance.num_players} players"
        )
    m = instance.num_resources
    for i, strat in enumerate(state):
        if any(r < 0 or r >= m for r in strat):
            raise EngineError(f"player {i}: strategy {strat} touches unknown resources")
        if not instance.space.is_valid_strategy(i, strat):
            raise EngineError(f"player {i}: strategy {strat} is not in the strategy set")


def _first_hit(tables, target: Fraction, t_min: Fraction) -> Optional[Fraction]:
    """First t >= t_min with sum of the tabled integrals equal to target.

    Tables are (breakpoints, values, slopes) triples of piecewise-linear
    functions.  Scans segments in time order, so it is correct for
    non-monotone sums as well; returns None only if the sum never reaches
    the target (impossible when every final slope is positive).
    """
    pts = set()
    for bps, _, _ in tables:
        for bp in bps:
            if bp > t_min:
                pts.add(bp)
    starts = [t_min]
    starts.extend(sorted(pts))
    for k, a in enumerate(starts):
        sa = ZERO
        slope = ZERO
        for bps, vals, slopes in tables:
            j = bisect_right(bps, a) - 1
            sa += vals[j] + slopes[j] * (a - bps[j])
            slope += slopes[j]
        if sa == target:
            return a
        if sa > target:
            raise EngineError("saturation scan started above the residual")
        if slope > 0:
            t = a + (target - sa) / slope
            if k + 1 >= len(starts) or t < starts[k + 1]:
                return t
    return None


def _capped_table(table, t_fix: Fraction, b_fix: Fraction):
    """Table of V(min(t, t_fix)): the pour of a player frozen at t_fix."""
    bps, vals, slopes = table
    nb, nv, ns = [], [], []
    for j, bp in enumerate(bps):
        if bp >= t_fix:
            break
        nb.append(bp)
        nv.append(vals[j])
        ns.append(slopes[j])
    nb.append(t_fix)
    nv.append(b_fix)
    ns.append(ZERO)
    return tuple(nb), tuple(nv), tuple(ns)


def _run_constant(instance: GameInstance, state: State, watched):
    """Constant-rate engine over the touched resources only.

    With ``watched`` set, returns True/False as soon as every/any watched
    player is frozen strictly above/at-or-below its threshold; otherwise
    returns (bandwidths, times, rounds, residuals).  Saturation argmins are
    integer cross-multiplications; residuals are kept as reduced integer
    pairs.
    """
    scale, nums = instance._integer_rate_scale
    cap_pairs = instance._capacity_pairs
    n = instance.num_players

    users: dict = {}
    for i, strat in enumerate(state):
        for r in strat:
            if r in users:
                users[r].append(i)
            else:
                users[r] = [i]
    touched = sorted(users)
    resid = {r: cap_pairs[r] for r in touched}
    weight = {}
    for r in touched:
        w = 0
        for i in users[r]:
            w += nums[i]
        weight[r] = w

    is_active = [True] * n
    remaining = n
    bandwidths = [None] * n
    times = [None] * n
    rounds = []
    pending = dict(watched) if watched is not None else None

    while remaining:
        best_n = best_d = 0
        best_r = -1
        for r in touched:
            w = weight[r]
            if w == 0:
                continue
            rn, rd = resid[r]
            tn = rn * scale
            td = rd * w
            if best_r < 0 or tn * best_d < best_n * td:
                best_n, best_d, best_r = tn, td, r
        if best_r < 0:
            raise EngineError("no finite saturation time for the remaining players")
        t_star = Fraction(best_n, best_d)
        batch = [i for i in users[best_r] if is_active[i]]
        for i in batch:
            bandwidths[i] = Fraction(nums[i] * best_n, best_d * scale)
            times[i] = t_star
            is_active[i] = False
        remaining -= len(batch)
        if pending is not None:
            for i in batch:
                if i in pending:
                    if bandwidths[i] <= pending[i]:
                        return False
                    del pending[i]
            if not pending:
                return True
        for i in batch:
            b = bandwidths[i]
            bn, bd = b.numerator, b.denominator
            for r in state[i]:
                rn, rd = resid[r]
                nn = rn * bd - bn * rd
                if nn < 0:
                    raise EngineError(f"negative residual on resource {r}")
                nd = rd * bd
                g = gcd(nn, nd)
                if g > 1:
                    nn //= g
                    nd //= g
                resid[r] = (nn, nd)
                weight[r] -= nums[i]
        rounds.append(FixRound(t_star, tuple(batch), best_r))
        if len(rounds) > len(touched):
            raise EngineError("more fixing rounds than resources")
    if pending is not None:
        return not pending
    return bandwidths, times, rounds, {r: Fraction(*pair) for r, pair in resid.items()}


def _run_generic(instance: GameInstance, state: State, watched):
    tables = [rate.table for rate in instance.rates]
    caps = instance.capacities
    n = instance.num_players

    users: dict = {}
    for i, strat in enumerate(state):
        for r in strat:
            if r in users:
                users[r].append(i)
            else:
                users[r] = [i]
    used = sorted(users)
    resid = {r: caps[r] for r in used}
    is_active = [True] * n
    remaining = n
    bandwidths = [None] * n
    times = [None] * n
    rounds = []
    t_now = ZERO
    pending = dict(watched) if watched is not None else None

    while remaining:
        best_t = None
        best_r = -1
        for r in used:
            group = [tables[i] for i in users[r] if is_active[i]]
            if not group:
                continue
            t = _first_hit(group, resid[r], t_now)
            if t is None:
                continue
            if best_t is None or t < best_t:
                best_t, best_r = t, r
        if best_r < 0:
            raise EngineError("no finite saturation time for the remaining players")
        batch = [i for i in users[best_r] if is_active[i]]
        for i in batch:
            bps, vals, slopes = tables[i]
            j = bisect_right(bps, best_t) - 1
            bandwidths[i] = vals[j] + slopes[j] * (best_t - bps[j])
            times[i] = best_t
            is_active[i] = False
        remaining -= len(batch)
        if pending is not None:
            for i in batch:
                if i in pending:
                    if bandwidths[i] <= pending[i]:
                        return False
                    del pending[i]
            if not pending:
                return True
        for i in batch:
            for r in state[i]:
                resid[r] -= bandwidths[i]
                if resid[r] < 0:
                    raise EngineError(f"negative residual on resource {r}")
        rounds.append(FixRound(best_t, tuple(batch), best_r))
        if len(rounds) > len(used):
            raise EngineError("more fixing rounds than resources")
        t_now = best_t
    if pending is not None:
        return not pending
    return bandwidths, times, rounds, resid


def progressive_fill(
    instance: GameInstance,
    state: State,
    *,
    nonstandard: bool = False,
    check_state: bool = True,
) -> AllocationResult:
    """Run progressive filling on a state and return the full outcome.

    Rate functions declared non-monotone are rejected unless
    ``nonstandard=True`` is passed.  States touching resources outside the
    instance (or strategies outside the strategy sets) are rejected unless
    ``check_state=False``.
    """
    if not nonstandard and not instance.all_monotone:
        raise EngineError(
            "instance has non-monotone rate functions; pass nonstandard=True"
        )
    if check_state:
        _check_state(instance, state)
    if instance.all_constant:
        bandwidths, times, rounds, resid = _run_constant(instance, state, None)
    else:
        bandwidths, times, rounds, resid = _run_generic(instance, state, None)

    saturation = [None] * instance.num_resources
    for rnd in rounds:
        if saturation[rnd.resource] is None:
            saturation[rnd.resource] = rnd.time
    users = _users_by_resource(instance, state)
    tables = [rate.table for rate in instance.rates]
    for r, leftover in resid.items():
        if saturation[r] is None and leftover == 0:
            capped = [
                _capped_table(tables[i], times[i], bandwidths[i]) for i in users[r]
            ]
            saturation[r] = _first_hit(capped, instance.capacities[r], ZERO)
    return AllocationResult(
        bandwidths=tuple(bandwidths),
        finishing_times=tuple(times),
        saturation_times=tuple(saturation),
        fix_rounds=tuple(rounds),
    )


def probe_base_constant(instance: GameInstance, state: State, coalition):
    """Non-members' per-resource loads, reused across a coalition's probes."""
    nums = instance._integer_rate_scale[1]
    members = set(coalition)
    base_weight: dict = {}
    base_users: dict = {}
    for i, strat in enumerate(state):
        if i in members:
            continue
        wi = nums[i]
        for r in strat:
            if r in base_weight:
                base_weight[r] += wi
                base_users[r].append(i)
            else:
                base_weight[r] = wi
                base_users[r] = [i]
    return base_weight, base_users


def probe_constant(
    instance: GameInstance, state: State, coalition, choice, watched_pairs, base
) -> bool:
    """Constant-rate deviation probe against a precomputed base profile.

    ``watched_pairs`` maps players to thresholds as (numerator, denominator)
    pairs.  Equivalent to ``improves_all`` on the deviated state; fixing
    order inside saturation ties is arbitrary here, which is sound because
    the bandwidth vector is tie-order independent.  All arithmetic stays on
    plain integers.
    """
    scale, nums = instance._integer_rate_scale
    cap_pairs = instance._capacity_pairs
    base_weight, base_users = base
    weight = dict(base_weight)
    musers: dict = {}
    strat_of: dict = {}
    for j, i in enumerate(coalition):
        wi = nums[i]
        strat_of[i] = choice[j]
        for r in choice[j]:
            if r in weight:
                weight[r] += wi
            else:
                weight[r] = wi
            if r in musers:
                musers[r].append(i)
            else:
                musers[r] = [i]
    resid: dict = {}
    n = instance.num_players
    is_active = [True] * n
    remaining = n
    pending = dict(watched_pairs)
    while remaining:
        best_n = best_d = 0
        best_r = -1
        for r, w in weight.items():
            if w == 0:
                continue
            rn, rd = resid.get(r) or cap_pairs[r]
            tn = rn * scale
            td = rd * w
            if best_r < 0 or tn * best_d < best_n * td:
                best_n, best_d, best_r = tn, td, r
        if best_r < 0:
            raise EngineError("no finite saturation time for the remaining players")
        batch = [i for i in base_users.get(best_r, ()) if is_active[i]]
        batch += [i for i in musers.get(best_r, ()) if is_active[i]]
        for i in batch:
            is_active[i] = False
            if i in pending:
                tn, td = pending[i]
                # nums[i] * best_n / (best_d * scale) <= tn / td ?
                if nums[i] * best_n * td <= tn * best_d * scale:
                    return False
                del pending[i]
        if not pending:
            return True
        remaining -= len(batch)
        for i in batch:
            bn = nums[i] * best_n
            bd = best_d * scale
            strat = strat_of[i] if i in strat_of else state[i]
            for r in strat:
                rn, rd = resid.get(r) or cap_pairs[r]
                nn = rn * bd - bn * rd
                if nn < 0:
                    raise EngineError(f"negative residual on resource {r}")
                nd = rd * bd
                g = gcd(nn, nd)
                if g > 1:
                    nn //= g
                    nd //= g
                resid[r] = (nn, nd)
                weight[r] -= nums[i]
    return not pending


def improves_all(
    instance: GameInstance, state: State, watched: Dict[int, Fraction]
) -> bool:
    """True iff filling ``state`` gives every watched player strictly more
    than its threshold.  Aborts as soon as the answer is decided; used as
    the inner loop of deviation scans.  Monotone rates only.
    """
    if not instance.all_monotone:
        raise EngineError("improvement probe requires monotone rates")
    if not watched:
        return False
    if instance.all_constant:
        return _run_constant(instance, state, watched)
    return _run_generic(instance, state, watched)


def potential_vector(
    instance: GameInstance, state: State, *, nonstandard: bool = False
) -> PotentialVector:
    """Finishing times sorted in non-decreasing order.

    Strictly increases lexicographically under every improving coalition
    move, which is what makes improvement dynamics terminate.
    """
    result = progressive_fill(instance, state, nonstandard=nonstandard)
    return tuple(sorted(result.finishing_times))


def social_welfare(result: AllocationResult) -> Fraction:
    """Total allocated bandwidth."""
    return sum(result.bandwidths, ZERO)


def utility_to_rate(utility: RateFunction) -> RateFunction:
    """Allocation rate realizing utility max-min fairness for one player.

    The utility function is given by its piecewise-constant slope (same
    shape as a rate function): strictly increasing, U(0) = 0, unbounded.
    Filling at the returned rate (the derivative of the exact inverse of U,
    taken right-continuous at breakpoints) equalizes utilities over time,
    so freezing by resource saturation yields a utility max-min fair
    allocation.  Linear U(x) = x recovers plain max-min fairness.
    """
    if any(slope <= 0 for _, slope in utility.pieces):
        raise ValueError("utility must be strictly increasing (all slopes positive)")
    if utility.pieces[0][0] != 0:
        raise ValueError("utility must be defined from 0")
    bps, vals, slopes = utility.table
    out = tuple((vals[j], Fraction(1) / slopes[j]) for j in range(len(bps)))
    return RateFunction(pieces=out, monotone=True)
