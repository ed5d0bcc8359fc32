"""Independent reference implementations used only by the tests.

These deliberately share no code with the package: a fixed-step forward
simulation of the filling process, a recursive path counter, brute-force
packing and best-response scans, and an LP oracle that enumerates basis
vertices with exact Gaussian elimination.
"""

from fractions import Fraction
from itertools import combinations, product

ZERO = Fraction(0)


def rate_at(rate_fn, t):
    value = rate_fn.pieces[0][1]
    for bp, rate in rate_fn.pieces:
        if bp <= t:
            value = rate
        else:
            break
    return value


def simulate_fill(instance, state, dt=Fraction(1, 1000), max_steps=200_000):
    """Forward-simulate progressive filling on a fixed time grid.

    Players advance by rate * dt each step; when a resource's total pour
    meets or exceeds its capacity, its active users freeze at their
    end-of-step level.  Bandwidths agree with the exact engine to within
    one step.
    """
    n = instance.num_players
    caps = list(instance.capacities)
    users = {}
    for i, strat in enumerate(state):
        for r in strat:
            users.setdefault(r, []).append(i)
    bandwidth = [ZERO] * n
    active = set(range(n))
    t = ZERO
    # zero-capacity resources freeze their users immediately
    for r, lst in users.items():
        if caps[r] == 0:
            for i in lst:
                active.discard(i)
    steps = 0
    while active:
        steps += 1
        if steps > max_steps:
            raise RuntimeError("simulation horizon exceeded")
        for i in active:
            bandwidth[i] += rate_at(instance.rates[i], t) * dt
        t += dt
        frozen = set()
        for r, lst in users.items():
            pour = sum(bandwidth[i] for i in lst)
            if pour >= caps[r]:
                frozen.update(i for i in lst if i in active)
        active -= frozen
    return bandwidth, t


def count_paths(arc_list, source, sink):
    """Number of simple source-sink paths; arc_list holds (tail, head)."""
    adjacency = {}
    for tail, head in arc_list:
        adjacency.setdefault(tail, []).append(head)

    def walk(node, seen):
        if node == sink:
            return 1
        total = 0
        for nxt in adjacency.get(node, []):
            if nxt not in seen:
                total += walk(nxt, seen | {nxt})
        return total

    return walk(source, frozenset([source]))


def brute_pack(strategy_lists, bounds):
    """First state satisfying the per-resource count bounds, by full scan."""
    for state in product(*strategy_lists):
        counts = {}
        for strat in state:
            for r in strat:
                counts[r] = counts.get(r, 0) + 1
        if all(c <= bounds[r] for r, c in counts.items()):
            return state
    return None


def exhaustive_best_response(instance, state, player):
    """Best response by filling every alternative directly."""
    from fillgames import enumerate_strategies, progressive_fill

    best = None
    best_value = None
    for strat in enumerate_strategies(instance, player):
        probe = state[:player] + (strat,) + state[player + 1 :]
        value = progressive_fill(instance, probe, check_state=False).bandwidths[player]
        if best_value is None or value > best_value:
            best, best_value = strat, value
    return best, best_value


def solve_linear(matrix, rhs):
    """Solve a square rational system by Gaussian elimination; None if singular."""
    size = len(matrix)
    a = [list(row) + [rhs[i]] for i, row in enumerate(matrix)]
    for col in range(size):
        pivot = next((r for r in range(col, size) if a[r][col] != 0), None)
        if pivot is None:
            return None
        a[col], a[pivot] = a[pivot], a[col]
        inv = a[col][col]
        a[col] = [v / inv for v in a[col]]
        for r in range(size):
            if r != col and a[r][col] != 0:
                factor = a[r][col]
                a[r] = [v - factor * p for v, p in zip(a[r], a[col])]
    return [a[r][size] for r in range(size)]


def lp_vertex_max(rows, rhs, nvars):
    """Maximize sum(x) over rows.x <= rhs, x >= 0 by vertex enumeration.

    Returns (value, lexicographically greatest optimal vertex).
    """
    constraints = [list(row) for row in rows]
    bounds = list(rhs)
    for i in range(nvars):  # x_i >= 0 as -x_i <= 0
        row = [ZERO] * nvars
        row[i] = Fraction(-1)
        constraints.append(row)
        bounds.append(ZERO)
    best = None
    for chosen in combinations(range(len(constraints)), nvars):
        point = solve_linear(
            [constraints[c] for c in chosen], [bounds[c] for c in chosen]
        )
        if point is None:
            continue
        if any(
            sum(c * x for c, x in zip(constraints[j], point)) > bounds[j]
            for j in range(len(constraints))
        ):
            continue
        key = (sum(point, ZERO), tuple(point))
        if best is None or key > best:
            best = key
    assert best is not None, "the LP has a feasible vertex (x = 0)"
    return best[0], list(best[1])
