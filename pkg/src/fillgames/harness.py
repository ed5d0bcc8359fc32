"""Instance generators for the lower-bound constructions, plus
price-of-anarchy / price-of-stability metrics over exhaustive state scans.

Families (CLI letters in parentheses):

(a) multi-commodity chain with a zero-capacity shortcut: the unique Nash
    state squeezes everyone onto the chain, welfare 2n/(n+2), while the
    altruistic optimum reaches n/2.
(b) symmetric singleton game with n-1 parallel links of capacity 1-eps and
    one of capacity n: all players pool on the big link in equilibrium.
(c) k gadgets of n parallel rows: a partitioned snake state resists all
    coalitions of size <= k yet wastes a factor n/k of the optimum.
(d) binary counter: n/2 chained two-link gadgets whose residual capacities
    the n/2 entry players can set to any bit pattern; entry players always
    receive exactly their entry capacity 2^(i-1).
(e) two players with one dipping (non-monotone) aggregated rate and three
    resources sized so that every one of the four states admits a
    profitable unilateral move: no pure Nash equilibrium exists.
(f) a single gadget from family (c) with capacities 1/1+eps and one fast
    player: constant rates force a price of stability of at least
    n/(1+2 eps).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Dict, Optional

from .core import (
    Arc,
    ExplicitSpace,
    GameInstance,
    NetworkSpace,
    RateFunction,
    Resource,
    State,
    canonical_strategy,
    validate_instance,
)
from .equilibrium import _first_improving, is_nash
from .errors import BudgetExceededError, EngineError, ValidationError
from .optimum import mcap_exact
from .waterfill import progressive_fill, social_welfare

ZERO = Fraction(0)
ONE = Fraction(1)

FAMILIES = ("a", "b", "c", "d", "e", "f")


@dataclass(frozen=True)
class GeneratorParams:
    """Family tag plus the construction's parameters (all exact)."""

    family: str
    n: Optional[int] = None
    k: Optional[int] = None
    eps: Fraction = Fraction(1, 10)
    t1: Fraction = Fraction(1)
    t2: Fraction = Fraction(6, 5)
    rho: Fraction = Fraction(1)
    dip: Fraction = Fraction(1, 10)


@dataclass
class Generated:
    """A generated instance plus the states the construction names."""

    instance: GameInstance
    states: Dict[str, State] = field(default_factory=dict)


def _uniform(n: int) -> tuple:
    return (RateFunction.constant(1),) * n


def _require(cond: bool, message: str, bad: list) -> None:
    if not cond:
        bad.append(message)


def _family_a(params: GeneratorParams) -> Generated:
    bad: list = []
    n = params.n
    _require(n is not None and n >= 2, "family a requires n >= 2", bad)
    if not bad:
        _require(n % 2 == 0, "family a requires an even n", bad)
    if bad:
        raise ValidationError(bad)
    half = n // 2
    arcs = [Arc(j, j, j + 1) for j in range(half)]
    arcs.append(Arc(half, 0, half))
    resources = [Resource(j, ONE) for j in range(half)] + [Resource(half, ZERO)]
    endpoints = [(i, i + 1) for i in range(half)] + [(0, half)] * half
    inst = GameInstance(
        num_players=n,
        resources=tuple(resources),
        space=NetworkSpace(arcs=tuple(arcs), endpoints=tuple(endpoints)),
        rates=_uniform(n),
    )
    chain = canonical_strategy(range(half))
    shortcut = (half,)
    singles = [(i,) for i in range(half)]
    states = {
        "unique_pne": tuple(singles) + (chain,) * half,
        "altruistic_optimum": tuple(singles) + (shortcut,) * half,
    }
    return Generated(validate_instance(inst), states)


def _family_b(params: GeneratorParams) -> Generated:
    bad: list = []
    n, eps = params.n, params.eps
    _require(n is not None and n >= 2, "family b requires n >= 2", bad)
    _require(0 < params.eps <= 1, "family b requires eps in (0, 1]", bad)
    if bad:
        raise ValidationError(bad)
    arcs = tuple(Arc(j, 0, 1) for j in range(n))
    resources = tuple(
        Resource(j, ONE - eps if j < n - 1 else Fraction(n)) for j in range(n)
    )
    inst = GameInstance(
        num_players=n,
        resources=resources,
        space=NetworkSpace(arcs=arcs, endpoints=((0, 1),) * n),
        rates=_uniform(n),
    )
    states = {
        "pne": ((n - 1,),) * n,
        "spread_optimum": tuple((i,) for i in range(n)),
    }
    return Generated(validate_instance(inst), states)


def _family_c(params: GeneratorParams) -> Generated:
    bad: list = []
    n, k = params.n, params.k
    _require(n is not None and n >= 1, "family c requires n >= 1", bad)
    _require(k is not None and k >= 1, "family c requires k >= 1", bad)
    if not bad:
        _require(k <= n and n % k == 0, "family c requires k dividing n", bad)
    if bad:
        raise ValidationError(bad)

    # Node ids: u_1..u_{k+1} then v/w grids.
    node = {}

    def nid(label):
        if label not in node:
            node[label] = len(node)
        return node[label]

    for i in range(1, k + 2):
        nid(("u", i))
    arcs = []
    caps = []

    def add(tail, head):
        arcs.append(Arc(len(arcs), nid(tail), nid(head)))
        caps.append(ONE)

    entry = {}
    middle = {}
    exit_ = {}
    for j in range(1, n + 1):  # row-major so disjoint row paths come first
        for i in range(1, k + 1):
            entry[i, j] = len(arcs)
            add(("u", i), ("v", i, j))
            middle[i, j] = len(arcs)
            add(("v", i, j), ("w", i, j))
            exit_[i, j] = len(arcs)
            add(("w", i, j), ("u", i + 1))
    snake = {}
    for i in range(1, k + 1):
        for j in range(1, n):
            snake[i, j] = len(arcs)
            add(("w", i, j), ("v", i, j + 1))
    cross_in = {}
    for i in range(2, k + 1):
        cross_in[i] = len(arcs)
        add(("u", 1), ("v", i, 1))
    cross_out = {}
    for i in range(1, k):
        cross_out[i] = len(arcs)
        add(("w", i, n), ("u", k + 1))

    resources = tuple(Resource(a.id, caps[a.id]) for a in arcs)
    source, sink = nid(("u", 1)), nid(("u", k + 1))
    inst = GameInstance(
        num_players=n,
        resources=resources,
        space=NetworkSpace(arcs=tuple(arcs), endpoints=((source, sink),) * n),
        rates=_uniform(n),
    )

    def snake_path(i):
        ids = [entry[i, 1] if i == 1 else cross_in[i]]
        for j in range(1, n + 1):
            ids.append(middle[i, j])
            if j < n:
                ids.append(snake[i, j])
        ids.append(exit_[i, n] if i == k else cross_out[i])
        return canonical_strategy(ids)

    def row_path(j):
        ids = []
        for i in range(1, k + 1):
            ids.extend((entry[i, j], middle[i, j], exit_[i, j]))
        return canonical_strategy(ids)

    group_size = n // k
    states = {
        "kse": tuple(snake_path(p // group_size + 1) for p in range(n)),
        "disjoint_optimum": tuple(row_path(p + 1) for p in range(n)),
    }
    return Generated(validate_instance(inst), states)


def _family_d(params: GeneratorParams) -> Generated:
    bad: list = []
    n = params.n
    _require(n is not None and n >= 2, "family d requires n >= 2", bad)
    if not bad:
        _require(n % 2 == 0, "family d requires an even n", bad)
    if bad:
        raise ValidationError(bad)
    half = n // 2
    big = Fraction(2) ** (half + 1)
    arcs = []
    caps = []
    for j in range(half):  # chain nodes are 0..half
        arcs.append(Arc(len(arcs), j, j + 1))
        caps.append(big)
        arcs.append(Arc(len(arcs), j, j + 1))
        caps.append(big + 1)
    for i in range(half):  # entry arcs from source nodes half+1+i
        arcs.append(Arc(len(arcs), half + 1 + i, 0))
        caps.append(Fraction(2) ** i)
    endpoints = [(half + 1 + i, half) for i in range(half)]
    endpoints += [(j, j + 1) for j in range(half)]
    resources = tuple(Resource(a.id, caps[a.id]) for a in arcs)
    inst = GameInstance(
        num_players=n,
        resources=resources,
        space=NetworkSpace(arcs=tuple(arcs), endpoints=tuple(endpoints)),
        rates=_uniform(n),
    )
    return Generated(validate_instance(inst), {})


def _family_e(params: GeneratorParams) -> Generated:
    bad: list = []
    t1, t2, rho, dip = params.t1, params.t2, params.rho, params.dip
    _require(t1 > 0, "family e requires t1 > 0", bad)
    _require(t2 > t1, "family e requires t2 > t1", bad)
    _require(0 < dip <= t1, "family e requires dip in (0, t1]", bad)
    if t2 > t1:
        _require(
            rho >= 1 and rho >= dip / (t2 - t1),
            "family e requires rho to bound both slopes (rho >= max(1, dip/(t2-t1)))",
            bad,
        )
    _require(
        t2 < t1 + t1 / (rho + 1),
        "family e requires t2 < t1 + V(t1)/(rho+1)",
        bad,
    )
    if bad:
        raise ValidationError(bad)
    dipping = RateFunction.from_pairs(
        [(ZERO, ONE), (t1, -dip / (t2 - t1)), (t2, ONE)], monotone=False
    )
    steady = RateFunction.constant(rho + 1)
    c_shared = (rho + 1) * t1 + t1
    c_third = (rho + 1) * t2 + (t1 - dip)
    inst = GameInstance(
        num_players=2,
        resources=(Resource(0, c_shared), Resource(1, c_shared), Resource(2, c_third)),
        space=ExplicitSpace((((0, 2), (1, 2)),) * 2),
        rates=(dipping, steady),
    )
    return Generated(validate_instance(inst), {})


def _family_f(params: GeneratorParams) -> Generated:
    bad: list = []
    n, eps = params.n, params.eps
    _require(n is not None and n >= 2, "family f requires n >= 2", bad)
    _require(0 < params.eps <= 1, "family f requires eps in (0, 1]", bad)
    if bad:
        raise ValidationError(bad)
    source, sink = 0, 2 * n + 1
    v = lambda j: j
    w = lambda j: n + j
    arcs = []
    caps = []

    def add(tail, head, cap):
        arcs.append(Arc(len(arcs), tail, head))
        caps.append(cap)

    for j in range(1, n + 1):
        add(source, v(j), ONE + eps if j == 1 else ONE)
        add(v(j), w(j), ONE + eps)
        add(w(j), sink, ONE + eps if j == n else ONE)
    for j in range(1, n):
        add(w(j), v(j + 1), ONE + eps)
    resources = tuple(Resource(a.id, caps[a.id]) for a in arcs)
    rates = (RateFunction.constant(1),) + (RateFunction.constant(eps / n),) * (n - 1)
    inst = GameInstance(
        num_players=n,
        resources=resources,
        space=NetworkSpace(arcs=tuple(arcs), endpoints=((source, sink),) * n),
        rates=rates,
    )
    rows = {
        p: canonical_strategy((3 * p, 3 * p + 1, 3 * p + 2)) for p in range(n)
    }
    return Generated(validate_instance(inst), {"disjoint": tuple(rows[p] for p in range(n))})


_BUILDERS = {
    "a": _family_a,
    "b": _family_b,
    "c": _family_c,
    "d": _family_d,
    "e": _family_e,
    "f": _family_f,
}


def generate(params: GeneratorParams) -> Generated:
    """Build the requested construction with exact capacities and rates."""
    builder = _BUILDERS.get(params.family)
    if builder is None:
        raise ValidationError(
            [f"unknown family {params.family!r} (expected one of {', '.join(FAMILIES)})"]
        )
    return builder(params)


@dataclass
class PriceReport:
    """Equilibrium-quality metrics from an exhaustive state scan.

    Ratios are None when no equilibrium exists, or when an equilibrium has
    zero welfare against a positive optimum (an infinite ratio).
    """

    basis: str
    kind: str
    coalition_size: Optional[int]
    opt_value: Fraction
    opt_state: Optional[State]
    opt_allocation: Optional[tuple]
    best_value: Optional[Fraction]
    best_state: Optional[State]
    worst_value: Optional[Fraction]
    worst_state: Optional[State]
    pos: Optional[Fraction]
    poa: Optional[Fraction]
    equilibrium_count: int
    state_count: int

    @property
    def no_equilibrium(self) -> bool:
        return self.equilibrium_count == 0


def _ratio(opt: Fraction, eq: Optional[Fraction]) -> Optional[Fraction]:
    if eq is None:
        return None
    if eq == 0:
        return ONE if opt == 0 else None
    return opt / eq


def price_metrics(
    instance: GameInstance,
    basis: str = "mcap",
    kind: str = "pne",
    coalition_size: Optional[int] = None,
    *,
    budget: int = 10**6,
) -> PriceReport:
    """Classify every state, then compare equilibrium welfare to the optimum.

    ``basis`` picks the optimum: "pf" is the best waterfilling welfare over
    all states, "mcap" the exact maximum capacity allocation.  ``kind``
    picks the equilibrium notion: "pne", "se", or "kse" with
    ``coalition_size``.
    """
    if basis not in ("pf", "mcap"):
        raise ValueError(f"unknown basis {basis!r}")
    n = instance.num_players
    if kind == "pne":
        k = 1
    elif kind == "se":
        k = n
    elif kind == "kse":
        if coalition_size is None or coalition_size < 1:
            raise ValueError("kind 'kse' needs a positive coalition_size")
        k = min(coalition_size, n)
    else:
        raise ValueError(f"unknown equilibrium kind {kind!r}")

    lists = instance.strategy_lists
    total = 1
    for lst in lists:
        total *= len(lst)
    if total > budget:
        raise BudgetExceededError(budget, "enumerating states for price metrics")
    if k > 1 and not instance.all_monotone:
        raise EngineError("coalition equilibria require monotone rates")

    nonstandard = not instance.all_monotone
    pf_value: Optional[Fraction] = None
    pf_state: Optional[State] = None
    best_value = worst_value = None
    best_state = worst_state = None
    eq_count = 0
    for state in product(*lists):
        result = progressive_fill(
            instance, state, nonstandard=nonstandard, check_state=False
        )
        welfare = social_welfare(result)
        if pf_value is None or welfare > pf_value:
            pf_value, pf_state = welfare, state
        ok, _ = is_nash(instance, state, budget=budget)
        if ok and k > 1:
            ok = (
                _first_improving(instance, state, k, budget, current=result, min_size=2)
                is None
            )
        if ok:
            eq_count += 1
            if best_value is None or welfare > best_value:
                best_value, best_state = welfare, state
            if worst_value is None or welfare < worst_value:
                worst_value, worst_state = welfare, state

    if basis == "pf":
        opt_value, opt_state, opt_alloc = pf_value, pf_state, None
    else:
        solution = mcap_exact(instance, budget=budget).mcap
        opt_value, opt_state, opt_alloc = (
            solution.value,
            solution.state,
            solution.allocation,
        )
    return PriceReport(
        basis=basis,
        kind=kind,
        coalition_size=coalition_size if kind == "kse" else None,
        opt_value=opt_value,
        opt_state=opt_state,
        opt_allocation=opt_alloc,
        best_value=best_value,
        best_state=best_state,
        worst_value=worst_value,
        worst_state=worst_state,
        pos=_ratio(opt_value, best_value),
        poa=_ratio(opt_value, worst_value),
        equilibrium_count=eq_count,
        state_count=total,
    )
