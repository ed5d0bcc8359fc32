"""Seeded random instance suites shared by the property and acceptance tests.

All randomness flows from the published seeds below through
``random.Random``, so every run sees exactly the same instances.
"""

import random
from fractions import Fraction

from fillgames import (
    Arc,
    ExplicitSpace,
    GameInstance,
    NetworkSpace,
    RateFunction,
    Resource,
    mcap_exact,
    validate_instance,
)

SEED_MONOTONE = 202608_01
SEED_SYMMETRIC = 202608_02
SEED_SYMMETRIC_N2 = 202608_03
SEED_SINGLETON = 202608_04
SEED_NETWORKS = 202608_05
SEED_DESIGN = 202608_06

_POSITIVE = [Fraction(n, d) for n in range(1, 11) for d in (1, 2, 3, 10)]
_BREAKPOINTS = [Fraction(1, 2), Fraction(1), Fraction(3, 2), Fraction(2), Fraction(3)]


def _capacity(rng, zero_chance=Fraction(1, 20)):
    if rng.random() < zero_chance:
        return Fraction(0)
    return rng.choice(_POSITIVE)


def _monotone_rate(rng):
    if rng.random() < 0.6:
        return RateFunction.constant(rng.choice(_POSITIVE))
    count = rng.randint(2, 3)
    breakpoints = [Fraction(0)] + sorted(rng.sample(_BREAKPOINTS, count - 1))
    rates = []
    for j in range(count):
        if j < count - 1 and rng.random() < 0.2:
            rates.append(Fraction(0))  # flat stretches stress the root scan
        else:
            rates.append(rng.choice(_POSITIVE))
    return RateFunction.from_pairs(zip(breakpoints, rates))


def _strategy_list(rng, m, count, singleton=False):
    out = []
    for _ in range(count * 3):
        if len(out) == count:
            break
        size = 1 if singleton else rng.randint(1, min(3, m))
        strat = tuple(sorted(rng.sample(range(m), size)))
        if strat not in out:
            out.append(strat)
    return tuple(out)


def random_explicit(
    rng,
    max_n=4,
    max_m=6,
    rate_kind="monotone",
    symmetric=False,
    singleton=False,
    min_n=1,
):
    n = rng.randint(min_n, max_n)
    m = rng.randint(1, max_m)
    resources = tuple(Resource(i, _capacity(rng)) for i in range(m))
    if symmetric:
        shared = _strategy_list(rng, m, rng.randint(2, 4), singleton)
        strategies = (shared,) * n
    else:
        strategies = tuple(
            _strategy_list(rng, m, rng.randint(1, 3), singleton) for _ in range(n)
        )
    if rate_kind == "uniform":
        rates = (RateFunction.constant(1),) * n
    elif rate_kind == "constant":
        rates = tuple(RateFunction.constant(rng.choice(_POSITIVE)) for _ in range(n))
    else:
        rates = tuple(_monotone_rate(rng) for _ in range(n))
    return validate_instance(
        GameInstance(num_players=n, resources=resources, space=ExplicitSpace(strategies), rates=rates)
    )


def monotone_suite(count=1000, seed=SEED_MONOTONE):
    rng = random.Random(seed)
    return [random_explicit(rng, rate_kind="monotone") for _ in range(count)]


def symmetric_uniform_suite(count=200, seed=SEED_SYMMETRIC):
    rng = random.Random(seed)
    return [
        random_explicit(rng, rate_kind="uniform", symmetric=True, min_n=1)
        for _ in range(count)
    ]


def symmetric_uniform_n2_suite(count=60, seed=SEED_SYMMETRIC_N2):
    rng = random.Random(seed)
    return [
        random_explicit(rng, max_n=2, min_n=2, rate_kind="uniform", symmetric=True)
        for _ in range(count)
    ]


def singleton_suite(count=120, seed=SEED_SINGLETON):
    rng = random.Random(seed)
    return [
        random_explicit(rng, rate_kind="constant", singleton=True) for _ in range(count)
    ]


def random_network(rng, players=3, max_arcs=8):
    nodes = rng.randint(3, 5)
    arcs = []
    caps = []
    for j in range(nodes - 1):  # a spine guarantees source-sink connectivity
        arcs.append((j, j + 1))
        caps.append(rng.choice(_POSITIVE))
    extra = rng.randint(0, max_arcs - len(arcs))
    for _ in range(extra):
        tail = rng.randint(0, nodes - 2)
        head = rng.randint(tail + 1, nodes - 1)
        arcs.append((tail, head))
        caps.append(rng.choice(_POSITIVE))
    resources = tuple(Resource(i, caps[i]) for i in range(len(arcs)))
    space = NetworkSpace(
        arcs=tuple(Arc(i, t, h) for i, (t, h) in enumerate(arcs)),
        endpoints=((0, nodes - 1),) * players,
    )
    return validate_instance(
        GameInstance(
            num_players=players,
            resources=resources,
            space=space,
            rates=(RateFunction.constant(1),) * players,
        )
    )


def network_suite(count=50, seed=SEED_NETWORKS, players=3, max_arcs=8):
    rng = random.Random(seed)
    return [random_network(rng, players=players, max_arcs=max_arcs) for _ in range(count)]


def design_suite(count=50, seed=SEED_DESIGN):
    """Instances whose exact MCAP optimum is strictly positive everywhere."""
    rng = random.Random(seed)
    out = []
    attempts = 0
    while len(out) < count:
        attempts += 1
        if attempts > 60 * count:
            raise RuntimeError("design suite generation stalled")
        inst = random_explicit(
            rng, max_n=3, min_n=2, max_m=5, rate_kind="uniform"
        )
        if any(c == 0 for c in inst.capacities):
            continue
        optimum = mcap_exact(inst).mcap
        if all(a > 0 for a in optimum.allocation):
            out.append((inst, optimum))
    return out
