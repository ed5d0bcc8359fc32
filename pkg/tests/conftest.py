import sys
from fractions import Fraction
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from fillgames import (
    Arc,
    ExplicitSpace,
    GameInstance,
    NetworkSpace,
    RateFunction,
    Resource,
    canonical_strategy,
    validate_instance,
)

UNIT = RateFunction.constant(1)


def make_explicit(n, caps, strategies, rates=None):
    """Explicit-space instance from plain literals; validates."""
    return validate_instance(
        GameInstance(
            num_players=n,
            resources=tuple(Resource(i, Fraction(c)) for i, c in enumerate(caps)),
            space=ExplicitSpace(
                tuple(tuple(canonical_strategy(s) for s in lst) for lst in strategies)
            ),
            rates=tuple(rates) if rates else (UNIT,) * n,
        )
    )


def make_network(n, arcs, caps, endpoints, rates=None):
    """Network-space instance from (tail, head) arc literals; validates."""
    return validate_instance(
        GameInstance(
            num_players=n,
            resources=tuple(Resource(i, Fraction(c)) for i, c in enumerate(caps)),
            space=NetworkSpace(
                arcs=tuple(Arc(i, t, h) for i, (t, h) in enumerate(arcs)),
                endpoints=tuple(endpoints),
            ),
            rates=tuple(rates) if rates else (UNIT,) * n,
        )
    )
