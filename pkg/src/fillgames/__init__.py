"""Exact-arithmetic engine for routing games with progressive filling.

Waterfilling allocations for piecewise-constant allocation rates, pure
Nash and strong equilibrium computation and verification (including the
dual greedy algorithm with strategy-packing oracles), equilibrium quality
metrics against exact optima, and generators for the standard lower-bound
constructions -- all over exact rationals.
"""

from fractions import Fraction as Rational

from .core import (
    Arc,
    ExplicitSpace,
    GameInstance,
    NetworkSpace,
    RateFunction,
    Resource,
    State,
    Strategy,
    canonical_strategy,
    enumerate_strategies,
    validate_instance,
)
from .equilibrium import (
    DeviationWitness,
    DynamicsStep,
    DynamicsTrace,
    best_response,
    find_pne_brute,
    improvement_dynamics,
    is_nash,
    is_strong_equilibrium,
    single_resource_bandwidth,
)
from .errors import (
    BudgetExceededError,
    EngineError,
    EnumerationOverflowError,
    FillgamesError,
    StepLimitError,
    ValidationError,
)
from .harness import (
    FAMILIES,
    Generated,
    GeneratorParams,
    PriceReport,
    generate,
    price_metrics,
)
from .optimum import (
    ExactOptima,
    McapSolution,
    RateProfile,
    design_rates,
    mcap_exact,
    mcap_for_state,
    stabilize,
    three_splittable_approx,
    uniform_mcap,
)
from .packing import (
    DualGreedyResult,
    FixBatch,
    PackingBounds,
    dual_greedy,
    pack_explicit,
    pack_network,
)
from .waterfill import (
    AllocationResult,
    FixRound,
    PotentialVector,
    potential_vector,
    progressive_fill,
    social_welfare,
    utility_to_rate,
)

__all__ = [
    "AllocationResult",
    "Arc",
    "BudgetExceededError",
    "DeviationWitness",
    "DualGreedyResult",
    "DynamicsStep",
    "DynamicsTrace",
    "EngineError",
    "EnumerationOverflowError",
    "ExactOptima",
    "ExplicitSpace",
    "FAMILIES",
    "FillgamesError",
    "FixBatch",
    "FixRound",
    "GameInstance",
    "Generated",
    "GeneratorParams",
    "McapSolution",
    "NetworkSpace",
    "PackingBounds",
    "PotentialVector",
    "PriceReport",
    "RateFunction",
    "RateProfile",
    "Rational",
    "Resource",
    "State",
    "StepLimitError",
    "Strategy",
    "ValidationError",
    "best_response",
    "canonical_strategy",
    "design_rates",
    "dual_greedy",
    "enumerate_strategies",
    "find_pne_brute",
    "generate",
    "improvement_dynamics",
    "is_nash",
    "is_strong_equilibrium",
    "mcap_exact",
    "mcap_for_state",
    "pack_explicit",
    "pack_network",
    "potential_vector",
    "price_metrics",
    "progressive_fill",
    "single_resource_bandwidth",
    "social_welfare",
    "stabilize",
    "three_splittable_approx",
    "uniform_mcap",
    "utility_to_rate",
    "validate_instance",
]
