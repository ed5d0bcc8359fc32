"""JSON documents: the instance file format and result serialization.

Rationals travel as strings ("3", "9/10"); plain JSON integers are also
accepted on input, floats never (they are not exact).  States serialize as
arrays of resource-id arrays.  Unknown top-level keys in instance
documents are ignored so generated files may carry extra metadata
(named states, provenance) without breaking round trips.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional

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
from .equilibrium import DeviationWitness, DynamicsTrace
from .errors import ValidationError
from .harness import PriceReport
from .optimum import ExactOptima, McapSolution
from .packing import DualGreedyResult
from .waterfill import AllocationResult


def parse_rational(value) -> Fraction:
    if isinstance(value, bool):
        raise ValidationError([f"expected a rational, got boolean {value}"])
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationError([f"bad rational literal {value!r}: {exc}"]) from exc
    if isinstance(value, float):
        raise ValidationError(
            [f"floating point value {value!r} rejected; use a 'p/q' string"]
        )
    raise ValidationError([f"expected a rational, got {type(value).__name__}"])


def format_rational(value: Fraction) -> str:
    return str(value)


def _opt_rational(value: Optional[Fraction]):
    return None if value is None else format_rational(value)


# ---------------------------------------------------------------- instances


def instance_to_doc(instance: GameInstance) -> dict:
    space = instance.space
    if isinstance(space, ExplicitSpace):
        space_doc = {"explicit": [[list(s) for s in lst] for lst in space.strategies]}
    else:
        space_doc = {
            "network": {
                "arcs": [{"id": a.id, "from": a.tail, "to": a.head} for a in space.arcs],
                "endpoints": [[s, t] for s, t in space.endpoints],
            }
        }
    return {
        "players": instance.num_players,
        "resources": [
            {"id": r.id, "capacity": format_rational(r.capacity)}
            for r in instance.resources
        ],
        "space": space_doc,
        "rates": [
            {
                "pieces": [[format_rational(t), format_rational(v)] for t, v in rate.pieces],
                "monotone": rate.monotone,
            }
            for rate in instance.rates
        ],
    }


def _parse_space(doc, num_players):
    if not isinstance(doc, dict) or len(doc.keys() & {"explicit", "network"}) != 1:
        raise ValidationError(["space must be {'explicit': ...} or {'network': ...}"])
    if "explicit" in doc:
        lists = doc["explicit"]
        return ExplicitSpace(
            tuple(tuple(canonical_strategy(s) for s in lst) for lst in lists)
        )
    net = doc["network"]
    try:
        arcs = tuple(Arc(a["id"], a["from"], a["to"]) for a in net["arcs"])
        endpoints = tuple((s, t) for s, t in net["endpoints"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError([f"malformed network space: {exc}"]) from exc
    return NetworkSpace(arcs=arcs, endpoints=endpoints)


def instance_from_doc(doc: dict) -> GameInstance:
    try:
        players = doc["players"]
        resources = tuple(
            Resource(r["id"], parse_rational(r["capacity"])) for r in doc["resources"]
        )
        rates = tuple(
            RateFunction(
                pieces=tuple(
                    (parse_rational(t), parse_rational(v)) for t, v in r["pieces"]
                ),
                monotone=bool(r.get("monotone", True)),
            )
            for r in doc["rates"]
        )
    except ValidationError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError([f"malformed instance document: {exc}"]) from exc
    if not isinstance(players, int) or isinstance(players, bool):
        raise ValidationError(["players must be an integer"])
    space = _parse_space(doc["space"] if "space" in doc else None, players)
    instance = GameInstance(
        num_players=players, resources=resources, space=space, rates=rates
    )
    return validate_instance(instance)


# ------------------------------------------------------------------- states


def state_to_doc(state: State) -> list:
    return [list(s) for s in state]


def state_from_doc(doc, instance: GameInstance) -> State:
    try:
        state = tuple(canonical_strategy(s) for s in doc)
    except TypeError as exc:
        raise ValidationError([f"malformed state document: {exc}"]) from exc
    if len(state) != instance.num_players:
        raise ValidationError(
            [f"state has {len(state)} strategies for {instance.num_players} players"]
        )
    bad = [
        f"player {i}: strategy {list(s)} is not in the strategy set"
        for i, s in enumerate(state)
        if not instance.space.is_valid_strategy(i, s)
    ]
    if bad:
        raise ValidationError(bad)
    return state


# ------------------------------------------------------------------ results


def allocation_to_doc(result: AllocationResult) -> dict:
    return {
        "bandwidths": [format_rational(b) for b in result.bandwidths],
        "finishing_times": [format_rational(t) for t in result.finishing_times],
        "saturation_times": [_opt_rational(t) for t in result.saturation_times],
        "fix_rounds": [
            {
                "time": format_rational(rnd.time),
                "players": list(rnd.players),
                "resource": rnd.resource,
            }
            for rnd in result.fix_rounds
        ],
    }


def witness_to_doc(witness: DeviationWitness) -> dict:
    return {
        "coalition": list(witness.coalition),
        "new_strategies": [list(s) for s in witness.new_strategies],
        "old_bandwidths": [format_rational(b) for b in witness.old_bandwidths],
        "new_bandwidths": [format_rational(b) for b in witness.new_bandwidths],
    }


def trace_to_doc(trace: DynamicsTrace) -> dict:
    return {
        "steps": [
            {
                "state": state_to_doc(step.state),
                "potential": [format_rational(t) for t in step.potential],
                "witness": witness_to_doc(step.witness),
            }
            for step in trace.steps
        ],
        "terminal": state_to_doc(trace.terminal),
        "terminal_potential": [format_rational(t) for t in trace.terminal_potential],
        "step_count": trace.step_count,
    }


def dual_greedy_to_doc(result: DualGreedyResult) -> dict:
    return {
        "state": state_to_doc(result.state),
        "fix_batches": [
            {
                "resource": b.resource,
                "players": list(b.players),
                "bandwidth": format_rational(b.bandwidth),
            }
            for b in result.fix_batches
        ],
        "final_bounds": list(result.final_bounds),
        "trace": [
            {"resource": r, "ratio": format_rational(ratio)} for r, ratio in result.trace
        ],
    }


def mcap_to_doc(solution: McapSolution) -> dict:
    return {
        "state": state_to_doc(solution.state),
        "allocation": [format_rational(a) for a in solution.allocation],
        "value": format_rational(solution.value),
    }


def mcap_from_doc(doc: dict, instance: GameInstance) -> McapSolution:
    try:
        state = state_from_doc(doc["state"], instance)
        allocation = tuple(parse_rational(a) for a in doc["allocation"])
    except ValidationError:
        raise
    except (KeyError, TypeError) as exc:
        raise ValidationError([f"malformed solution document: {exc}"]) from exc
    value = sum(allocation, Fraction(0))
    if "value" in doc and parse_rational(doc["value"]) != value:
        raise ValidationError(["solution value does not match its allocation"])
    return McapSolution(state=state, allocation=allocation, value=value)


def exact_optima_to_doc(optima: ExactOptima) -> dict:
    return {
        "mcap": mcap_to_doc(optima.mcap),
        "pf_state": state_to_doc(optima.pf_state),
        "pf_value": format_rational(optima.pf_value),
    }


def price_report_to_doc(report: PriceReport) -> dict:
    def ratio_doc(value):
        if report.no_equilibrium:
            return None
        return "inf" if value is None else format_rational(value)

    kind_prefix = "" if report.kind == "pne" else "s"
    return {
        "basis": report.basis,
        "kind": report.kind,
        "coalition_size": report.coalition_size,
        "opt_value": format_rational(report.opt_value),
        "opt_state": None if report.opt_state is None else state_to_doc(report.opt_state),
        "opt_allocation": None
        if report.opt_allocation is None
        else [format_rational(a) for a in report.opt_allocation],
        "best_equilibrium_value": _opt_rational(report.best_value),
        "best_equilibrium_state": None
        if report.best_state is None
        else state_to_doc(report.best_state),
        "worst_equilibrium_value": _opt_rational(report.worst_value),
        "worst_equilibrium_state": None
        if report.worst_state is None
        else state_to_doc(report.worst_state),
        kind_prefix + "pos": ratio_doc(report.pos),
        kind_prefix + "poa": ratio_doc(report.poa),
        "equilibrium_count": report.equilibrium_count,
        "state_count": report.state_count,
        "no_equilibrium": report.no_equilibrium,
    }
