"""Command-line interface.

Every command reads and writes JSON documents (rationals as "p/q"
strings); ``--csv`` on ``price`` and ``allocate`` emits flat rows instead.
Exit codes: 0 success, 2 validation failure, 3 budget or enumeration
overflow.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
from fractions import Fraction

from . import jsonio
from .equilibrium import best_response, improvement_dynamics
from .errors import (
    BudgetExceededError,
    EnumerationOverflowError,
    FillgamesError,
    ValidationError,
)
from .harness import GeneratorParams, generate, price_metrics
from .optimum import design_rates, mcap_exact, three_splittable_approx, uniform_mcap
from .packing import dual_greedy
from .waterfill import progressive_fill


def _load_json(path: str):
    with open(path, "r", encoding="utf-8") as handle:
        return json.load(handle)


def _load_instance(path: str):
    return jsonio.instance_from_doc(_load_json(path))


def _emit(doc, out_path=None) -> None:
    text = json.dumps(doc, indent=2)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as handle:
            handle.write(text + "\n")
    else:
        print(text)


def _parse_mode(text: str) -> int:
    if text == "unilateral":
        return 1
    if text.startswith("coalitional:"):
        return int(text.split(":", 1)[1])
    raise ValidationError([f"bad mode {text!r} (unilateral | coalitional:<k>)"])


def _parse_kind(text: str):
    if text in ("pne", "se"):
        return text, None
    if text.startswith("kse:"):
        return "kse", int(text.split(":", 1)[1])
    raise ValidationError([f"bad kind {text!r} (pne | se | kse:<k>)"])


def _cmd_validate(args) -> int:
    instance = _load_instance(args.file)
    counts = [len(lst) for lst in instance.strategy_lists]
    _emit(
        {
            "valid": True,
            "players": instance.num_players,
            "resources": instance.num_resources,
            "strategy_counts": counts,
        }
    )
    return 0


def _cmd_allocate(args) -> int:
    instance = _load_instance(args.file)
    state = jsonio.state_from_doc(_load_json(args.state), instance)
    result = progressive_fill(
        instance, state, nonstandard=not instance.all_monotone
    )
    if args.csv:
        writer = csv.writer(sys.stdout)
        writer.writerow(["player", "bandwidth", "finishing_time"])
        for i in range(instance.num_players):
            writer.writerow(
                [i, result.bandwidths[i], result.finishing_times[i]]
            )
    else:
        _emit(jsonio.allocation_to_doc(result))
    return 0


def _cmd_best_response(args) -> int:
    instance = _load_instance(args.file)
    state = jsonio.state_from_doc(_load_json(args.state), instance)
    strategy, value = best_response(instance, state, args.player)
    _emit(
        {
            "player": args.player,
            "strategy": list(strategy),
            "bandwidth": jsonio.format_rational(value),
        }
    )
    return 0


def _cmd_dynamics(args) -> int:
    instance = _load_instance(args.file)
    start = jsonio.state_from_doc(_load_json(args.start), instance)
    trace = improvement_dynamics(
        instance,
        start,
        _parse_mode(args.mode),
        step_limit=args.limit,
        budget=args.budget,
    )
    _emit(jsonio.trace_to_doc(trace))
    return 0


def _cmd_dual_greedy(args) -> int:
    instance = _load_instance(args.file)
    result = dual_greedy(instance, args.oracle, budget=args.budget)
    _emit(jsonio.dual_greedy_to_doc(result))
    return 0


def _cmd_mcap(args) -> int:
    instance = _load_instance(args.file)
    if args.uniform:
        _emit({"uniform_value": jsonio.format_rational(uniform_mcap(instance, budget=args.budget))})
    elif args.approx3:
        _emit(jsonio.mcap_to_doc(three_splittable_approx(instance, budget=args.budget)))
    else:
        _emit(jsonio.exact_optima_to_doc(mcap_exact(instance, budget=args.budget)))
    return 0


def _cmd_design(args) -> int:
    instance = _load_instance(args.file)
    solution_doc = _load_json(getattr(args, "from"))
    solution = jsonio.mcap_from_doc(solution_doc, instance)
    designed, state = design_rates(instance, solution)
    doc = jsonio.instance_to_doc(designed)
    doc["start_state"] = jsonio.state_to_doc(state)
    canonical = json.dumps(jsonio.mcap_to_doc(solution), sort_keys=True)
    doc["provenance"] = {
        "solution_sha256": hashlib.sha256(canonical.encode()).hexdigest()
    }
    _emit(doc, args.output)
    return 0


def _cmd_price(args) -> int:
    instance = _load_instance(args.file)
    kind, k = _parse_kind(args.kind)
    report = price_metrics(
        instance, basis=args.basis, kind=kind, coalition_size=k, budget=args.budget
    )
    doc = jsonio.price_report_to_doc(report)
    if args.csv:
        writer = csv.writer(sys.stdout)
        fields = [
            "basis",
            "kind",
            "coalition_size",
            "opt_value",
            "best_equilibrium_value",
            "worst_equilibrium_value",
            next(key for key in doc if key.endswith("pos")),
            next(key for key in doc if key.endswith("poa")),
            "equilibrium_count",
            "state_count",
        ]
        writer.writerow(fields)
        writer.writerow([doc[f] for f in fields])
    else:
        _emit(doc)
    return 0


def _cmd_generate(args) -> int:
    params = GeneratorParams(
        family=args.family,
        n=args.n,
        k=args.k,
        eps=Fraction(args.eps),
        t1=Fraction(args.t1),
        t2=Fraction(args.t2),
        rho=Fraction(args.rho),
        dip=Fraction(args.dip),
    )
    built = generate(params)
    doc = jsonio.instance_to_doc(built.instance)
    doc["states"] = {
        name: jsonio.state_to_doc(state) for name, state in built.states.items()
    }
    _emit(doc, args.output)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fillgames",
        description="Exact waterfilling allocations, equilibria and efficiency "
        "metrics for routing games with progressive filling.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_budget(p):
        p.add_argument("--budget", type=int, default=10**6, help="search budget")

    p = sub.add_parser("validate", help="check an instance file")
    p.add_argument("file")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("allocate", help="run progressive filling on a state")
    p.add_argument("file")
    p.add_argument("--state", required=True)
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=_cmd_allocate)

    p = sub.add_parser("best-response", help="bandwidth-maximizing strategy")
    p.add_argument("file")
    p.add_argument("--state", required=True)
    p.add_argument("--player", type=int, required=True)
    p.set_defaults(func=_cmd_best_response)

    p = sub.add_parser("dynamics", help="improvement dynamics to an equilibrium")
    p.add_argument("file")
    p.add_argument("--start", required=True)
    p.add_argument("--mode", default="unilateral", help="unilateral | coalitional:<k>")
    p.add_argument("--limit", type=int, default=10_000)
    add_budget(p)
    p.set_defaults(func=_cmd_dynamics)

    p = sub.add_parser("dual-greedy", help="strong equilibrium via dual greedy")
    p.add_argument("file")
    p.add_argument("--oracle", choices=("explicit", "network"), default="explicit")
    add_budget(p)
    p.set_defaults(func=_cmd_dual_greedy)

    p = sub.add_parser("mcap", help="maximum capacity allocation")
    p.add_argument("file")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--exact", action="store_true", help="exact optimum (default)")
    group.add_argument("--uniform", action="store_true", help="uniform-value optimum")
    group.add_argument(
        "--approx3", action="store_true", help="two-augmentation 3-path approximation"
    )
    add_budget(p)
    p.set_defaults(func=_cmd_mcap)

    p = sub.add_parser("design", help="re-equip an instance with designed rates")
    p.add_argument("file")
    p.add_argument("--from", required=True, help="solution file (state + allocation)")
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_design)

    p = sub.add_parser("price", help="price of anarchy / stability report")
    p.add_argument("file")
    p.add_argument("--basis", choices=("pf", "mcap"), default="mcap")
    p.add_argument("--kind", default="pne", help="pne | se | kse:<k>")
    p.add_argument("--csv", action="store_true")
    add_budget(p)
    p.set_defaults(func=_cmd_price)

    p = sub.add_parser("generate", help="emit a named lower-bound construction")
    p.add_argument("--family", required=True, choices=tuple("abcdef"))
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--eps", default="1/10")
    p.add_argument("--t1", default="1")
    p.add_argument("--t2", default="6/5")
    p.add_argument("--rho", default="1")
    p.add_argument("--dip", default="1/10")
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_generate)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        json.dump({"valid": False, "violations": exc.violations}, sys.stderr, indent=2)
        sys.stderr.write("\n")
        return 2
    except (BudgetExceededError, EnumerationOverflowError) as exc:
        json.dump({"error": str(exc)}, sys.stderr, indent=2)
        sys.stderr.write("\n")
        return 3
    except FillgamesError as exc:
        json.dump({"error": str(exc)}, sys.stderr, indent=2)
        sys.stderr.write("\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
