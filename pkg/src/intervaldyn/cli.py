"""Command-line front end.

Exit codes: 0 when the command ran (whatever the verdicts), 1 for usage
or parse errors, 2 when the Devaney routes contradict each other.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional, Sequence

from .devaney import check_devaney, sensitivity_sufficient
from .exactset import ClosedInterval, IntervalSet, parse_rational
from .hull import (
    check_indecomposable,
    check_strong_indecomposable,
    check_transitivity,
    cycle_decomposition,
    forward_hull,
)
from .mapmodel import (
    BUILTIN_NAMES,
    MapModel,
    MapValidationError,
    PlmSyntaxError,
    builtin,
    evaluate,
    parse_plm,
)
from .orbit import orbit, weak_indecomposability_check
from .periodic import periodic_density_check, periodic_points, staircase_gap_check
from .render import DEFAULT_STAIRCASE_TRUNCATION, render_cobweb, render_sets
from .report import analyze, periodic_json, return_map_checks, to_jsonable, verdict_json, write_atomic
from .verdict import Budget

PROPERTIES = (
    "transitivity",
    "indecomposable",
    "strong",
    "weak",
    "density",
    "gap",
    "sensitivity",
    "devaney",
)


class UsageError(Exception):
    pass


def parse_map(source: str) -> MapModel:
    """``builtin:<name>[:<param>]``, a bare builtin name, or a .plm path."""
    if source.startswith("builtin:"):
        source = source[len("builtin:"):]
    elif os.path.exists(source):
        with open(source, encoding="utf-8") as fh:
            name = os.path.splitext(os.path.basename(source))[0]
            return parse_plm(fh.read(), name=name)
    name, _, param = source.partition(":")
    if name not in BUILTIN_NAMES:
        raise UsageError(f"no such file or builtin map: {source}")
    return builtin(name, param or None)


def _rational(text: str):
    try:
        return parse_rational(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--resolution", type=int, default=6, metavar="K")
    common.add_argument("--max-period", type=int, default=10, metavar="P")
    common.add_argument("--hull-iters", type=int, default=Budget.hull_iterations, metavar="N")
    common.add_argument("--components", type=int, default=Budget.components, metavar="CAP")
    common.add_argument("--family-depth", type=int, default=Budget.family_depth, metavar="T")
    common.add_argument("--report", metavar="PATH", help="also write the JSON output here")
    common.add_argument("--svg", metavar="PATH")

    p = argparse.ArgumentParser(prog="intervaldyn", description="Exact analysis of interval maps.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("eval", parents=[common])
    s.add_argument("map")
    s.add_argument("x", type=_rational)

    s = sub.add_parser("orbit", parents=[common])
    s.add_argument("map")
    s.add_argument("x0", type=_rational)
    s.add_argument("--steps", type=int, default=20)

    s = sub.add_parser("hull", parents=[common])
    s.add_argument("map")
    s.add_argument("lo", type=_rational)
    s.add_argument("hi", type=_rational)

    s = sub.add_parser("periodic", parents=[common])
    s.add_argument("map")

    s = sub.add_parser("check", parents=[common])
    s.add_argument("property", choices=PROPERTIES)
    s.add_argument("map")

    s = sub.add_parser("decompose", parents=[common])
    s.add_argument("map")

    s = sub.add_parser("analyze", parents=[common])
    s.add_argument("map")

    s = sub.add_parser("render", parents=[common])
    s.add_argument("kind", choices=("cobweb", "sets"))
    s.add_argument("map")
    s.add_argument("--seed", type=_rational, default=None)
    s.add_argument("--steps", type=int, default=20)
    s.add_argument("--truncate", type=int, default=DEFAULT_STAIRCASE_TRUNCATION)
    return p


def _budget(args) -> Budget:
    return Budget(
        hull_iterations=args.hull_iters,
        components=args.components,
        family_depth=args.family_depth,
    )


def _emit(args, payload) -> None:
    text = json.dumps(payload, indent=2) + "\n"
    if args.report:
        write_atomic(args.report, text)
    sys.stdout.write(text)


def _check(args, m: MapModel, budget: Budget) -> tuple[dict, int]:
    k, P = args.resolution, args.max_period
    prop = args.property
    if prop == "transitivity":
        return verdict_json(check_transitivity(m, k, budget)), 0
    if prop == "indecomposable":
        return verdict_json(check_indecomposable(m, k, budget)), 0
    if prop == "strong":
        v, core = check_strong_indecomposable(m, k, budget)
        return verdict_json(v) | {"core": to_jsonable(core.E if core else None)}, 0
    if prop == "weak":
        return verdict_json(weak_indecomposability_check(m)), 0
    if prop == "density":
        return verdict_json(periodic_density_check(m, k, P, budget)), 0
    if prop == "gap":
        return verdict_json(staircase_gap_check(m)), 0
    if prop == "sensitivity":
        return verdict_json(sensitivity_sufficient(m, budget)), 0
    res = check_devaney(m, k, P, budget)
    payload = verdict_json(res.verdict) | {
        "components": {name: verdict_json(v) for name, v in res.components.items()},
        "consistent": res.consistent,
    }
    return payload, 0 if res.consistent else 2


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    try:
        m = parse_map(args.map)
    except (UsageError, PlmSyntaxError, MapValidationError, ValueError) as exc:
        print(f"intervaldyn: {exc}", file=sys.stderr)
        return 1
    budget = _budget(args)
    code = 0
    try:
        if args.command == "eval":
            payload = {"x": to_jsonable(args.x), "f(x)": to_jsonable(evaluate(m, args.x))}
        elif args.command == "orbit":
            rec = orbit(m, args.x0, args.steps, max_bits=budget.orbit_bits)
            payload = {"seed": to_jsonable(rec.seed), "points": to_jsonable(rec.points), "truncated": rec.truncated}
        elif args.command == "hull":
            h = forward_hull(m, IntervalSet((ClosedInterval(args.lo, args.hi),)), budget)
            payload = {
                "seed": to_jsonable(h.seed),
                "hull": to_jsonable(h.hull),
                "iterations": h.iterations,
                "converged": h.converged,
            }
            if args.svg:
                render_sets(m, [("seed", h.seed), ("hull", h.hull)], args.svg)
        elif args.command == "periodic":
            payload = periodic_json(periodic_points(m, args.max_period, budget))
        elif args.command == "check":
            payload, code = _check(args, m, budget)
        elif args.command == "decompose":
            v, dec = cycle_decomposition(m, args.resolution, budget)
            payload = verdict_json(v)
            if dec is not None:
                ret = return_map_checks(m, dec, args.resolution, args.max_period, budget)
                payload["core"] = to_jsonable(dec.core.E)
                payload["return_map"] = {name: verdict_json(r) for name, r in ret.items()}
                if args.svg:
                    rows = [("E", dec.core.E)] + [
                        (f"J_{i}", IntervalSet((J,))) for i, J in enumerate(dec.intervals)
                    ]
                    render_sets(m, rows, args.svg)
        elif args.command == "analyze":
            rep = analyze(m, args.resolution, args.max_period, budget)
            text = rep.to_json()
            if args.report:
                write_atomic(args.report, text)
            sys.stdout.write(text)
            return 0 if rep.consistent else 2
        else:
            if not args.svg:
                print("intervaldyn: render needs --svg PATH", file=sys.stderr)
                return 1
            if args.kind == "cobweb":
                seed = args.seed if args.seed is not None else (m.domain.lo + m.domain.hi) / 3
                render_cobweb(m, seed, args.steps, args.svg, args.truncate)
            else:
                v, core = check_strong_indecomposable(m, args.resolution, budget)
                rows = [("core E", core.E if core else IntervalSet.empty())]
                render_sets(m, rows, args.svg)
            payload = {"svg": args.svg}
    except ValueError as exc:
        print(f"intervaldyn: {exc}", file=sys.stderr)
        return 1
    _emit(args, payload)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
