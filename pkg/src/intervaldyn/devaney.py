"""Devaney chaos by three equivalent routes, and a sufficient sensitivity test."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .exactset import format_rational
from .hull import check_indecomposable, check_strong_indecomposable, check_transitivity
from .mapmodel import MapModel, PieceBudgetExceeded, StaircaseMap, iterate_pl
from .periodic import periodic_density_check
from .verdict import DEFAULT_BUDGET, Budget, Status, Verdict, conjunction

ROUTES = (
    ("transitive", "transitivity"),
    ("strongly-indecomposable", "strong-indecomposable"),
    ("indecomposable", "indecomposable"),
)


@dataclass
class DevaneyResult:
    verdict: Verdict
    routes: dict[str, Status]
    components: dict[str, Verdict] = field(default_factory=dict)
    consistent: bool = True


def combine_routes(components: dict[str, Verdict], k: int) -> DevaneyResult:
    """Fold the three composite routes into one verdict.  Decided routes
    must agree; a disagreement is reported, never resolved."""
    density = components["periodic-density"]
    routes = {
        route: conjunction(components[prop].status, density.status) for route, prop in ROUTES
    }
    decided = {s for s in routes.values() if s is not Status.UNKNOWN}
    consistent = len(decided) <= 1
    if not consistent:
        verdict = Verdict(
            "devaney",
            Status.UNKNOWN,
            resolution=k,
            notes=["consistency failure: routes disagree " + ", ".join(f"{r}={s}" for r, s in routes.items())],
        )
    elif not decided:
        verdict = Verdict("devaney", Status.UNKNOWN, resolution=k)
    else:
        status = decided.pop()
        witness = None
        certified = False
        if status is Status.FAILS:
            failing = [
                name for name, v in components.items() if v.fails and v.certified
            ]
            witness = {"failing_checks": failing}
            certified = bool(failing)
        verdict = Verdict("devaney", status, certified=certified, resolution=k, witness=witness)
    verdict.witness = (verdict.witness or {}) | {"routes": {r: str(s) for r, s in routes.items()}}
    return DevaneyResult(verdict, routes, components, consistent)


def check_devaney(
    m: MapModel, k: int = 6, max_period: int = 10, budget: Budget = DEFAULT_BUDGET
) -> DevaneyResult:
    components = {
        "transitivity": check_transitivity(m, k, budget),
        "strong-indecomposable": check_strong_indecomposable(m, k, budget)[0],
        "indecomposable": check_indecomposable(m, k, budget),
        "periodic-density": periodic_density_check(m, k, max_period, budget),
    }
    return combine_routes(components, k)


def sensitivity_sufficient(m: MapModel, budget: Budget = DEFAULT_BUDGET) -> Verdict:
    """Uniform expansion |slope| >= lam > 1 implies sensitive dependence.

    With g = f^q and lam^q > 2, an interval shorter than g's shortest lap
    holds at most one breakpoint, so g stretches it by at least lam^q / 2 > 1.
    Some iterate therefore reaches that lap length L, giving the
    sensitivity constant L / 2.
    """
    if isinstance(m, StaircaseMap):
        return Verdict(
            "sensitivity",
            Status.UNKNOWN,
            notes=["criterion applies to finite piecewise-linear maps only"],
        )
    lam = min(abs(s) for s in m.slopes())
    if lam <= 1:
        return Verdict(
            "sensitivity",
            Status.UNKNOWN,
            notes=[f"minimum |slope| is {format_rational(lam)}; no uniform expansion"],
        )
    q = 1
    while lam**q <= 2:
        q += 1
    try:
        g = iterate_pl(m, q, cap=budget.pieces)
    except PieceBudgetExceeded:
        return Verdict("sensitivity", Status.UNKNOWN, notes=[f"f^{q} exceeds the piece budget"])
    lap = min(x1 - x0 for x0, _, x1, _ in g.pieces())
    return Verdict(
        "sensitivity",
        Status.HOLDS,
        certified=True,
        witness={"expansion": lam, "power": q, "constant": Fraction(lap, 2)},
    )
