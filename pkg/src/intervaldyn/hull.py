"""Forward hulls U* and the set-based verdicts built on them.

A forward hull is the closure of the union of all forward images of a
seed set.  For piecewise-linear maps it is computed by exact iteration
until the union stops changing; a converged hull is then an invariant
closed set, which is what every certified failure below is made of.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Optional, Sequence

from .exactset import (
    ClosedInterval,
    ComponentOverflow,
    IntervalSet,
    closure_difference,
    contains,
    dyadic_cells,
    format_rational,
    interior_nonempty,
    intersect,
    total_length,
    union,
)
from .mapmodel import (
    MapModel,
    PieceBudgetExceeded,
    PLMap,
    compose,
    image_interval,
    image_set,
)
from .verdict import (
    DEFAULT_BUDGET,
    Budget,
    InternalConsistencyError,
    PreconditionError,
    Status,
    Verdict,
)

STRUCTURAL_PIECE_CAP = 1024


@dataclass(frozen=True)
class HullResult:
    seed: IntervalSet
    hull: IntervalSet
    iterations: int
    converged: bool


@dataclass(frozen=True)
class CoreSet:
    E: IntervalSet
    resolution: int


@dataclass(frozen=True)
class CycleDecomposition:
    n: int
    intervals: tuple[ClosedInterval, ...]
    core: CoreSet


def forward_hull(m: MapModel, U: IntervalSet, budget: Budget = DEFAULT_BUDGET) -> HullResult:
    """Iterate S <- S u f(S) from S = U until nothing changes.

    Only the part added in the previous round is pushed forward each time.
    When the iteration or component budget runs out the result is marked
    unconverged; ``hull`` is then still a subset of the true U*.
    """
    if not U:
        raise ValueError("forward hull of the empty set")
    if not (m.domain.lo <= U.lo and U.hi <= m.domain.hi):
        raise ValueError(f"seed {U} is not inside {m.domain}")
    return _forward_hull(m, U, budget.hull_iterations, budget.components)


@lru_cache(maxsize=1 << 16)
def _forward_hull(m: MapModel, U: IntervalSet, max_iter: int, cap: int) -> HullResult:
    S = U
    frontier = U
    it = 0
    try:
        while it < max_iter:
            it += 1
            T = union(S, image_set(m, frontier, cap=cap), cap=cap)
            if T == S:
                if contains(S, image_set(m, S, cap=cap)):
                    return HullResult(U, S, it, True)
                frontier = S
                continue
            frontier = closure_difference(T, S)
            S = T
    except ComponentOverflow:
        pass
    return HullResult(U, S, it, False)


def hull_cache_clear() -> None:
    _forward_hull.cache_clear()


def domain_set(m: MapModel) -> IntervalSet:
    return IntervalSet((m.domain,))


def cell_hulls(m: MapModel, k: int, budget: Budget) -> list[HullResult]:
    return [forward_hull(m, IntervalSet((c,)), budget) for c in dyadic_cells(m.domain, k)]


def structural_seeds(m: MapModel) -> list[ClosedInterval]:
    """Laps of f o f, for piecewise-linear maps with few pieces."""
    if not isinstance(m, PLMap):
        return []
    try:
        f2 = compose(m, m, cap=STRUCTURAL_PIECE_CAP)
    except PieceBudgetExceeded:
        return []
    return [ClosedInterval(x0, x1) for x0, _, x1, _ in f2.pieces()]


def _usage(hulls: Sequence[HullResult]) -> dict[str, int]:
    return {
        "hulls": len(hulls),
        "hull_iterations": sum(h.iterations for h in hulls),
        "unconverged_hulls": sum(not h.converged for h in hulls),
    }


def _pick_largest(fails: list[HullResult]) -> HullResult:
    # largest proper invariant set first, leftmost seed on ties
    return min(fails, key=lambda h: (-total_length(h.hull), h.seed.lo, h.seed.hi))


def _transitivity_scan(
    m: MapModel,
    prop: str,
    tiers: Sequence[Sequence[IntervalSet]],
    target: IntervalSet,
    k: int,
    budget: Budget,
) -> Verdict:
    """Shared trichotomy: every hull must cover ``target``.

    ``tiers[-1]`` are the resolution-k cells that decide Holds; earlier tiers
    only contribute failure witnesses and are preferred when they have one.
    """
    all_hulls: list[HullResult] = []
    tier_fails: list[list[HullResult]] = []
    unresolved = 0
    for seeds in tiers:
        fails = []
        for seed in seeds:
            h = forward_hull(m, seed, budget)
            all_hulls.append(h)
            if contains(h.hull, target):
                continue
            if h.converged:
                fails.append(h)
            elif seeds is tiers[-1]:
                unresolved += 1
        tier_fails.append(fails)
    used = _usage(all_hulls)
    for fails in tier_fails:
        if fails:
            w = _pick_largest(fails)
            return Verdict(
                prop,
                Status.FAILS,
                certified=True,
                resolution=k,
                witness={
                    "seed": w.seed,
                    "hull": w.hull,
                    "target": target,
                    "missing": closure_difference(target, w.hull),
                    "iterations": w.iterations,
                },
                budget_used=used,
            )
    if unresolved:
        return Verdict(
            prop,
            Status.UNKNOWN,
            resolution=k,
            budget_used=used,
            notes=[f"{unresolved} hulls did not converge within budget"],
        )
    return Verdict(prop, Status.HOLDS, certified=False, resolution=k, budget_used=used)


def check_transitivity(m: MapModel, k: int = 8, budget: Budget = DEFAULT_BUDGET) -> Verdict:
    """Holds at resolution k when every dyadic cell's hull is the whole
    domain; Fails (exactly) when some seed has a converged proper hull."""
    if k < 1:
        raise ValueError("resolution must be >= 1")
    structural = [IntervalSet((c,)) for c in structural_seeds(m)]
    cells = [IntervalSet((c,)) for c in dyadic_cells(m.domain, k)]
    return _transitivity_scan(m, "transitivity", [structural, cells], domain_set(m), k, budget)


def check_transitive_on(
    m: MapModel, E: IntervalSet, k: int = 6, budget: Budget = DEFAULT_BUDGET
) -> Verdict:
    """Transitivity of f restricted to the invariant set E, up to E's
    degenerate components."""
    if not E or not contains(E, image_set(m, E, cap=budget.components)):
        raise PreconditionError(f"{E} is not invariant")
    seeds = []
    for c in dyadic_cells(m.domain, k):
        piece = intersect(IntervalSet((c,)), E)
        if interior_nonempty(piece):
            seeds.append(piece)
    return _transitivity_scan(m, "transitivity-on-set", [seeds], E.nondegenerate(), k, budget)


def check_indecomposable(m: MapModel, k: int = 6, budget: Budget = DEFAULT_BUDGET) -> Verdict:
    """Every two resolution-k cells must have hulls whose intersection has
    interior.  A converged failing pair is an exact counterexample."""
    if k < 1:
        raise ValueError("resolution must be >= 1")
    hulls = cell_hulls(m, k, budget)
    best = None
    unresolved = 0
    for i, j in combinations(range(len(hulls)), 2):
        inter = intersect(hulls[i].hull, hulls[j].hull)
        if interior_nonempty(inter):
            continue
        if not (hulls[i].converged and hulls[j].converged):
            unresolved += 1
            continue
        key = (len(inter), i, j)
        if best is None or key < best[0]:
            best = (key, i, j, inter)
    used = _usage(hulls)
    used["pairs"] = len(hulls) * (len(hulls) - 1) // 2
    if best is not None:
        _, i, j, inter = best
        return Verdict(
            "indecomposable",
            Status.FAILS,
            certified=True,
            resolution=k,
            witness={
                "seeds": [hulls[i].seed, hulls[j].seed],
                "hulls": [hulls[i].hull, hulls[j].hull],
                "intersection": inter,
            },
            budget_used=used,
        )
    if unresolved:
        return Verdict(
            "indecomposable",
            Status.UNKNOWN,
            resolution=k,
            budget_used=used,
            notes=[f"{unresolved} pairs undecided because a hull did not converge"],
        )
    return Verdict("indecomposable", Status.HOLDS, certified=False, resolution=k, budget_used=used)


def _anchored_cell(domain: ClosedInterval, t: int, anchor: str) -> ClosedInterval:
    w = domain.length / (1 << t)
    if anchor == "right":
        return ClosedInterval(domain.hi - w, domain.hi)
    return ClosedInterval(domain.lo, domain.lo + w)


def _family_description(domain: ClosedInterval, anchor: str) -> str:
    lo, hi, w = (format_rational(v) for v in (domain.lo, domain.hi, domain.length))
    if anchor == "right":
        return f"J_t = [{hi} - {w}/2^t, {hi}]"
    return f"J_t = [{lo}, {lo} + {w}/2^t]"


def find_shrinking_family(m: MapModel, k: int, budget: Budget = DEFAULT_BUDGET) -> Optional[dict]:
    """Search for nested invariant sets A_1 >= A_2 >= ... >= A_T anchored at
    a domain endpoint, each with interior, whose last member is shorter
    than two resolution-k cells."""
    T = budget.family_depth
    limit = 2 * m.domain.length / (1 << k)
    for anchor in ("right", "left"):
        members: list[IntervalSet] = []
        seeds: list[IntervalSet] = []
        for t in range(1, T + 1):
            seed = IntervalSet((_anchored_cell(m.domain, t, anchor),))
            h = forward_hull(m, seed, budget)
            if not h.converged or not interior_nonempty(h.hull):
                break
            if not contains(h.hull, image_set(m, h.hull, cap=budget.components)):
                break
            if members and not contains(members[-1], h.hull):
                break
            members.append(h.hull)
            seeds.append(seed)
        else:
            if total_length(members[-1]) < limit:
                closed_form = all(
                    A == s for A, s in zip(members, seeds)
                )
                return {
                    "anchor": anchor,
                    "family": members,
                    "checked_range": [1, T],
                    "intersection": members[-1],
                    "description": _family_description(m.domain, anchor) if closed_form else None,
                }
    return None


def core_levels(m: MapModel, k: int, budget: Budget) -> list[tuple[int, IntervalSet, bool]]:
    """(j, E_j, all hulls converged) for j = 1..k, E_j being the
    intersection of every resolution-j cell hull."""
    out = []
    for j in range(1, k + 1):
        hulls = cell_hulls(m, j, budget)
        E = hulls[0].hull
        for h in hulls[1:]:
            E = intersect(E, h.hull)
        out.append((j, E, all(h.converged for h in hulls)))
    return out


def check_strong_indecomposable(
    m: MapModel, k: int = 8, budget: Budget = DEFAULT_BUDGET
) -> tuple[Verdict, Optional[CoreSet]]:
    if k < 1:
        raise ValueError("resolution must be >= 1")
    family = find_shrinking_family(m, k, budget)
    if family is not None:
        return (
            Verdict(
                "strong-indecomposable",
                Status.FAILS,
                certified=True,
                resolution=k,
                witness=family,
                budget_used={"family_depth": budget.family_depth},
            ),
            None,
        )
    levels = core_levels(m, k, budget)
    used = {"hulls": sum(1 << j for j, _, _ in levels), "levels": k}
    tail = levels[-3:]
    E = tail[-1][1]
    trace = {f"E_{j}": Ej for j, Ej, _ in tail}
    if not all(conv for _, _, conv in tail):
        return (
            Verdict(
                "strong-indecomposable",
                Status.UNKNOWN,
                resolution=k,
                budget_used=used,
                notes=["some cell hulls did not converge"],
                witness=None,
            ),
            None,
        )
    stable = all(Ej == E for _, Ej, _ in tail)
    if stable and interior_nonempty(E):
        v = Verdict(
            "strong-indecomposable",
            Status.HOLDS,
            certified=False,
            resolution=k,
            witness={"core": E, "trace": trace},
            budget_used=used,
        )
        return v, CoreSet(E, k)
    note = "core has empty interior" if not interior_nonempty(E) else "core not yet stable"
    return (
        Verdict(
            "strong-indecomposable",
            Status.UNKNOWN,
            resolution=k,
            budget_used=used,
            notes=[note + "; no shrinking invariant family found"],
        ),
        None,
    )


def extract_core(m: MapModel, k: int = 8, budget: Budget = DEFAULT_BUDGET) -> CoreSet:
    verdict, core = check_strong_indecomposable(m, k, budget)
    if core is None:
        raise PreconditionError(f"strong indecomposability is {verdict.status} at resolution {k}")
    if not contains(core.E, image_set(m, core.E, cap=budget.components)):
        raise InternalConsistencyError(f"core {core.E} is not invariant")
    return core


def decompose_core(m: MapModel, core: CoreSet) -> tuple[Verdict, Optional[CycleDecomposition]]:
    """Split the core into disjoint intervals cyclically permuted by f."""
    E = core.E
    comps = list(E.nondegenerate())

    def unknown(msg: str):
        return Verdict("cycle-decomposition", Status.UNKNOWN, resolution=core.resolution,
                       notes=[msg]), None

    if not comps:
        return unknown("core has no nondegenerate component")
    longest = max(c.length for c in comps)
    J0 = next(c for c in comps if c.length == longest)
    J = J0
    orbit = [J0]
    n = None
    for step in range(1, len(comps) + 1):
        J = image_interval(m, J)
        if J.lo <= J0.hi and J0.lo <= J.hi:
            n = step
            break
        orbit.append(J)
    if n is None:
        return unknown(f"no return to {J0} within {len(comps)} steps")
    if J != J0:
        return unknown(f"f^{n}({J0}) = {J}, not {J0}")
    for a, b in combinations(orbit, 2):
        if a.lo <= b.hi and b.lo <= a.hi:
            return unknown(f"{a} and {b} are not disjoint")
    if IntervalSet(tuple(sorted(orbit))) != E:
        return unknown("the cycle does not exhaust the core")
    for i, Ji in enumerate(orbit):
        if image_interval(m, Ji) != orbit[(i + 1) % n]:
            raise InternalConsistencyError(f"f(J_{i}) != J_{(i + 1) % n}")
    dec = CycleDecomposition(n, tuple(orbit), core)
    return (
        Verdict(
            "cycle-decomposition",
            Status.HOLDS,
            certified=True,
            resolution=core.resolution,
            witness={"n": n, "intervals": [IntervalSet((c,)) for c in orbit]},
        ),
        dec,
    )


def cycle_decomposition(
    m: MapModel, k: int = 8, budget: Budget = DEFAULT_BUDGET
) -> tuple[Verdict, Optional[CycleDecomposition]]:
    try:
        core = extract_core(m, k, budget)
    except PreconditionError as exc:
        return Verdict("cycle-decomposition", Status.UNKNOWN, resolution=k, notes=[str(exc)]), None
    return decompose_core(m, core)
