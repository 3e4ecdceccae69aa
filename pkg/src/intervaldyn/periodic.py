"""Periodic points: exact enumeration, density verdicts and the ordering oracle."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Optional

from .exactset import (
    ClosedInterval,
    IntervalSet,
    RationalLike,
    as_rational,
    dyadic_cells,
    format_rational,
    intersect,
)
from .hull import HullResult, forward_hull
from .mapmodel import (
    MapModel,
    PieceBudgetExceeded,
    PLMap,
    StaircaseMap,
    image_set,
    iterates,
)
from .orbit import orbit
from .verdict import (
    DEFAULT_BUDGET,
    Budget,
    InternalConsistencyError,
    PreconditionError,
    Status,
    Verdict,
)


@dataclass(frozen=True, order=True)
class PeriodicFinding:
    location: ClosedInterval
    least_period: int
    kind: str = "point"

    @property
    def is_segment(self) -> bool:
        return self.kind == "segment"


@dataclass(frozen=True)
class PeriodicScan:
    """Findings for periods 1..complete_through.  ``exact`` means the list is
    the map's entire periodic set, not just what the period bound reached."""

    findings: tuple[PeriodicFinding, ...]
    complete_through: int
    requested: int
    exact: bool = False
    notes: tuple[str, ...] = field(default=())

    @property
    def points(self) -> list[Fraction]:
        return [f.location.lo for f in self.findings if not f.is_segment]


def fixed_points_pl(m: PLMap) -> list[PeriodicFinding]:
    """Solve f(x) = x piece by piece."""
    points: set[Fraction] = set()
    segments: list[ClosedInterval] = []
    for x0, y0, x1, y1 in m.pieces():
        s = (y1 - y0) / (x1 - x0)
        t = y0 - s * x0
        if s != 1:
            xs = t / (1 - s)
            if x0 <= xs <= x1:
                points.add(xs)
        elif t == 0:
            if segments and segments[-1].hi == x0:
                segments[-1] = ClosedInterval(segments[-1].lo, x1)
            else:
                segments.append(ClosedInterval(x0, x1))
    out = [PeriodicFinding(s, 1, "segment") for s in segments]
    out.extend(
        PeriodicFinding(ClosedInterval(x, x), 1)
        for x in points
        if not any(s.lo <= x <= s.hi for s in segments)
    )
    return sorted(out)


def _least_period(m: MapModel, x: Fraction, p: int) -> int:
    y = x
    for d in range(1, p + 1):
        y = m.evaluate(y)
        if y == x and p % d == 0:
            return d
    raise InternalConsistencyError(f"{format_rational(x)} is not fixed by f^{p}")


def _identity_on(F: PLMap, seg: ClosedInterval) -> bool:
    if F.evaluate(seg.lo) != seg.lo or F.evaluate(seg.hi) != seg.hi:
        return False
    return all(y == x for x, y in F.breakpoints if seg.lo < x < seg.hi)


def periodic_points(
    m: MapModel, max_period: int = 10, budget: Budget = DEFAULT_BUDGET
) -> PeriodicScan:
    if max_period < 1:
        raise ValueError("max_period must be >= 1")
    if isinstance(m, StaircaseMap):
        gap = staircase_gap_check(m)
        if not gap.holds:
            raise InternalConsistencyError("staircase gap check failed")
        pts = tuple(PeriodicFinding(ClosedInterval(x, x), 1) for x in (Fraction(0), Fraction(1)))
        return PeriodicScan(pts, max_period, max_period, exact=True)

    found_points: dict[Fraction, int] = {}
    found_segments: list[PeriodicFinding] = []
    powers: list[PLMap] = []
    complete = 0
    notes: list[str] = []
    try:
        for p, F in enumerate(iterates(m, max_period, cap=budget.pieces), start=1):
            powers.append(F)
            for fp in fixed_points_pl(F):
                loc = fp.location
                if any(s.location.lo <= loc.lo and loc.hi <= s.location.hi for s in found_segments):
                    continue
                if fp.is_segment:
                    d = next(d for d in range(1, p + 1) if p % d == 0 and _identity_on(powers[d - 1], loc))
                    found_segments.append(PeriodicFinding(loc, d, "segment"))
                elif loc.lo not in found_points:
                    found_points[loc.lo] = _least_period(m, loc.lo, p)
            complete = p
    except PieceBudgetExceeded as exc:
        notes.append(f"piece budget exceeded at degree {exc.degree_completed + 1}")
    findings = list(found_segments)
    findings.extend(
        PeriodicFinding(ClosedInterval(x, x), d)
        for x, d in found_points.items()
        if not any(s.location.lo <= x <= s.location.hi for s in found_segments)
    )
    exact = _constant_image(m)
    return PeriodicScan(tuple(sorted(findings)), complete, max_period, exact=exact, notes=tuple(notes))


def _constant_image(m: MapModel) -> bool:
    # a constant map's periodic set is its one value, found at period 1
    return isinstance(m, PLMap) and len({y for _, y in m.breakpoints}) == 1


# --- the staircase certificate ---------------------------------------------


@dataclass(frozen=True)
class _Affine:
    """c0 + c1*h, with h = 2^-n ranging over (0, 1/2] for n >= 1."""

    c0: Fraction
    c1: Fraction

    def __sub__(self, other: "_Affine") -> "_Affine":
        return _Affine(self.c0 - other.c0, self.c1 - other.c1)

    def at(self, h: Fraction) -> Fraction:
        return self.c0 + self.c1 * h

    def positive_for_all_n(self) -> bool:
        return self.c0 >= 0 and self.at(Fraction(1, 2)) > 0

    def __str__(self) -> str:
        return f"{format_rational(self.c0)} + {format_rational(self.c1)}*2^-n"


def _tooth_families():
    one, F = Fraction(1), Fraction
    # (x, f(x)) for the left peak, the trough and the next peak of tooth n
    return [
        ("peak", _Affine(one, F(-1)), _Affine(one, F(0))),
        ("trough", _Affine(one, F(-3, 4)), _Affine(one, F(-1, 2))),
        ("next peak", _Affine(one, F(-1, 2)), _Affine(one, F(0))),
    ]


def staircase_gap_check(m: Optional[MapModel] = None) -> Verdict:
    """Certify that (lo, hi) holds no periodic point because f(x) - x keeps
    one strict sign there.

    For the staircase map the sign of f(x) - x is checked symbolically for
    every tooth index n at once.  A piecewise-linear map goes through the
    same endpoint-sign scan over its finitely many pieces.
    """
    if m is None or isinstance(m, StaircaseMap):
        return _staircase_symbolic(m or StaircaseMap())
    return _pl_sign_scan(m)


def _staircase_symbolic(m: StaircaseMap) -> Verdict:
    families = _tooth_families()
    # the symbolic families must agree with the evaluator on actual teeth
    for n in range(1, 12):
        h = Fraction(1, 1 << n)
        for _, x, y in families:
            if m.evaluate(x.at(h)) != y.at(h):
                raise InternalConsistencyError(f"tooth family disagrees with f at n={n}")
    # teeth tile [1/2, 1): tooth 1 starts at 1/2, and each next peak is the
    # following tooth's peak with h halved
    tiles = families[0][1].at(Fraction(1, 2)) == Fraction(1, 2) and families[2][1] == _Affine(
        families[0][1].c0, families[0][1].c1 / 2
    )
    gaps = {name: (y - x) for name, x, y in families}
    lower = m.evaluate(Fraction(1, 2)) - Fraction(1, 2) > 0 and m.evaluate(Fraction(0)) == 0
    ok = tiles and lower and all(g.positive_for_all_n() for g in gaps.values())
    witness = {
        "periodic_set": [Fraction(0), Fraction(1)],
        "displacement": {name: str(g) for name, g in gaps.items()},
        "first_piece": "f(x) - x = x on [0, 1/2]",
    }
    if not ok:
        return Verdict("gap-check", Status.FAILS, certified=True, witness=witness)
    return Verdict("gap-check", Status.HOLDS, certified=True, witness=witness)


def _pl_sign_scan(m: PLMap) -> Verdict:
    lo, hi = m.domain.lo, m.domain.hi
    for sign in (1, -1):
        ok = True
        for x0, y0, x1, y1 in m.pieces():
            g0, g1 = sign * (y0 - x0), sign * (y1 - x1)
            if g0 < 0 or g1 < 0 or (g0 == 0 and (x0 > lo or g1 == 0)) or (g1 == 0 and x1 < hi):
                ok = False
                break
        if ok:
            return Verdict(
                "gap-check",
                Status.HOLDS,
                certified=True,
                witness={"periodic_set": [lo, hi], "sign": sign},
            )
    fixed = fixed_points_pl(m)
    inner = [f for f in fixed if f.location.hi > lo and f.location.lo < hi]
    witness = {"fixed_points": [IntervalSet((f.location,)) for f in inner]}
    return Verdict("gap-check", Status.FAILS, certified=True, witness=witness)


# --- density ---------------------------------------------------------------


def empty_cell_certificate(m: MapModel, C: ClosedInterval, budget: Budget = DEFAULT_BUDGET) -> Optional[HullResult]:
    """A converged hull of f(C) that misses C proves C has no periodic point:
    a periodic x in C would satisfy x = f^p(x) inside that hull."""
    img = image_set(m, IntervalSet((C,)), cap=budget.components)
    h = forward_hull(m, img, budget)
    if h.converged and not intersect(h.hull, IntervalSet((C,))):
        return h
    return None


def periodic_density_check(
    m: MapModel, k: int = 6, max_period: int = 10, budget: Budget = DEFAULT_BUDGET
) -> Verdict:
    """Does every resolution-k cell hold a periodic point of period <= P?"""
    if k < 1:
        raise ValueError("resolution must be >= 1")
    scan = periodic_points(m, max_period, budget)
    locs = [f.location for f in scan.findings]
    used = {"complete_through": scan.complete_through, "findings": len(scan.findings)}
    notes = list(scan.notes)
    first_empty = None
    for C in dyadic_cells(m.domain, k):
        if any(L.lo <= C.hi and C.lo <= L.hi for L in locs):
            continue
        if first_empty is None:
            first_empty = C
        if scan.exact:
            return Verdict(
                "periodic-density",
                Status.FAILS,
                certified=True,
                resolution=k,
                witness={"cell": IntervalSet((C,)), "periodic_set": [IntervalSet((L,)) for L in locs]},
                budget_used=used,
                notes=notes,
            )
        cert = empty_cell_certificate(m, C, budget)
        if cert is not None:
            return Verdict(
                "periodic-density",
                Status.FAILS,
                certified=True,
                resolution=k,
                witness={"cell": IntervalSet((C,)), "image_hull": cert.hull},
                budget_used=used,
                notes=notes,
            )
    if first_empty is not None:
        notes.append(f"no periodic point of period <= {scan.complete_through} found in {first_empty}")
        return Verdict(
            "periodic-density",
            Status.UNKNOWN,
            resolution=k,
            witness={"first_empty_cell": IntervalSet((first_empty,))},
            budget_used=used,
            notes=notes,
        )
    return Verdict(
        "periodic-density",
        Status.HOLDS,
        certified=False,
        resolution=k,
        budget_used=used,
        notes=notes + [f"periods <= {scan.complete_through}"],
    )


# --- ordering in periodic-free intervals -------------------------------------


def periodic_free_certificate(m: MapModel, J: ClosedInterval, budget: Budget = DEFAULT_BUDGET) -> Verdict:
    if isinstance(m, StaircaseMap):
        gap = staircase_gap_check(m)
        if gap.holds and 0 < J.lo and J.hi < 1:
            return Verdict("periodic-free", Status.HOLDS, certified=True, witness={"gap_check": "Holds"})
        return Verdict("periodic-free", Status.UNKNOWN, notes=["J touches the periodic set {0, 1}"])
    cert = empty_cell_certificate(m, J, budget)
    if cert is not None:
        return Verdict("periodic-free", Status.HOLDS, certified=True, witness={"image_hull": cert.hull})
    return Verdict("periodic-free", Status.UNKNOWN)


def ordering_oracle(
    m: MapModel,
    J: ClosedInterval,
    z: RationalLike,
    steps: int = 256,
    certificate: Optional[Verdict] = None,
    budget: Budget = DEFAULT_BUDGET,
) -> Verdict:
    """Returns of z to a periodic-free interval J must be strictly monotone."""
    z = as_rational(z)
    if z not in J:
        raise PreconditionError(f"{format_rational(z)} is not in {J}")
    if certificate is None:
        certificate = periodic_free_certificate(m, J, budget)
    if not certificate.holds:
        raise PreconditionError(f"{J} is not certified periodic-free")
    rec = orbit(m, z, steps, max_bits=budget.orbit_bits)
    visits = [(n, x) for n, x in enumerate(rec.points) if x in J]
    used = {"steps": len(rec.points) - 1, "visits": len(visits)}
    if len(visits) < 2:
        return Verdict("ordering", Status.UNKNOWN, budget_used=used, notes=["vacuous: no return to J"])
    for (m_, a), (n_, b) in combinations(visits[1:], 2):
        if not (z < a < b or z > a > b):
            return Verdict(
                "ordering",
                Status.FAILS,
                certified=True,
                witness={"times": [0, m_, n_], "values": [z, a, b]},
                budget_used=used,
            )
    if len(visits) == 2 and visits[1][1] == z:
        return Verdict(
            "ordering",
            Status.FAILS,
            certified=True,
            witness={"times": [0, visits[1][0]], "values": [z, z]},
            budget_used=used,
        )
    return Verdict(
        "ordering",
        Status.HOLDS,
        certified=False,
        witness={"visits": [x for _, x in visits]},
        budget_used=used,
    )
