"""Analysis orchestration, the JSON report format and witness re-checking.

Reports carry every rational as a "p/q" string so that witnesses survive
serialization exactly; :func:`recheck_failure` parses them back and
re-derives the failure with exact operations only.
"""

from __future__ import annotations

import enum
import json
import os
import tempfile
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional

from .devaney import combine_routes, sensitivity_sufficient
from .exactset import (
    ClosedInterval,
    IntervalSet,
    contains,
    format_rational,
    from_pairs,
    interior_nonempty,
    intersect,
    total_length,
)
from .hull import (
    CycleDecomposition,
    check_indecomposable,
    check_strong_indecomposable,
    check_transitivity,
    decompose_core,
)
from .mapmodel import MapModel, PLMap, StaircaseMap, format_plm, image_set, iterate_pl, restrict
from .orbit import weak_indecomposability_check
from .periodic import (
    PeriodicScan,
    periodic_density_check,
    periodic_points,
    staircase_gap_check,
)
from .verdict import DEFAULT_BUDGET, Budget, Status, Verdict

REPORT_FORMAT = "intervaldyn-report"
SCHEMA_VERSION = 1


def to_jsonable(obj: Any) -> Any:
    if isinstance(obj, (bool, type(None), str)):
        return obj
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, int):
        return obj
    if isinstance(obj, Fraction):
        return format_rational(obj)
    if isinstance(obj, IntervalSet):
        return [[format_rational(c.lo), format_rational(c.hi)] for c in obj]
    if isinstance(obj, ClosedInterval):
        return [format_rational(obj.lo), format_rational(obj.hi)]
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def verdict_json(v: Verdict) -> dict:
    return {
        "property": v.property,
        "status": v.status.value,
        "certified": v.certified,
        "resolution": v.resolution,
        "witness": to_jsonable(v.witness),
        "budget_used": dict(v.budget_used),
        "notes": list(v.notes),
    }


def periodic_json(scan: PeriodicScan) -> dict:
    return {
        "complete_through": scan.complete_through,
        "requested": scan.requested,
        "exact": scan.exact,
        "findings": [
            {"kind": f.kind, "location": to_jsonable(f.location), "least_period": f.least_period}
            for f in scan.findings
        ],
        "notes": list(scan.notes),
    }


def map_descriptor(m: MapModel) -> dict:
    return {
        "name": m.name,
        "kind": "staircase" if isinstance(m, StaircaseMap) else "plmap",
        "domain": to_jsonable(m.domain),
        "plm": format_plm(m),
    }


@dataclass
class AnalysisReport:
    map: dict
    parameters: dict
    verdicts: dict[str, Verdict]
    periodic: PeriodicScan
    core: Optional[IntervalSet] = None
    decomposition: Optional[CycleDecomposition] = None
    return_map: dict[str, Verdict] = field(default_factory=dict)
    consistent: bool = True
    timing: dict[str, float] = field(default_factory=dict)

    @property
    def headline(self) -> dict[str, str]:
        return {name: v.status.value for name, v in self.verdicts.items()}

    def to_dict(self, include_timing: bool = True) -> dict:
        d = {
            "format": REPORT_FORMAT,
            "schema_version": SCHEMA_VERSION,
            "map": self.map,
            "parameters": self.parameters,
            "headline": self.headline,
            "consistent": self.consistent,
            "verdicts": {name: verdict_json(v) for name, v in self.verdicts.items()},
            "core": to_jsonable(self.core),
            "decomposition": None,
            "periodic": periodic_json(self.periodic),
        }
        if self.decomposition is not None:
            d["decomposition"] = {
                "n": self.decomposition.n,
                "intervals": to_jsonable(list(self.decomposition.intervals)),
                "return_map": {name: verdict_json(v) for name, v in self.return_map.items()},
            }
        if include_timing:
            d["timing"] = {k: round(v, 3) for k, v in self.timing.items()}
        return d

    def to_json(self, include_timing: bool = True) -> str:
        return json.dumps(self.to_dict(include_timing), indent=2) + "\n"


def return_map_checks(m: MapModel, dec: CycleDecomposition, k: int, max_period: int, budget: Budget) -> dict[str, Verdict]:
    """Transitivity and periodic density of f^n restricted to J_0."""
    if not isinstance(m, PLMap):
        return {}
    g = restrict(iterate_pl(m, dec.n, cap=budget.pieces), dec.intervals[0])
    return {
        "transitivity": check_transitivity(g, k, budget),
        "periodic-density": periodic_density_check(g, k, max_period, budget),
    }


def analyze(
    m: MapModel,
    k: int = 6,
    max_period: int = 10,
    budget: Budget = DEFAULT_BUDGET,
    weak_samples: int = 64,
    weak_resolution: int = 10,
    burn_in: int = 64,
    tail: int = 64,
) -> AnalysisReport:
    timing: dict[str, float] = {}

    def timed(name, fn, *args):
        t0 = time.perf_counter()
        out = fn(*args)
        timing[name] = time.perf_counter() - t0
        return out

    verdicts: dict[str, Verdict] = {}
    verdicts["transitivity"] = timed("transitivity", check_transitivity, m, k, budget)
    verdicts["indecomposable"] = timed("indecomposable", check_indecomposable, m, k, budget)
    strong, core = timed("strong-indecomposable", check_strong_indecomposable, m, k, budget)
    verdicts["strong-indecomposable"] = strong
    verdicts["weak-indecomposable"] = timed(
        "weak-indecomposable", weak_indecomposability_check, m, weak_samples, weak_resolution, burn_in, tail, budget.orbit_bits
    )
    scan = timed("periodic", periodic_points, m, max_period, budget)
    verdicts["periodic-density"] = timed("periodic-density", periodic_density_check, m, k, max_period, budget)
    if isinstance(m, StaircaseMap):
        verdicts["gap-check"] = staircase_gap_check(m)
    verdicts["sensitivity"] = timed("sensitivity", sensitivity_sufficient, m, budget)
    dev = combine_routes(verdicts, k)
    verdicts["devaney"] = dev.verdict

    dec = None
    ret: dict[str, Verdict] = {}
    if core is not None:
        dverdict, dec = decompose_core(m, core)
        verdicts["cycle-decomposition"] = dverdict
        if dec is not None:
            ret = timed("return-map", return_map_checks, m, dec, k, max_period, budget)

    params = {
        "resolution": k,
        "max_period": max_period,
        "weak": {"samples": weak_samples, "resolution": weak_resolution, "burn_in": burn_in, "tail": tail},
        "budget": {
            "hull_iterations": budget.hull_iterations,
            "components": budget.components,
            "pieces": budget.pieces,
            "family_depth": budget.family_depth,
            "orbit_bits": budget.orbit_bits,
        },
    }
    return AnalysisReport(
        map=map_descriptor(m),
        parameters=params,
        verdicts=verdicts,
        periodic=scan,
        core=core.E if core else None,
        decomposition=dec,
        return_map=ret,
        consistent=dev.consistent,
        timing=timing,
    )


def write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# --- re-checking failure witnesses from their serialized form ---------------


def _invariant_with_interior(m: MapModel, A: IntervalSet) -> bool:
    return interior_nonempty(A) and contains(A, image_set(m, A, cap=2 * len(A) + 1))


def recheck_failure(m: MapModel, verdict: dict) -> bool:
    """Re-derive a serialized Fails verdict from its witness alone.

    Returns True when the witness independently refutes the property.
    Raises ValueError for properties whose failures are not certificates.
    """
    if verdict["status"] != Status.FAILS.value:
        raise ValueError("only Fails verdicts carry witnesses")
    prop, w = verdict["property"], verdict["witness"]
    if prop in ("transitivity", "transitivity-on-set"):
        seed, hull = from_pairs(w["seed"]), from_pairs(w["hull"])
        target = from_pairs(w["target"])
        return (
            contains(hull, seed)
            and _invariant_with_interior(m, hull)
            and not contains(hull, target)
        )
    if prop == "indecomposable":
        A, B = (from_pairs(h) for h in w["hulls"])
        return (
            _invariant_with_interior(m, A)
            and _invariant_with_interior(m, B)
            and not interior_nonempty(intersect(A, B))
        )
    if prop == "strong-indecomposable":
        family = [from_pairs(A) for A in w["family"]]
        limit = 2 * m.domain.length / (1 << verdict["resolution"])
        nested = all(contains(a, b) for a, b in zip(family, family[1:]))
        return (
            nested
            and all(_invariant_with_interior(m, A) for A in family)
            and total_length(family[-1]) < limit
        )
    if prop == "periodic-density":
        cell = from_pairs(w["cell"])
        if "image_hull" in w:
            H = from_pairs(w["image_hull"])
            return (
                contains(H, image_set(m, H, cap=2 * len(H) + 1))
                and contains(H, image_set(m, cell))
                and not intersect(H, cell)
            )
        # the periodic set must be known exactly: {0, 1} for the staircase
        # after its gap check, {c} for a constant map
        if isinstance(m, StaircaseMap):
            if not staircase_gap_check(m).holds:
                return False
            periodic = IntervalSet.of(*[(p, p) for p in (m.domain.lo, m.domain.hi)])
        else:
            values = {y for _, y in m.breakpoints}
            if len(values) != 1:
                return False
            c = values.pop()
            periodic = IntervalSet.of((c, c))
        return not intersect(periodic, cell)
    if prop == "gap-check":
        lo, hi = m.domain.lo, m.domain.hi
        for s in w["fixed_points"]:
            c = from_pairs(s).components[0]
            if m.evaluate(c.lo) == c.lo and m.evaluate(c.hi) == c.hi and lo < c.hi and c.lo < hi:
                return True
        return False
    if prop == "devaney":
        raise ValueError("devaney failures are re-checked through their component verdicts")
    raise ValueError(f"{prop} failures are not exact certificates")
