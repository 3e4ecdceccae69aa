"""Exact orbits, dyadic omega-limit covers and the weak indecomposability probe."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .exactset import (
    ClosedInterval,
    IntervalSet,
    RationalLike,
    as_rational,
    cell_index,
    contains,
    dilate,
    format_rational,
    normalize,
)
from .mapmodel import DomainError, MapModel
from .verdict import Status, Verdict

DEFAULT_ORBIT_BITS = 4096


@dataclass(frozen=True)
class OrbitRecord:
    seed: Fraction
    points: tuple[Fraction, ...]
    truncated: bool = False


@dataclass(frozen=True)
class OmegaEstimate:
    cover: IntervalSet
    resolution: int
    burn_in: int
    tail_length: int
    truncated: bool = False


def orbit(m: MapModel, x0: RationalLike, n: int, max_bits: int = DEFAULT_ORBIT_BITS) -> OrbitRecord:
    """x0, f(x0), ..., f^n(x0), stopping early once a denominator exceeds
    ``max_bits`` bits."""
    x = as_rational(x0)
    if x not in m.domain:
        raise DomainError(f"{format_rational(x)} is outside {m.domain}")
    if n < 0:
        raise ValueError("n must be >= 0")
    pts = [x]
    for _ in range(n):
        if x.denominator.bit_length() > max_bits:
            return OrbitRecord(pts[0], tuple(pts), truncated=True)
        x = m.evaluate(x)
        pts.append(x)
    return OrbitRecord(pts[0], tuple(pts), truncated=False)


def cells_cover(domain: ClosedInterval, k: int, points) -> IntervalSet:
    n = 1 << k
    w = domain.length / n
    idx = sorted({cell_index(domain, k, p) for p in points})
    return normalize(
        [ClosedInterval(domain.lo + w * j, domain.lo + w * (j + 1)) for j in idx],
        cap=max(len(idx), 1),
    )


def omega_estimate(
    m: MapModel,
    x0: RationalLike,
    burn_in: int,
    tail: int,
    k: int,
    max_bits: int = DEFAULT_ORBIT_BITS,
) -> OmegaEstimate:
    if burn_in < 1 or tail < 1:
        raise ValueError("burn_in and tail must be >= 1")
    rec = orbit(m, x0, burn_in + tail - 1, max_bits=max_bits)
    tail_pts = rec.points[burn_in:]
    if not tail_pts:
        # budget hit before the tail began; fall back to the last exact point
        tail_pts = rec.points[-1:]
    return OmegaEstimate(
        cover=cells_cover(m.domain, k, tail_pts),
        resolution=k,
        burn_in=burn_in,
        tail_length=len(tail_pts),
        truncated=rec.truncated,
    )


def grid_seeds(domain: ClosedInterval, count: int) -> list[Fraction]:
    """Midpoints of ``count`` equal cells: odd-numerator dyadic points when
    ``count`` is a power of two."""
    return [domain.lo + domain.length * (2 * i + 1) / (2 * count) for i in range(count)]


def covers_agree(a: IntervalSet, b: IntervalSet, slack: Fraction, domain: ClosedInterval) -> bool:
    return contains(dilate(a, slack, domain), b) and contains(dilate(b, slack, domain), a)


def weak_indecomposability_check(
    m: MapModel,
    sample_count: int = 64,
    k: int = 10,
    burn_in: int = 64,
    tail: int = 64,
    max_bits: int = DEFAULT_ORBIT_BITS,
) -> Verdict:
    """Empirical probe: do grid seeds share one omega-limit cover?

    Residual sets cannot be checked by machine, so the verdict is never
    certified whichever way it goes.
    """
    if sample_count < 2:
        raise ValueError("sample_count must be >= 2")
    seeds = grid_seeds(m.domain, sample_count)
    estimates = [omega_estimate(m, s, burn_in, tail, k, max_bits) for s in seeds]
    slack = m.domain.length / (1 << k)
    used = {
        "seeds": sample_count,
        "orbit_steps": sum(e.burn_in + e.tail_length for e in estimates),
        "truncated_orbits": sum(e.truncated for e in estimates),
    }
    for i, j in combinations(range(sample_count), 2):
        if not covers_agree(estimates[i].cover, estimates[j].cover, slack, m.domain):
            return Verdict(
                "weak-indecomposable",
                Status.FAILS,
                certified=False,
                resolution=k,
                witness={
                    "seeds": [seeds[i], seeds[j]],
                    "covers": [estimates[i].cover, estimates[j].cover],
                },
                budget_used=used,
                notes=["empirical"],
            )
    return Verdict(
        "weak-indecomposable",
        Status.HOLDS,
        certified=False,
        resolution=k,
        witness={"common_cover": estimates[0].cover},
        budget_used=used,
        notes=["empirical"],
    )
