"""Exact rationals and canonical finite unions of closed intervals.

Everything downstream computes on these values, so nothing here ever
touches a float.  ``Rational`` is :class:`fractions.Fraction`, which is
already arbitrary precision and kept in lowest terms.
"""

from __future__ import annotations

import re
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence, Union

Rational = Fraction
RationalLike = Union[Fraction, int, str]

DEFAULT_COMPONENT_CAP = 4096

_RATIONAL_RE = re.compile(r"-?(0|[1-9][0-9]*)(/[1-9][0-9]*)?")


class IntervalValidationError(ValueError):
    """A closed interval was given with lo > hi."""


class ComponentOverflow(RuntimeError):
    """Canonical form would need more components than the configured cap."""

    def __init__(self, count: int, cap: int):
        super().__init__(f"interval set needs {count} components, cap is {cap}")
        self.count = count
        self.cap = cap


def parse_rational(text: str) -> Fraction:
    """Parse ``p/q`` or ``p`` (optional leading ``-``, no whitespace)."""
    if not isinstance(text, str) or not _RATIONAL_RE.fullmatch(text):
        raise ValueError(f"not a rational literal: {text!r}")
    return Fraction(text)


def format_rational(q: Fraction | int) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def as_rational(value: RationalLike) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a rational")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise TypeError(f"cannot use {type(value).__name__} as an exact rational")


@dataclass(frozen=True, order=True)
class ClosedInterval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo, hi = as_rational(self.lo), as_rational(self.hi)
        if lo > hi:
            raise IntervalValidationError(
                f"malformed interval [{format_rational(lo)}, {format_rational(hi)}]"
            )
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    @property
    def degenerate(self) -> bool:
        return self.lo == self.hi

    def __contains__(self, x) -> bool:
        return self.lo <= x <= self.hi

    def __str__(self) -> str:
        return f"[{format_rational(self.lo)}, {format_rational(self.hi)}]"


def interval(lo: RationalLike, hi: RationalLike) -> ClosedInterval:
    return ClosedInterval(as_rational(lo), as_rational(hi))


@dataclass(frozen=True)
class IntervalSet:
    """A closed subset of the line stored as sorted, pairwise non-touching
    closed intervals.  Build instances with :func:`normalize` or
    :meth:`IntervalSet.of`; the constructor only checks canonical form."""

    components: tuple[ClosedInterval, ...] = ()

    def __post_init__(self):
        comps = tuple(self.components)
        for a, b in zip(comps, comps[1:]):
            if not a.hi < b.lo:
                raise ValueError("components are not canonical; use normalize()")
        object.__setattr__(self, "components", comps)

    @classmethod
    def of(cls, *pairs, cap: int = DEFAULT_COMPONENT_CAP) -> "IntervalSet":
        return normalize([interval(lo, hi) for lo, hi in pairs], cap=cap)

    @classmethod
    def empty(cls) -> "IntervalSet":
        return cls(())

    @classmethod
    def point(cls, x: RationalLike) -> "IntervalSet":
        x = as_rational(x)
        return cls((ClosedInterval(x, x),))

    def __iter__(self) -> Iterator[ClosedInterval]:
        return iter(self.components)

    def __len__(self) -> int:
        return len(self.components)

    def __bool__(self) -> bool:
        return bool(self.components)

    def __contains__(self, x) -> bool:
        # binary search would be faster; sets stay small enough in practice
        return any(c.lo <= x <= c.hi for c in self.components)

    def __or__(self, other: "IntervalSet") -> "IntervalSet":
        return union(self, other)

    def __and__(self, other: "IntervalSet") -> "IntervalSet":
        return intersect(self, other)

    def __le__(self, other: "IntervalSet") -> bool:
        return contains(other, self)

    def __ge__(self, other: "IntervalSet") -> bool:
        return contains(self, other)

    @property
    def lo(self) -> Fraction:
        return self.components[0].lo

    @property
    def hi(self) -> Fraction:
        return self.components[-1].hi

    def nondegenerate(self) -> "IntervalSet":
        return IntervalSet(tuple(c for c in self.components if not c.degenerate))

    def __str__(self) -> str:
        if not self.components:
            return "{}"
        return " u ".join(str(c) for c in self.components)


def normalize(raw: Iterable[ClosedInterval], cap: int = DEFAULT_COMPONENT_CAP) -> IntervalSet:
    """Sort, then merge anything overlapping or touching."""
    items = sorted(raw, key=lambda c: (c.lo, c.hi))
    merged: list[ClosedInterval] = []
    cur_lo = cur_hi = None
    for c in items:
        if c.lo > c.hi:
            raise IntervalValidationError(f"malformed interval {c}")
        if cur_lo is None:
            cur_lo, cur_hi = c.lo, c.hi
        elif c.lo <= cur_hi:
            if c.hi > cur_hi:
                cur_hi = c.hi
        else:
            merged.append(ClosedInterval(cur_lo, cur_hi))
            cur_lo, cur_hi = c.lo, c.hi
    if cur_lo is not None:
        merged.append(ClosedInterval(cur_lo, cur_hi))
    if len(merged) > cap:
        raise ComponentOverflow(len(merged), cap)
    return IntervalSet(tuple(merged))


def union(a: IntervalSet, b: IntervalSet, cap: int = DEFAULT_COMPONENT_CAP) -> IntervalSet:
    if not b:
        return a
    if not a:
        return b
    return normalize(a.components + b.components, cap=cap)


def intersect(a: IntervalSet, b: IntervalSet) -> IntervalSet:
    out: list[ClosedInterval] = []
    i = j = 0
    ac, bc = a.components, b.components
    while i < len(ac) and j < len(bc):
        lo = max(ac[i].lo, bc[j].lo)
        hi = min(ac[i].hi, bc[j].hi)
        if lo <= hi:
            out.append(ClosedInterval(lo, hi))
        if ac[i].hi < bc[j].hi:
            i += 1
        else:
            j += 1
    # clipping canonical inputs can leave two pieces touching at a point only
    # when both inputs touch there, which canonical form rules out
    return IntervalSet(tuple(out))


def closure_difference(a: IntervalSet, b: IntervalSet) -> IntervalSet:
    """Closure of ``a \\ b``."""
    if not b:
        return a
    bc = b.components
    los = [c.lo for c in bc]
    out: list[ClosedInterval] = []
    for c in a.components:
        # gap i is the open interval (bc[i-1].hi, bc[i].lo), unbounded at the ends
        i = bisect_right(los, c.lo)
        while True:
            g_lo = bc[i - 1].hi if i > 0 else None
            if g_lo is not None and not c.hi > g_lo:
                break
            g_hi = bc[i].lo if i < len(bc) else None
            lo = c.lo if g_lo is None else max(c.lo, g_lo)
            hi = c.hi if g_hi is None else min(c.hi, g_hi)
            out.append(ClosedInterval(lo, hi))
            if g_hi is None or not c.hi > g_hi:
                break
            i += 1
    return normalize(out, cap=max(len(out), 1))


def interior_nonempty(a: IntervalSet) -> bool:
    return any(c.lo < c.hi for c in a.components)


def contains(a: IntervalSet, b: IntervalSet) -> bool:
    """True iff ``b`` is a subset of ``a``."""
    i = 0
    ac = a.components
    for c in b.components:
        while i < len(ac) and ac[i].hi < c.lo:
            i += 1
        if i == len(ac) or not (ac[i].lo <= c.lo and c.hi <= ac[i].hi):
            return False
    return True


def total_length(a: IntervalSet) -> Fraction:
    return sum((c.hi - c.lo for c in a.components), Fraction(0))


def dilate(a: IntervalSet, r: Fraction, within: ClosedInterval | None = None) -> IntervalSet:
    grown = [ClosedInterval(c.lo - r, c.hi + r) for c in a.components]
    out = normalize(grown, cap=max(len(grown), 1))
    if within is not None:
        out = intersect(out, IntervalSet((within,)))
    return out


def dyadic_cells(domain: ClosedInterval, k: int) -> list[ClosedInterval]:
    """The 2**k closed cells of equal width tiling ``domain``."""
    if k < 0:
        raise ValueError("resolution must be non-negative")
    n = 1 << k
    w = domain.length
    return [
        ClosedInterval(domain.lo + w * j / n, domain.lo + w * (j + 1) / n)
        for j in range(n)
    ]


def cell_index(domain: ClosedInterval, k: int, x: Fraction) -> int:
    """Index of the dyadic cell holding ``x``; points on a cell boundary go
    to the right-hand cell, except the domain's right end."""
    n = 1 << k
    j = ((x - domain.lo) * n / domain.length).__floor__()
    return min(max(j, 0), n - 1)


def sets_equal(a: IntervalSet, b: IntervalSet) -> bool:
    return a.components == b.components


def to_pairs(a: IntervalSet) -> list[list[str]]:
    return [[format_rational(c.lo), format_rational(c.hi)] for c in a.components]


def from_pairs(pairs: Sequence[Sequence[str]]) -> IntervalSet:
    return normalize([interval(lo, hi) for lo, hi in pairs], cap=max(len(pairs), 1))
