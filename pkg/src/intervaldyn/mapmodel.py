"""Interval maps with exact evaluation and exact interval images.

Two kinds of map are supported: finite continuous piecewise-linear maps
given by their breakpoints (:class:`PLMap`), and the countably-piecewise
staircase map (:class:`StaircaseMap`) whose teeth accumulate at the fixed
point 1.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterator, Optional, Sequence, Union

from .exactset import (
    DEFAULT_COMPONENT_CAP,
    ClosedInterval,
    IntervalSet,
    RationalLike,
    as_rational,
    format_rational,
    normalize,
    parse_rational,
)

DEFAULT_PIECE_CAP = 65536
BUILTIN_NAMES = ("example-3-1", "example-3-2", "tent", "identity", "constant")


class MapValidationError(ValueError):
    pass


class DomainError(ValueError):
    """A point or interval outside the map's domain."""


class PieceBudgetExceeded(RuntimeError):
    def __init__(self, pieces: int, cap: int, degree_completed: int = 0):
        super().__init__(
            f"piecewise-linear representation needs {pieces} pieces (cap {cap}); "
            f"completed through degree {degree_completed}"
        )
        self.pieces = pieces
        self.cap = cap
        self.degree_completed = degree_completed


class PlmSyntaxError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class PLMap:
    domain: ClosedInterval
    breakpoints: tuple[tuple[Fraction, Fraction], ...]
    name: str = field(default="plmap", compare=False)

    @cached_property
    def xs(self) -> tuple[Fraction, ...]:
        return tuple(x for x, _ in self.breakpoints)

    @property
    def piece_count(self) -> int:
        return len(self.breakpoints) - 1

    def pieces(self) -> Iterator[tuple[Fraction, Fraction, Fraction, Fraction]]:
        for (x0, y0), (x1, y1) in zip(self.breakpoints, self.breakpoints[1:]):
            yield x0, y0, x1, y1

    def slopes(self) -> list[Fraction]:
        return [(y1 - y0) / (x1 - x0) for x0, y0, x1, y1 in self.pieces()]

    def evaluate(self, x: Fraction) -> Fraction:
        if not self.domain.lo <= x <= self.domain.hi:
            raise DomainError(f"{format_rational(x)} is outside {self.domain}")
        xs = self.xs
        i = bisect_right(xs, x) - 1
        if i >= len(xs) - 1:
            return self.breakpoints[-1][1]
        x0, y0 = self.breakpoints[i]
        if x == x0:
            return y0
        x1, y1 = self.breakpoints[i + 1]
        return y0 + (y1 - y0) * (x - x0) / (x1 - x0)

    def image_interval(self, J: ClosedInterval) -> ClosedInterval:
        if not (self.domain.lo <= J.lo and J.hi <= self.domain.hi):
            raise DomainError(f"{J} is not inside {self.domain}")
        lo = hi = self.evaluate(J.lo)
        if J.hi != J.lo:
            v = self.evaluate(J.hi)
            lo, hi = min(lo, v), max(hi, v)
            xs = self.xs
            for i in range(bisect_right(xs, J.lo), len(xs)):
                x, y = self.breakpoints[i]
                if x >= J.hi:
                    break
                if y < lo:
                    lo = y
                elif y > hi:
                    hi = y
        return ClosedInterval(lo, hi)


class StaircaseMap:
    """The staircase map on [0, 1]: f(0)=0, f(1)=1, f(1-2^-n)=1 and
    f(1-3*2^-(n+2)) = 1-2^-(n+1) for n >= 1, linear in between, and 2x on
    [0, 1/2].  Tooth n is [1-2^-n, 1-2^-(n+1)]; every slope is +-2."""

    name = "example-3-2"
    domain = ClosedInterval(Fraction(0), Fraction(1))

    def __eq__(self, other):
        return isinstance(other, StaircaseMap)

    def __hash__(self):
        return hash("StaircaseMap")

    def __repr__(self):
        return "StaircaseMap()"

    # listed points of tooth n
    @staticmethod
    def peak(n: int) -> Fraction:
        return 1 - Fraction(1, 1 << n)

    @staticmethod
    def trough(n: int) -> Fraction:
        return 1 - Fraction(3, 1 << (n + 2))

    @staticmethod
    def trough_value(n: int) -> Fraction:
        return 1 - Fraction(1, 1 << (n + 1))

    @staticmethod
    def tooth_index(x: Fraction) -> int:
        """n with 1-2^-n <= x < 1-2^-(n+1), for x in [1/2, 1)."""
        d = 1 - x
        if not 0 < d <= Fraction(1, 2):
            raise DomainError(f"{format_rational(x)} is not in [1/2, 1)")
        p, q = d.numerator, d.denominator
        # largest n with 2^n * p <= q
        n = q.bit_length() - p.bit_length()
        if (p << n) > q:
            n -= 1
        return n

    def evaluate(self, x: Fraction) -> Fraction:
        if not 0 <= x <= 1:
            raise DomainError(f"{format_rational(x)} is outside [0, 1]")
        if x == 1:
            return Fraction(1)
        if x <= Fraction(1, 2):
            return 2 * x
        n = self.tooth_index(x)
        a, b = self.peak(n), self.trough(n)
        if x <= b:
            return 1 - 2 * (x - a)
        return self.trough_value(n) + 2 * (x - b)

    def listed_points(self, lo: Fraction, hi: Fraction) -> Iterator[tuple[Fraction, Fraction]]:
        """Listed points strictly inside (lo, hi), with hi < 1."""
        if lo < Fraction(1, 2) < hi:
            yield Fraction(1, 2), Fraction(1)
        if hi <= Fraction(1, 2):
            return
        n0 = self.tooth_index(max(lo, Fraction(1, 2)))
        n1 = self.tooth_index(hi)
        for n in range(n0, n1 + 1):
            for x, y in ((self.peak(n), Fraction(1)), (self.trough(n), self.trough_value(n))):
                if lo < x < hi:
                    yield x, y

    def tail_index(self, lo: Fraction) -> int:
        """First tooth whose trough lies strictly right of ``lo``."""
        if lo < Fraction(1, 2):
            return 1
        n = self.tooth_index(lo)
        return n if self.trough(n) > lo else n + 1

    def image_interval(self, J: ClosedInterval) -> ClosedInterval:
        if not (0 <= J.lo and J.hi <= 1):
            raise DomainError(f"{J} is not inside [0, 1]")
        values = [self.evaluate(J.lo), self.evaluate(J.hi)]
        if J.hi < 1:
            values.extend(y for _, y in self.listed_points(J.lo, J.hi))
        elif J.lo < 1:
            # troughs at or beyond tail index t rise towards 1, so the tail
            # contributes [1 - 2^-(t+1), 1]; earlier listed points are finite
            t = self.tail_index(J.lo)
            values.extend(y for _, y in self.listed_points(J.lo, self.peak(t)))
            values.append(self.trough_value(t))
        return ClosedInterval(min(values), max(values))

    def graph_vertices(self, truncate: int) -> list[tuple[Fraction, Fraction]]:
        """Graph vertices through peak ``truncate``, then a flat run to (1, 1)."""
        pts = [(Fraction(0), Fraction(0))]
        for n in range(1, truncate + 1):
            pts.append((self.peak(n), Fraction(1)))
            if n < truncate:
                pts.append((self.trough(n), self.trough_value(n)))
        pts.append((Fraction(1), Fraction(1)))
        return pts


MapModel = Union[PLMap, StaircaseMap]


def make_plmap(
    domain: ClosedInterval,
    breakpoints: Sequence[tuple[RationalLike, RationalLike]],
    name: str = "plmap",
) -> PLMap:
    bps = tuple((as_rational(x), as_rational(y)) for x, y in breakpoints)
    m = PLMap(domain, bps, name)
    validate(m)
    return m


def validate(m: MapModel) -> MapModel:
    """Check the type invariants; raises :class:`MapValidationError`."""
    if isinstance(m, StaircaseMap):
        return m
    bps = m.breakpoints
    if len(bps) < 2:
        raise MapValidationError("a piecewise-linear map needs at least 2 breakpoints")
    for i, ((x0, _), (x1, _)) in enumerate(zip(bps, bps[1:]), start=1):
        if not x0 < x1:
            raise MapValidationError(
                f"breakpoint {i + 1}: x={format_rational(x1)} does not strictly increase"
            )
    if bps[0][0] != m.domain.lo or bps[-1][0] != m.domain.hi:
        raise MapValidationError("breakpoints must start at domain.lo and end at domain.hi")
    for x, y in bps:
        if not m.domain.lo <= y <= m.domain.hi:
            raise MapValidationError(
                f"range escape: f({format_rational(x)}) = {format_rational(y)} "
                f"is outside {m.domain}"
            )
    return m


def evaluate(m: MapModel, x: RationalLike) -> Fraction:
    return m.evaluate(as_rational(x))


def image_interval(m: MapModel, J: ClosedInterval) -> ClosedInterval:
    return m.image_interval(J)


def image_set(m: MapModel, A: IntervalSet, cap: int = DEFAULT_COMPONENT_CAP) -> IntervalSet:
    return normalize([m.image_interval(c) for c in A], cap=cap)


def is_invariant(m: MapModel, A: IntervalSet) -> bool:
    from .exactset import contains

    return contains(A, image_set(m, A, cap=max(len(A), 1) * 2 + 1))


def _simplify(bps: list[tuple[Fraction, Fraction]]) -> list[tuple[Fraction, Fraction]]:
    """Drop breakpoints that sit on the line through their neighbours."""
    out = [bps[0]]
    for i in range(1, len(bps) - 1):
        x0, y0 = out[-1]
        x1, y1 = bps[i]
        x2, y2 = bps[i + 1]
        if (y1 - y0) * (x2 - x1) == (y2 - y1) * (x1 - x0):
            continue
        out.append(bps[i])
    out.append(bps[-1])
    return out


def compose(outer: PLMap, inner: PLMap, cap: int = DEFAULT_PIECE_CAP) -> PLMap:
    """Exact PL representation of ``outer . inner``."""
    for x, y in inner.breakpoints:
        if not outer.domain.lo <= y <= outer.domain.hi:
            raise DomainError("range of inner map is not inside the outer domain")
    oxs = outer.xs
    xs: list[Fraction] = []
    for x0, y0, x1, y1 in inner.pieces():
        xs.append(x0)
        if y0 == y1:
            continue
        lo, hi = (y0, y1) if y0 < y1 else (y1, y0)
        i = bisect_right(oxs, lo)
        crossings = []
        while i < len(oxs) and oxs[i] < hi:
            crossings.append(x0 + (oxs[i] - y0) * (x1 - x0) / (y1 - y0))
            i += 1
        if y0 > y1:
            crossings.reverse()
        xs.extend(crossings)
        if len(xs) > cap + 1:
            raise PieceBudgetExceeded(len(xs) - 1, cap)
    xs.append(inner.breakpoints[-1][0])
    bps = [(x, outer.evaluate(inner.evaluate(x))) for x in xs]
    bps = _simplify(bps)
    if len(bps) - 1 > cap:
        raise PieceBudgetExceeded(len(bps) - 1, cap)
    return PLMap(inner.domain, tuple(bps), f"{outer.name}o{inner.name}")


def iterates(m: PLMap, max_power: int, cap: int = DEFAULT_PIECE_CAP) -> Iterator[PLMap]:
    """Yield f, f^2, ..., f^max_power; raises with the completed degree."""
    cur = m
    for p in range(1, max_power + 1):
        if p > 1:
            try:
                cur = compose(m, cur, cap=cap)
            except PieceBudgetExceeded as exc:
                raise PieceBudgetExceeded(exc.pieces, cap, degree_completed=p - 1) from None
        yield PLMap(cur.domain, cur.breakpoints, m.name if p == 1 else f"{m.name}^{p}")


def iterate_pl(m: PLMap, p: int, cap: int = DEFAULT_PIECE_CAP) -> PLMap:
    if p < 1:
        raise ValueError("power must be >= 1")
    if m.piece_count > cap:
        raise PieceBudgetExceeded(m.piece_count, cap, degree_completed=0)
    last = m
    for last in iterates(m, p, cap=cap):
        pass
    return last


def restrict(m: PLMap, J: ClosedInterval, name: Optional[str] = None) -> PLMap:
    """``m`` as a self-map of the subinterval ``J`` (which must be invariant)."""
    img = m.image_interval(J)
    if not (J.lo <= img.lo and img.hi <= J.hi):
        raise DomainError(f"{J} is not invariant: its image is {img}")
    if J.degenerate:
        raise DomainError("cannot restrict to a degenerate interval")
    bps = [(J.lo, m.evaluate(J.lo))]
    bps.extend((x, y) for x, y in m.breakpoints if J.lo < x < J.hi)
    bps.append((J.hi, m.evaluate(J.hi)))
    return make_plmap(J, bps, name or f"{m.name}|{J}")


def builtin(name: str, parameter: RationalLike | None = None) -> MapModel:
    F = Fraction
    unit = ClosedInterval(F(0), F(1))
    if name == "example-3-1":
        return make_plmap(
            unit,
            [(0, 1), (F(1, 6), F(2, 3)), (F(1, 3), 1), (F(2, 3), 0), (1, F(1, 3))],
            name,
        )
    if name == "example-3-2":
        return StaircaseMap()
    if name == "tent":
        return make_plmap(unit, [(0, 0), (F(1, 2), 1), (1, 0)], name)
    if name == "identity":
        return make_plmap(unit, [(0, 0), (1, 1)], name)
    if name == "constant":
        if parameter is None:
            raise ValueError("the constant map needs a parameter c in [0, 1]")
        c = as_rational(parameter)
        if not 0 <= c <= 1:
            raise ValueError(f"constant value {format_rational(c)} is outside [0, 1]")
        return make_plmap(unit, [(0, c), (1, c)], f"constant-{format_rational(c)}")
    raise ValueError(f"unknown builtin map {name!r}; choose from {', '.join(BUILTIN_NAMES)}")


# --- .plm text format -------------------------------------------------------


def format_plm(m: MapModel) -> str:
    if isinstance(m, StaircaseMap):
        return f"# {m.name}\nstaircase\n"
    lines = [f"# {m.name}", "plmap", f"domain {format_rational(m.domain.lo)} {format_rational(m.domain.hi)}"]
    lines.extend(f"{format_rational(x)} {format_rational(y)}" for x, y in m.breakpoints)
    return "\n".join(lines) + "\n"


def parse_plm(text: str, name: str = "plmap") -> MapModel:
    rows: list[tuple[int, list[str]]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if body:
            rows.append((lineno, body.split()))
    if not rows:
        raise PlmSyntaxError(1, "empty map file")
    lineno, head = rows[0]
    if head == ["staircase"]:
        if len(rows) > 1:
            raise PlmSyntaxError(rows[1][0], "staircase takes no further lines")
        return StaircaseMap()
    if head != ["plmap"]:
        raise PlmSyntaxError(lineno, "first line must be 'plmap' or 'staircase'")
    if len(rows) < 2 or rows[1][1][0] != "domain" or len(rows[1][1]) != 3:
        raise PlmSyntaxError(rows[1][0] if len(rows) > 1 else lineno, "expected 'domain <lo> <hi>'")
    lineno, (_, lo, hi) = rows[1]
    try:
        domain = ClosedInterval(parse_rational(lo), parse_rational(hi))
    except ValueError as exc:
        raise PlmSyntaxError(lineno, str(exc)) from None
    bps: list[tuple[Fraction, Fraction]] = []
    for lineno, toks in rows[2:]:
        if len(toks) != 2:
            raise PlmSyntaxError(lineno, "expected '<x> <y>'")
        try:
            x, y = parse_rational(toks[0]), parse_rational(toks[1])
        except ValueError as exc:
            raise PlmSyntaxError(lineno, str(exc)) from None
        if bps and not x > bps[-1][0]:
            raise PlmSyntaxError(lineno, f"x={toks[0]} does not strictly increase")
        if not domain.lo <= y <= domain.hi:
            raise PlmSyntaxError(lineno, f"range escape: y={toks[1]} is outside {domain}")
        bps.append((x, y))
    try:
        return make_plmap(domain, bps, name)
    except MapValidationError as exc:
        raise PlmSyntaxError(rows[-1][0], str(exc)) from None
