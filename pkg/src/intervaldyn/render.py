"""Static SVG output: cobweb diagrams and labelled interval-set rows.

Coordinates are computed exactly and only converted to decimal text at the
last moment, at a fixed 9 significant digits; nothing rendered here feeds
back into analysis.
"""

from __future__ import annotations

from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Sequence
from xml.sax.saxutils import escape

from .exactset import IntervalSet, RationalLike, as_rational, format_rational
from .mapmodel import MapModel, StaircaseMap
from .orbit import orbit
from .report import write_atomic

DIGITS = 9
SIZE = 400
MARGIN = 20
DEFAULT_STAIRCASE_TRUNCATION = 8


def dec(q: Fraction) -> str:
    with localcontext() as ctx:
        ctx.prec = DIGITS
        d = Decimal(q.numerator) / Decimal(q.denominator)
    s = format(d.normalize(), "f")
    return "0" if s in ("-0", "") else s


def _header(width: int, height: int, extra: str = "") -> list[str]:
    note = f"decimal precision: {DIGITS} significant digits"
    if extra:
        note += f"; {extra}"
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f"<!-- intervaldyn; {note} -->",
    ]


def graph_vertices(m: MapModel, truncate: int = DEFAULT_STAIRCASE_TRUNCATION) -> list[tuple[Fraction, Fraction]]:
    if isinstance(m, StaircaseMap):
        return m.graph_vertices(truncate)
    return list(m.breakpoints)


def cobweb_svg(
    m: MapModel,
    seed: RationalLike,
    steps: int = 20,
    truncate: int = DEFAULT_STAIRCASE_TRUNCATION,
) -> str:
    lo, w = m.domain.lo, m.domain.length

    def px(x: Fraction) -> str:
        return dec(MARGIN + (x - lo) / w * SIZE)

    def py(y: Fraction) -> str:
        return dec(MARGIN + SIZE - (y - lo) / w * SIZE)

    extra = f"staircase truncated at n={truncate}" if isinstance(m, StaircaseMap) else ""
    out = _header(SIZE + 2 * MARGIN, SIZE + 2 * MARGIN, extra)
    out.append(f"<title>{escape(m.name)} cobweb from {format_rational(as_rational(seed))}</title>")
    pts = " ".join(f"{px(x)},{py(y)}" for x, y in graph_vertices(m, truncate))
    out.append(f'<polyline class="graph" fill="none" stroke="black" points="{pts}"/>')
    a, b = m.domain.lo, m.domain.hi
    out.append(
        f'<line class="diagonal" stroke="gray" x1="{px(a)}" y1="{py(a)}" x2="{px(b)}" y2="{py(b)}"/>'
    )
    xs = orbit(m, seed, steps).points
    for x, y in zip(xs, xs[1:]):
        out.append(f'<line class="cobweb" stroke="red" x1="{px(x)}" y1="{py(x)}" x2="{px(x)}" y2="{py(y)}"/>')
        out.append(f'<line class="cobweb" stroke="red" x1="{px(x)}" y1="{py(y)}" x2="{px(y)}" y2="{py(y)}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def sets_svg(m: MapModel, rows: Sequence[tuple[str, IntervalSet]]) -> str:
    row_h, label_w = 30, 80
    width = label_w + SIZE + 2 * MARGIN
    height = 2 * MARGIN + row_h * len(rows)
    lo, w = m.domain.lo, m.domain.length
    out = _header(width, height)
    out.append(f"<title>{escape(m.name)} interval sets</title>")
    for i, (label, A) in enumerate(rows):
        y = MARGIN + i * row_h
        out.append(f'<g class="row" data-label="{escape(label)}">')
        out.append(f'<text x="{MARGIN}" y="{y + 18}">{escape(label)}</text>')
        out.append(
            f'<rect class="track" x="{label_w + MARGIN}" y="{y + 12}" width="{SIZE}" height="2" fill="#ddd"/>'
        )
        for c in A:
            x0 = label_w + MARGIN + (c.lo - lo) / w * SIZE
            span = (c.hi - c.lo) / w * SIZE
            exact = f"[{format_rational(c.lo)}, {format_rational(c.hi)}]"
            out.append(
                f'<rect class="component" x="{dec(x0)}" y="{y + 4}" width="{dec(max(span, Fraction(1)))}" '
                f'height="18" fill="steelblue"><title>{exact}</title></rect>'
            )
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_cobweb(m: MapModel, seed: RationalLike, steps: int, path: str, truncate: int = DEFAULT_STAIRCASE_TRUNCATION) -> str:
    svg = cobweb_svg(m, seed, steps, truncate)
    write_atomic(path, svg)
    return svg


def render_sets(m: MapModel, rows: Sequence[tuple[str, IntervalSet]], path: str) -> str:
    svg = sets_svg(m, rows)
    write_atomic(path, svg)
    return svg
