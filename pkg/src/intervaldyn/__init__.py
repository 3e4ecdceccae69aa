"""Exact analysis of interval maps: hulls, indecomposability, periodic
points and Devaney chaos, with certified counterexamples."""

from .exactset import ClosedInterval, IntervalSet, interval, normalize, parse_rational
from .mapmodel import PLMap, StaircaseMap, builtin, parse_plm, format_plm
from .verdict import Budget, Status, Verdict

__all__ = [
    "Budget",
    "ClosedInterval",
    "IntervalSet",
    "PLMap",
    "StaircaseMap",
    "Status",
    "Verdict",
    "builtin",
    "format_plm",
    "interval",
    "normalize",
    "parse_plm",
    "parse_rational",
]
__version__ = "0.1.0"
