"""Exact rearrangements, weighted Lorentz functionals and hull witnesses on step data."""

from .core import HALF_LINE, REAL_LINE, DomainMismatch, Interval, StepFunction, WeightedSpace, integrate, refine
from .numeric import INF, RationalParseError, fmt, parse_ext
from .rearrangement import (
    decreasing_rearrangement,
    distribution,
    increasing_rearrangement,
    lower_distribution,
    rearrangements,
)

__all__ = [
    "HALF_LINE",
    "INF",
    "REAL_LINE",
    "DomainMismatch",
    "Interval",
    "RationalParseError",
    "StepFunction",
    "WeightedSpace",
    "decreasing_rearrangement",
    "distribution",
    "fmt",
    "increasing_rearrangement",
    "integrate",
    "lower_distribution",
    "parse_ext",
    "rearrangements",
    "refine",
]
