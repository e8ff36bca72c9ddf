"""Intervals, step functions, weighted spaces and exact integration.

Everything is defined almost everywhere: a step function is a finite list of
open subintervals with one value each, and the value at a breakpoint is never
stored.  Adjacent pieces with equal values are merged on construction, so two
step functions are equal a.e. iff they compare equal as objects.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator

from .numeric import INF, Ext, add, ext, fmt, is_inf, mul, rpow


class DomainMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Interval:
    """Open interval ``(lo, hi)`` with rational or infinite endpoints."""

    lo: Ext
    hi: Ext

    def __post_init__(self):
        lo, hi = ext(self.lo), ext(self.hi)
        if lo == INF or hi == -INF:
            raise ValueError(f"bad interval endpoints ({lo}, {hi})")
        if not lo < hi:
            raise ValueError(f"empty interval ({fmt(lo)}, {fmt(hi)})")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def length(self) -> Ext:
        if is_inf(self.lo) or is_inf(self.hi):
            return INF
        return self.hi - self.lo

    @property
    def bounded(self) -> bool:
        return not (is_inf(self.lo) or is_inf(self.hi))

    def __contains__(self, x) -> bool:
        return self.lo < x < self.hi

    def contains_interval(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def to_list(self) -> list[str]:
        return [fmt(self.lo), fmt(self.hi)]

    def __str__(self):
        return f"({fmt(self.lo)}, {fmt(self.hi)})"


HALF_LINE = Interval(0, INF)
REAL_LINE = Interval(-INF, INF)


def _midpoint(a, b) -> Fraction:
    """A rational point strictly inside (a, b), also for infinite ends."""
    if is_inf(a) and is_inf(b):
        return Fraction(0)
    if is_inf(a):
        return b - 1
    if is_inf(b):
        return a + 1
    return (a + b) / 2


@dataclass(frozen=True)
class StepFunction:
    """Nonnegative function, constant on the open pieces cut out by ``breaks``."""

    domain: Interval
    breaks: tuple
    values: tuple

    def __post_init__(self):
        breaks = [ext(b) for b in self.breaks]
        values = [ext(v) for v in self.values]
        if len(values) != len(breaks) + 1:
            raise ValueError("need exactly one value per piece")
        for b in breaks:
            if is_inf(b) or b not in self.domain:
                raise ValueError(f"breakpoint {fmt(b)} not interior to {self.domain}")
        if any(b1 >= b2 for b1, b2 in zip(breaks, breaks[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if any(v < 0 for v in values):
            raise ValueError("step functions are nonnegative")
        merged_b, merged_v = [], [values[0]]
        for b, v in zip(breaks, values[1:]):
            if v != merged_v[-1]:
                merged_b.append(b)
                merged_v.append(v)
        object.__setattr__(self, "breaks", tuple(merged_b))
        object.__setattr__(self, "values", tuple(merged_v))

    # construction

    @classmethod
    def constant(cls, domain: Interval, value=0) -> "StepFunction":
        return cls(domain, (), (value,))

    @classmethod
    def from_pieces(cls, domain: Interval, pieces: Iterable[tuple], fill=0) -> "StepFunction":
        """Assemble from disjoint ``(a, b, value)`` pieces; gaps get ``fill``."""
        pieces = sorted(((ext(a), ext(b), ext(v)) for a, b, v in pieces), key=lambda p: p[0])
        breaks, values = [], []
        cursor = domain.lo
        for a, b, v in pieces:
            if not a < b:
                continue
            if a < cursor or b > domain.hi or a < domain.lo:
                raise ValueError(f"piece ({fmt(a)}, {fmt(b)}) overlaps or leaves {domain}")
            if a > cursor:
                if cursor != domain.lo:
                    breaks.append(cursor)
                values.append(ext(fill))
                cursor = a
            if cursor != domain.lo:
                breaks.append(cursor)
            values.append(v)
            cursor = b
        if cursor < domain.hi:
            if cursor != domain.lo:
                breaks.append(cursor)
            values.append(ext(fill))
        return cls(domain, tuple(breaks), tuple(values))

    @classmethod
    def indicator(cls, domain: Interval, a, b, value=1) -> "StepFunction":
        a, b = max(ext(a), domain.lo), min(ext(b), domain.hi)
        return cls.from_pieces(domain, [(a, b, value)])

    # access

    @property
    def edges(self) -> tuple:
        return (self.domain.lo, *self.breaks, self.domain.hi)

    def pieces(self) -> Iterator[tuple]:
        e = self.edges
        for i, v in enumerate(self.values):
            yield e[i], e[i + 1], v

    def __call__(self, x) -> Ext:
        x = ext(x)
        if not (self.domain.lo < x < self.domain.hi):
            raise ValueError(f"{fmt(x)} outside {self.domain}")
        return self.values[bisect.bisect_right(self.breaks, x)]

    def value_on(self, a, b) -> Ext:
        """Value on a subinterval the function is constant on."""
        return self(_midpoint(a, b))

    @property
    def max_value(self) -> Ext:
        return max(self.values)

    @property
    def min_value(self) -> Ext:
        return min(self.values)

    def is_nonincreasing(self) -> bool:
        return all(v1 >= v2 for v1, v2 in zip(self.values, self.values[1:]))

    def is_nondecreasing(self) -> bool:
        return all(v1 <= v2 for v1, v2 in zip(self.values, self.values[1:]))

    # algebra

    def apply(self, fn: Callable[[Ext], Ext]) -> "StepFunction":
        return StepFunction(self.domain, self.breaks, tuple(fn(v) for v in self.values))

    def combine(self, other: "StepFunction", op: Callable[[Ext, Ext], Ext]) -> "StepFunction":
        breaks, fv, gv = refine(self, other)
        return StepFunction(self.domain, breaks, tuple(op(a, b) for a, b in zip(fv, gv)))

    def __mul__(self, other: "StepFunction") -> "StepFunction":
        return self.combine(other, mul)

    def __add__(self, other: "StepFunction") -> "StepFunction":
        return self.combine(other, add)

    def power(self, p) -> "StepFunction":
        """Pointwise ``f ** p``; only for exponents that keep every value rational."""
        out = []
        for v in self.values:
            r = rpow(v, p)
            if not (isinstance(r, Fraction) or is_inf(r)):
                raise ValueError(f"{fmt(v)}**{p} is irrational; use integrate_power")
            out.append(r)
        return StepFunction(self.domain, self.breaks, tuple(out))

    def le(self, other: "StepFunction") -> bool:
        """Pointwise ``self <= other`` a.e. (same domain)."""
        _, fv, gv = refine(self, other)
        return all(a <= b for a, b in zip(fv, gv))

    def restrict(self, lo, hi) -> "StepFunction":
        lo, hi = ext(lo), ext(hi)
        if lo < self.domain.lo or hi > self.domain.hi:
            raise DomainMismatch(f"({fmt(lo)}, {fmt(hi)}) is not inside {self.domain}")
        sub = Interval(lo, hi)
        return StepFunction.from_pieces(
            sub, [(max(a, lo), min(b, hi), v) for a, b, v in self.pieces() if a < hi and b > lo]
        )

    def extend(self, domain: Interval, fill=0) -> "StepFunction":
        """Extend to a larger domain with constant ``fill`` outside."""
        if not domain.contains_interval(self.domain):
            raise DomainMismatch(f"{domain} does not contain {self.domain}")
        return StepFunction.from_pieces(domain, list(self.pieces()), fill=fill)

    def shift(self, c) -> "StepFunction":
        """The function ``t -> self(t + c)``."""
        c = ext(c)
        return StepFunction(
            Interval(self.domain.lo - c, self.domain.hi - c),
            tuple(b - c for b in self.breaks),
            self.values,
        )

    # serialization

    def to_dict(self) -> dict:
        return {
            "domain": self.domain.to_list(),
            "breaks": [fmt(b) for b in self.breaks],
            "values": [fmt(v) for v in self.values],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "StepFunction":
        lo, hi = data["domain"]
        return cls(Interval(ext(lo), ext(hi)), tuple(data.get("breaks", ())), tuple(data["values"]))

    def __str__(self):
        parts = [f"{fmt(v)} on ({fmt(a)}, {fmt(b)})" for a, b, v in self.pieces()]
        return "; ".join(parts)


def refine(f: StepFunction, g: StepFunction) -> tuple[tuple, tuple, tuple]:
    """Express ``f`` and ``g`` on their merged breakpoints.

    Returns ``(breaks, f_values, g_values)``; the value lists are not merged,
    so this is the common-partition representation rather than a StepFunction.
    """
    if f.domain != g.domain:
        raise DomainMismatch(f"domains differ: {f.domain} vs {g.domain}")
    fb, gb = f.breaks, g.breaks
    breaks, fv, gv = [], [], []
    i = j = 0
    while True:
        fv.append(f.values[i])
        gv.append(g.values[j])
        if i < len(fb) and j < len(gb):
            a, b = fb[i], gb[j]
            breaks.append(min(a, b))
            i += a <= b
            j += b <= a
        elif i < len(fb):
            breaks.append(fb[i])
            i += 1
        elif j < len(gb):
            breaks.append(gb[j])
            j += 1
        else:
            break
    return tuple(breaks), tuple(fv), tuple(gv)


@dataclass(frozen=True)
class WeightedSpace:
    """An interval with the measure ``density(x) dx``."""

    density: StepFunction

    def __post_init__(self):
        if any(is_inf(v) for v in self.density.values):
            raise ValueError("densities must be finite")

    @classmethod
    def lebesgue(cls, domain: Interval) -> "WeightedSpace":
        return cls(StepFunction.constant(domain, 1))

    @property
    def domain(self) -> Interval:
        return self.density.domain

    @property
    def total_measure(self) -> Ext:
        return integrate(StepFunction.constant(self.domain, 1), self)

    def measure(self, a, b) -> Ext:
        return integrate(StepFunction.indicator(self.domain, a, b), self)

    def restrict(self, mask: StepFunction) -> "WeightedSpace":
        """The measure ``mu`` restricted to the support of ``mask`` (a 0/1 function)."""
        return WeightedSpace(self.density.combine(mask, lambda d, m: d if m else Fraction(0)))

    def cells(self, f: StepFunction) -> Iterator[tuple]:
        """Yield ``(a, b, f_value, density, mass)`` over the common partition."""
        breaks, fv, dv = refine(f, self.density)
        edges = (self.domain.lo, *breaks, self.domain.hi)
        for i, (v, d) in enumerate(zip(fv, dv)):
            a, b = edges[i], edges[i + 1]
            length = INF if (is_inf(a) or is_inf(b)) else b - a
            yield a, b, v, d, mul(d, length)


def integrate(f: StepFunction, space: WeightedSpace) -> Ext:
    """Exact ``integral of f dmu`` with 0 * inf = 0."""
    if f.domain != space.domain:
        raise DomainMismatch(f"function on {f.domain}, space on {space.domain}")
    acc = Fraction(0)
    for _, _, v, _, mass in space.cells(f):
        acc = add(acc, mul(v, mass))
    return acc


def common_cells(space: WeightedSpace, *funcs: StepFunction) -> Iterator[tuple]:
    """Yield ``(a, b, values, density, mass)`` on the common partition of all ``funcs``."""
    for fn in funcs:
        if fn.domain != space.domain:
            raise DomainMismatch(f"function on {fn.domain}, space on {space.domain}")
    breaks = sorted(set(space.density.breaks).union(*(fn.breaks for fn in funcs)))
    edges = (space.domain.lo, *breaks, space.domain.hi)
    for i in range(len(edges) - 1):
        a, b = edges[i], edges[i + 1]
        m = _midpoint(a, b)
        d = space.density(m)
        length = INF if (is_inf(a) or is_inf(b)) else b - a
        yield a, b, tuple(fn(m) for fn in funcs), d, mul(d, length)


def integrate_power(f: StepFunction, p, space: WeightedSpace, weight: StepFunction | None = None):
    """``integral of f**p * weight dmu``; exact unless some ``value**p`` is irrational."""
    funcs = (f,) if weight is None else (f, weight)
    acc = Fraction(0)
    for _, _, vals, _, mass in common_cells(space, *funcs):
        term = rpow(vals[0], p)
        if weight is not None:
            term = mul(term, vals[1])
        acc = add(acc, mul(term, mass))
    return acc
