"""Distribution functions and the two rearrangements of a step function.

All four objects are computed by exact level-set accounting: the cells of
``f`` are grouped by value, the measure of each level set is summed, and the
rearrangements are laid out by sorting the levels.  The ``*_formula`` helpers
recompute the same objects straight from their defining inf/sup formulas and
exist to cross-check the level-set route.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable

from .core import HALF_LINE, Interval, StepFunction, WeightedSpace, _midpoint, integrate
from .numeric import INF, Ext, add, is_inf


@lru_cache(maxsize=4096)
def level_measures(f: StepFunction, space: WeightedSpace) -> tuple[tuple[Ext, Ext], ...]:
    """``((value, mu{f = value}), ...)`` ascending by value, null levels dropped."""
    acc: dict = {}
    for _, _, v, _, mass in space.cells(f):
        acc[v] = add(acc.get(v, Fraction(0)), mass)
    return tuple((v, m) for v, m in sorted(acc.items()) if m != 0)


def _total_measure(levels) -> Ext:
    tot = Fraction(0)
    for _, m in levels:
        tot = add(tot, m)
    return tot


def essential_sup(f: StepFunction, space: WeightedSpace) -> Ext:
    levels = level_measures(f, space)
    return levels[-1][0] if levels else Fraction(0)


@lru_cache(maxsize=4096)
def distribution(f: StepFunction, space: WeightedSpace) -> StepFunction:
    """``s -> mu{f > s}`` on ``(0, inf)``."""
    levels = level_measures(f, space)
    cuts = [v for v, _ in levels if 0 < v < INF]
    pieces = []
    edges = [Fraction(0), *cuts, INF]
    for a, b in zip(edges, edges[1:]):
        s = _midpoint(a, b)
        pieces.append((a, b, _total_measure([(v, m) for v, m in levels if v > s])))
    return StepFunction.from_pieces(HALF_LINE, pieces)


@lru_cache(maxsize=4096)
def lower_distribution(f: StepFunction, space: WeightedSpace) -> StepFunction:
    """``s -> mu{f < s}`` on ``(0, inf)``; may take the value inf."""
    levels = level_measures(f, space)
    cuts = [v for v, _ in levels if 0 < v < INF]
    pieces = []
    edges = [Fraction(0), *cuts, INF]
    for a, b in zip(edges, edges[1:]):
        s = _midpoint(a, b)
        pieces.append((a, b, _total_measure([(v, m) for v, m in levels if v < s])))
    return StepFunction.from_pieces(HALF_LINE, pieces)


@lru_cache(maxsize=4096)
def decreasing_rearrangement(f: StepFunction, space: WeightedSpace) -> StepFunction:
    """The nonincreasing rearrangement ``f*`` on ``(0, mu(R))``."""
    levels = level_measures(f, space)
    if not levels:
        raise ValueError("the space has zero total measure")
    pieces, cursor = [], Fraction(0)
    for v, m in reversed(levels):
        end = add(cursor, m)
        pieces.append((cursor, end, v))
        cursor = end
        if is_inf(cursor):
            break
    return StepFunction.from_pieces(Interval(0, cursor), pieces)


@lru_cache(maxsize=4096)
def increasing_rearrangement(f: StepFunction, space: WeightedSpace) -> StepFunction:
    """The nondecreasing rearrangement ``f_*`` on ``(0, inf)``.

    On a finite space it equals ``+inf`` past ``mu(R)``; if the zero set has
    infinite measure it vanishes identically.
    """
    levels = level_measures(f, space)
    pieces, cursor = [], Fraction(0)
    for v, m in levels:
        end = add(cursor, m)
        pieces.append((cursor, end, v))
        cursor = end
        if is_inf(cursor):
            break
    if not is_inf(cursor):
        pieces.append((cursor, INF, INF))
    return StepFunction.from_pieces(HALF_LINE, pieces)


@dataclass(frozen=True)
class Rearrangements:
    mu_f: StepFunction
    kappa_f: StepFunction
    f_star: StepFunction
    f_lowstar: StepFunction


def rearrangements(f: StepFunction, space: WeightedSpace) -> Rearrangements:
    return Rearrangements(
        mu_f=distribution(f, space),
        kappa_f=lower_distribution(f, space),
        f_star=decreasing_rearrangement(f, space),
        f_lowstar=increasing_rearrangement(f, space),
    )


def equimeasurable(f: StepFunction, space_f: WeightedSpace, g: StepFunction, space_g: WeightedSpace) -> bool:
    return distribution(f, space_f) == distribution(g, space_g)


def finite_space_duality_check(f: StepFunction, space: WeightedSpace) -> bool:
    """``f_*(t) == f*(mu(R) - t)`` on ``(0, mu(R))``."""
    total = space.total_measure
    if is_inf(total):
        raise ValueError("duality check needs a finite measure space")
    f_star = decreasing_rearrangement(f, space)
    reflected = StepFunction(
        f_star.domain,
        tuple(total - b for b in reversed(f_star.breaks)),
        tuple(reversed(f_star.values)),
    )
    return increasing_rearrangement(f, space).restrict(0, total) == reflected


def layer_cake_check(f: StepFunction, space: WeightedSpace) -> bool:
    """``integral of f dmu == integral_0^mu(R) f*(t) dt``."""
    f_star = decreasing_rearrangement(f, space)
    return integrate(f, space) == integrate(f_star, WeightedSpace.lebesgue(f_star.domain))


# Definition-level formulas.  Each takes the (lower) distribution as a step
# function on (0, inf) and returns a step function in t on (0, inf).


def _in_t(phi: StepFunction, evaluate: Callable[[Fraction], Ext]) -> StepFunction:
    cuts = sorted({v for v in phi.values if 0 < v < INF})
    edges = [Fraction(0), *cuts, INF]
    return StepFunction.from_pieces(
        HALF_LINE, [(a, b, evaluate(_midpoint(a, b))) for a, b in zip(edges, edges[1:])]
    )


def sup_formula(kappa: StepFunction) -> StepFunction:
    """``t -> sup{s > 0 : kappa(s) < t}`` (empty sup is 0)."""

    def at(t):
        ends = [b for _, b, u in kappa.pieces() if u < t]
        return max(ends) if ends else Fraction(0)

    return _in_t(kappa, at)


def inf_formula(kappa: StepFunction) -> StepFunction:
    """``t -> inf{s > 0 : kappa(s) >= t}`` (empty inf is inf)."""

    def at(t):
        starts = [a for a, _, u in kappa.pieces() if u >= t]
        return min(starts) if starts else INF

    return _in_t(kappa, at)


def length_formula(kappa: StepFunction) -> StepFunction:
    """``t -> |{s > 0 : kappa(s) < t}|``."""

    def at(t):
        acc = Fraction(0)
        for a, b, u in kappa.pieces():
            if u < t:
                acc = add(acc, INF if is_inf(b) else b - a)
        return acc

    return _in_t(kappa, at)


def decreasing_formula(mu_f: StepFunction) -> StepFunction:
    """``t -> inf{s > 0 : mu_f(s) <= t}`` on ``(0, inf)``."""

    def at(t):
        starts = [a for a, _, u in mu_f.pieces() if u <= t]
        return min(starts) if starts else INF

    return _in_t(mu_f, at)
