"""The Hardy-Littlewood inequality and its reverse form, evaluated exactly."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .core import Interval, StepFunction, WeightedSpace, integrate
from .numeric import INF, Ext, add, fmt, is_inf, mul
from .rearrangement import decreasing_rearrangement, increasing_rearrangement


@dataclass(frozen=True)
class InequalityReport:
    lhs: Ext
    rhs: Ext
    holds: bool
    slack: Ext

    def to_dict(self) -> dict:
        return {"lhs": fmt(self.lhs), "rhs": fmt(self.rhs), "holds": self.holds, "slack": fmt(self.slack)}


def _report(lhs, rhs, holds) -> InequalityReport:
    slack = INF if (is_inf(lhs) or is_inf(rhs)) else abs(lhs - rhs)
    return InequalityReport(lhs, rhs, holds, slack)


def product_integral_on_halfline(a: StepFunction, b: StepFunction, upper: Ext) -> Ext:
    """``integral_0^upper a(t) b(t) dt`` for functions defined at least on ``(0, upper)``."""
    window = Interval(0, upper)
    a_, b_ = a.restrict(0, upper), b.restrict(0, upper)
    return integrate(a_ * b_, WeightedSpace.lebesgue(window))


def hardy_littlewood(f: StepFunction, g: StepFunction, space: WeightedSpace) -> InequalityReport:
    """``integral fg dmu <= integral_0^mu(R) f* g* dt``."""
    lhs = integrate(f * g, space)
    total = space.total_measure
    rhs = product_integral_on_halfline(
        decreasing_rearrangement(f, space), decreasing_rearrangement(g, space), total
    )
    return _report(lhs, rhs, lhs <= rhs)


def reverse_hardy_littlewood(f: StepFunction, g: StepFunction, space: WeightedSpace) -> InequalityReport:
    """``integral fg dmu >= integral_0^mu(R) f* g_* dt``, also on infinite spaces."""
    lhs = integrate(f * g, space)
    total = space.total_measure
    rhs = product_integral_on_halfline(
        decreasing_rearrangement(f, space), increasing_rearrangement(g, space), total
    )
    return _report(lhs, rhs, lhs >= rhs)


@dataclass(frozen=True)
class ChainReport:
    """The intermediate quantities for a nested simple ``f = sum alpha_i chi_{E_i}``.

    ``lhs = integral fg``, ``layered = sum alpha_i integral_{E_i} g``,
    ``restricted = sum alpha_i integral_0^{mu(E_i)} (g|E_i)_*``,
    ``lowered = sum alpha_i integral_0^{mu(E_i)} g_*``, ``rhs = integral f* g_*``.
    """

    lhs: Ext
    layered: Ext
    restricted: Ext
    lowered: Ext
    rhs: Ext
    holds: bool

    @property
    def slack(self) -> Ext:
        return INF if (is_inf(self.lhs) or is_inf(self.rhs)) else self.lhs - self.rhs

    def to_dict(self) -> dict:
        out = {k: fmt(getattr(self, k)) for k in ("lhs", "layered", "restricted", "lowered", "rhs")}
        out["holds"] = self.holds
        return out


def reverse_hl_simple_chain(
    layers: Sequence[tuple], g: StepFunction, space: WeightedSpace
) -> ChainReport:
    """Evaluate every link of the chain for ``f = sum alpha_i chi_{E_i}``, ``E_1 c E_2 c ...``.

    ``layers`` holds ``(alpha_i, E_i)`` with ``E_i`` either an ``Interval`` or a
    0/1 step function.
    """
    masks = []
    for alpha, E in layers:
        if alpha < 0:
            raise ValueError("layer coefficients must be nonnegative")
        mask = StepFunction.indicator(space.domain, E.lo, E.hi) if isinstance(E, Interval) else E
        if any(v not in (0, 1) for v in mask.values):
            raise ValueError("layer sets must be given as 0/1 indicators")
        masks.append((Fraction(alpha), mask))
    for (_, m1), (_, m2) in zip(masks, masks[1:]):
        if not m1.le(m2):
            raise ValueError("layers are not nested")
    f = StepFunction.constant(space.domain, 0)
    for alpha, mask in masks:
        f = f + mask.apply(lambda v, a=alpha: a * v)

    lhs = integrate(f * g, space)
    g_low = increasing_rearrangement(g, space)
    layered = restricted = lowered = Fraction(0)
    for alpha, mask in masks:
        sub = space.restrict(mask)
        size = sub.total_measure
        if is_inf(size):
            raise ValueError("layer sets must have finite measure")
        layered = add(layered, mul(alpha, integrate(g, sub)))
        if size > 0:
            g_sub_low = increasing_rearrangement(g, sub)
            restricted = add(restricted, mul(alpha, _integral_upto(g_sub_low, size)))
            lowered = add(lowered, mul(alpha, _integral_upto(g_low, size)))
    rhs = product_integral_on_halfline(decreasing_rearrangement(f, space), g_low, space.total_measure)
    holds = lhs == layered and layered >= restricted and restricted >= lowered and lowered == rhs
    return ChainReport(lhs, layered, restricted, lowered, rhs, holds)


def _integral_upto(phi: StepFunction, upper: Ext) -> Ext:
    if upper == 0:
        return Fraction(0)
    return integrate(phi.restrict(0, upper), WeightedSpace.lebesgue(Interval(0, upper)))
