"""Weighted Lorentz lower bounds and hull witnesses for ``L^p(R, v)``.

For a weight ``v`` on a weighted space, every ``f`` satisfies
``integral f*^p v_* <= integral f^p v dmu``.  Conversely, for a nonincreasing
``g*`` the witness builders return an ``f`` equimeasurable with ``g*`` whose
``L^p(v)`` integral is within a factor ``(1 + eps)^p`` of the lower bound (or
at most ``eps^p`` when ``v_*`` vanishes identically).  All comparisons are made
on p-th powers, so they are exact whenever the values stay rational.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Literal

from .bp import PowerTail
from .core import HALF_LINE, Interval, StepFunction, WeightedSpace, integrate_power
from .inequalities import InequalityReport
from .mpt import build_increasing_mpt, compose_with_rearrangement, ryff_conditions, tiling_mpt
from .numeric import INF, MP, add, div, fmt, is_inf, le, lift, mul, rpow, sub
from .rearrangement import decreasing_rearrangement, distribution, increasing_rearrangement, level_measures


class EpsilonZeroNotAvailable(ValueError):
    pass


class VstarIsZero(ValueError):
    pass


class VstarNotZero(ValueError):
    pass


class UnboundedSupportPiece(ValueError):
    pass


CaseTag = Literal["KappaInfinite", "FiniteS", "InfiniteS", "EpsilonZero", "VstarZero"]


@dataclass(frozen=True)
class HullInstance:
    space: WeightedSpace
    v: object  # StepFunction or PowerTail
    p: Fraction
    v_lowstar: object = None
    S: object = None
    T: object = None
    kappa_S: object = None

    def __post_init__(self):
        object.__setattr__(self, "p", Fraction(self.p))
        if self.p <= 0:
            raise ValueError("p must be positive")
        if isinstance(self.v, PowerTail):
            if self.v.domain != self.space.domain:
                raise ValueError("weight and space domains differ")
            return
        levels = level_measures(self.v, self.space)
        if not levels:
            raise ValueError("the space has zero total measure")
        T = levels[-1][0]
        infinite = [lv for lv, m in levels if is_inf(m)]
        S = infinite[0] if infinite else T
        kappa = Fraction(0)
        for lv, m in levels:
            if lv < S:
                kappa = add(kappa, m)
        object.__setattr__(self, "v_lowstar", increasing_rearrangement(self.v, self.space))
        object.__setattr__(self, "S", S)
        object.__setattr__(self, "T", T)
        object.__setattr__(self, "kappa_S", kappa)

    @property
    def vstar_is_zero(self) -> bool:
        return self.v_lowstar is not None and self.v_lowstar.values == (0,)


def _on_half_line(g_star: StepFunction) -> StepFunction:
    if g_star.domain == HALF_LINE:
        return g_star
    if g_star.domain.lo != 0:
        raise ValueError("a rearrangement lives on (0, M)")
    return g_star.extend(HALF_LINE)


def lambda_integral_of_rearrangement(g_star: StepFunction, w, p):
    """``integral_0^inf g*(t)^p w(t) dt`` (w a step function or a PowerTail on the half-line)."""
    g = _on_half_line(g_star)
    if isinstance(w, PowerTail):
        return w.integrate_step(g, p)
    return integrate_power(g, p, WeightedSpace.lebesgue(HALF_LINE), weight=w)


def lambda_integral(g: StepFunction, space: WeightedSpace, w, p):
    return lambda_integral_of_rearrangement(decreasing_rearrangement(g, space), w, p)


def lambda_norm(g: StepFunction, space: WeightedSpace, w, p):
    return rpow(lambda_integral(g, space, w, p), 1 / Fraction(p))


def weighted_lp_integral(f: StepFunction, space: WeightedSpace, v, p):
    """``integral f^p v dmu``."""
    if isinstance(v, PowerTail):
        return v.integrate_step(f, p, density=space.density)
    return integrate_power(f, p, space, weight=v)


def weighted_lp_norm(f: StepFunction, space: WeightedSpace, v, p):
    return rpow(weighted_lp_integral(f, space, v, p), 1 / Fraction(p))


def hull_lower_bound(f: StepFunction, inst: HullInstance) -> InequalityReport:
    if inst.v_lowstar is None:
        raise ValueError("v_* is not available for this weight")
    lhs = lambda_integral(f, inst.space, inst.v_lowstar, inst.p)
    rhs = weighted_lp_integral(f, inst.space, inst.v, inst.p)
    slack = INF if (is_inf(lhs) or is_inf(rhs)) else abs(sub(rhs, lhs))
    return InequalityReport(lhs, rhs, le(lhs, rhs), slack)


@dataclass(frozen=True)
class WitnessReport:
    f: StepFunction
    equimeasurable_with_g: bool
    lambda_pow: object  # p-th power of the Lorentz functional
    lp_pow: object  # p-th power of the L^p(v) norm
    upper_pow: object  # (1+eps)^p * lambda_pow, or eps^p in the degenerate case
    epsilon_used: Fraction
    case_tag: CaseTag
    p: Fraction = Fraction(1)

    @property
    def sandwich_holds(self) -> bool:
        lower = le(self.lambda_pow, self.lp_pow)
        return lower and le(self.lp_pow, self.upper_pow)

    @property
    def lambda_norm(self):
        return rpow(self.lambda_pow, 1 / self.p)

    @property
    def lp_norm(self):
        return rpow(self.lp_pow, 1 / self.p)

    def to_dict(self) -> dict:
        return {
            "case": self.case_tag,
            "epsilon": fmt(self.epsilon_used),
            "f": self.f.to_dict(),
            "equimeasurable": self.equimeasurable_with_g,
            "lambda_pow": fmt(self.lambda_pow),
            "lp_pow": fmt(self.lp_pow),
            "upper_pow": fmt(self.upper_pow),
            "sandwich": self.sandwich_holds,
        }


def _same_distribution(f: StepFunction, space: WeightedSpace, g_star: StepFunction) -> bool:
    return distribution(f, space) == distribution(g_star, WeightedSpace.lebesgue(g_star.domain))


def _region_mask(v: StepFunction, keep) -> StepFunction:
    return v.apply(lambda x: Fraction(1) if keep(x) else Fraction(0))


def _in_second_region(x, S, eps: Fraction, p: Fraction) -> bool:
    """``S <= x < (1+eps)^p S``, decided exactly via ``(x/S)^b < (1+eps)^a`` for ``p = a/b``.

    With ``eps = 0`` the region is the level set ``{x = S}``, and likewise for
    ``S = inf`` and for ``S = 0`` (a weight vanishing on a finite space).
    """
    if eps == 0 or is_inf(S) or S == 0:
        return x == S
    if is_inf(x) or x < S:
        return False
    return (x / S) ** p.denominator < (1 + eps) ** p.numerator


def hull_witness(g_star: StepFunction, inst: HullInstance, epsilon) -> WitnessReport:
    """Build ``f`` with ``f* = g*`` and ``L^p(v)`` integral at most ``(1+eps)^p`` times the lower bound."""
    if isinstance(inst.v, PowerTail):
        raise ValueError("hull_witness needs a step weight")
    eps = Fraction(epsilon)
    if eps < 0:
        raise ValueError("epsilon must be nonnegative")
    if inst.vstar_is_zero:
        raise VstarIsZero("v_* vanishes identically; use hull_witness_degenerate")
    space, v, p = inst.space, inst.v, inst.p
    if not g_star.is_nonincreasing():
        raise ValueError("g* must be nonincreasing")
    total = space.total_measure
    if g_star.domain.lo != 0 or g_star.domain.hi > total:
        raise ValueError("g* must live on (0, M) with M <= mu(R)")
    if eps == 0 and ryff_conditions(v, space).kind == "Neither" and is_inf(total):
        raise EpsilonZeroNotAvailable("v satisfies neither condition and mu(R) is infinite")

    S, kappa = inst.S, inst.kappa_S
    g = g_star if g_star.domain.hi == total else g_star.extend(Interval(0, total))
    r1 = _region_mask(v, lambda x: x < S)
    r2 = _region_mask(v, lambda x: _in_second_region(x, S, eps, p))

    pieces = StepFunction.constant(space.domain, 0)
    space1 = space.restrict(r1)
    if space1.total_measure > 0:
        sigma1 = build_increasing_mpt(v, space1)
        pieces = pieces + compose_with_rearrangement(g.restrict(0, kappa), sigma1)
    space2 = space.restrict(r2)
    sigma2 = tiling_mpt(space2)
    tail = g.shift(kappa).restrict(0, total - kappa if not is_inf(total) else INF)
    f = pieces + compose_with_rearrangement(tail, sigma2)

    lam = lambda_integral_of_rearrangement(g_star, inst.v_lowstar, p)
    lp = weighted_lp_integral(f, space, v, p)
    if eps == 0:
        tag = "EpsilonZero"
    else:
        tag = "InfiniteS" if is_inf(S) else "FiniteS"
    upper = mul(rpow(1 + eps, p), lam)
    return WitnessReport(f, _same_distribution(f, space, g_star), lam, lp, upper, eps, tag, p)


def _tail_threshold_point(v: PowerTail, theta):
    """A nonnegative integer ``a`` with ``v(x) < theta`` for all ``x`` in the decaying tail beyond ``a``."""
    iv, m = v.pieces[-1]
    if m.coeff == 0:
        return math.ceil(max(iv.lo, 0))
    # c (t/s)^beta < theta  <=>  t > s (c/theta)^(1/|beta|)
    t = lift(m.scale) * MP.power(lift(m.coeff) / lift(theta), 1 / lift(-m.exponent))
    return max(int(MP.ceil(t)) + 1, math.ceil(max(iv.lo, 0)))


def _decays_at_infinity(v: PowerTail) -> bool:
    iv, m = v.pieces[-1]
    return is_inf(iv.hi) and (m.coeff == 0 or m.exponent < 0)


def hull_witness_degenerate(g_star: StepFunction, inst: HullInstance, epsilon) -> WitnessReport:
    """Witness with ``L^p(v)`` norm at most ``eps`` when ``v_* = 0``."""
    eps = Fraction(epsilon)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    space, v, p = inst.space, inst.v, inst.p
    upper = rpow(eps, p)
    if all(x == 0 for x in g_star.values):
        f = StepFunction.constant(space.domain, 0)
        lp = weighted_lp_integral(f, space, v, p)
        return WitnessReport(f, _same_distribution(f, space, g_star), Fraction(0), lp, upper, eps, "VstarZero", p)

    if not isinstance(v, PowerTail):
        if not inst.vstar_is_zero:
            raise VstarNotZero("v_* does not vanish identically")
        zero_set = space.restrict(_region_mask(v, lambda x: x == 0))
        sigma = tiling_mpt(zero_set)
        f = compose_with_rearrangement(_on_half_line(g_star), sigma)
    else:
        if space.density != StepFunction.constant(space.domain, 1):
            raise ValueError("power-tail weights are supported on Lebesgue measure")
        if not _decays_at_infinity(v):
            raise VstarNotZero("the weight does not decay at +inf")
        pieces, cursor = [], None
        for k, (a, b, c) in enumerate(g_star.pieces()):
            if c == 0:
                continue
            if is_inf(b):
                raise UnboundedSupportPiece("a positive piece of g* has infinite length")
            length = b - a
            # v < eps^p 2^-(k+1) / (c^p * length) on the chosen interval
            theta = div(mul(rpow(eps, p), Fraction(1, 2 ** (k + 1))), mul(rpow(c, p), length))
            start = Fraction(_tail_threshold_point(v, theta))
            if cursor is not None:
                start = max(start, cursor)
            pieces.append((start, start + length, c))
            cursor = start + length
        f = StepFunction.from_pieces(space.domain, pieces)
    lp = weighted_lp_integral(f, space, v, p)
    return WitnessReport(f, _same_distribution(f, space, g_star), Fraction(0), lp, upper, eps, "VstarZero", p)


@dataclass
class HullCampaignReport:
    total: int = 0
    lower_ok: int = 0
    witnesses: int = 0
    witness_ok: int = 0
    skipped: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures and self.lower_ok == self.total and self.witness_ok == self.witnesses

    def to_dict(self) -> dict:
        return {
            "cases": self.total,
            "lower_bound_ok": self.lower_ok,
            "witnesses": self.witnesses,
            "witness_ok": self.witness_ok,
            "skipped_eps0": self.skipped,
            "failures": self.failures[:10],
            "ok": self.ok,
        }


def ri_hull_verify(inst: HullInstance, sample_gs: Iterable[StepFunction], epsilons: Iterable) -> HullCampaignReport:
    """For each sample ``g``: the lower bound, then a witness ``f`` with ``f* = g*`` per epsilon."""
    rep = HullCampaignReport()
    epsilons = [Fraction(e) for e in epsilons]
    for i, g in enumerate(sample_gs):
        rep.total += 1
        if hull_lower_bound(g, inst).holds:
            rep.lower_ok += 1
        else:
            rep.failures.append(f"sample {i}: lower bound fails")
        g_star = decreasing_rearrangement(g, inst.space)
        for eps in epsilons:
            try:
                if inst.vstar_is_zero:
                    if eps == 0:
                        rep.skipped += 1
                        continue
                    w = hull_witness_degenerate(g_star, inst, eps)
                else:
                    w = hull_witness(g_star, inst, eps)
            except EpsilonZeroNotAvailable:
                rep.skipped += 1
                continue
            except ValueError as exc:
                rep.witnesses += 1
                rep.failures.append(f"sample {i}, eps {eps}: {exc}")
                continue
            rep.witnesses += 1
            if w.equimeasurable_with_g and w.sandwich_holds:
                rep.witness_ok += 1
            else:
                rep.failures.append(f"sample {i}, eps {eps}: witness check failed")
    return rep
