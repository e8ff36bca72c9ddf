"""Embeddings ``L^p(nu) -> (L1 + Linf)(mu)`` for two densities on one interval.

The optimal constant is computed through the change of measure
``integral_E (dmu/dnu)**p' dnu = integral_E h dmu`` with
``h = (dmu/dnu)**(p'-1)``, so ``A**p'`` is the integral of the decreasing
rearrangement of ``h`` (with respect to ``mu``) over ``(0, min(mu(R), 1))``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .bp import BpPreconditionError, PowerTail, bp_check
from .core import HALF_LINE, Interval, StepFunction, WeightedSpace, common_cells, integrate_power, refine
from .numeric import INF, add, close, fmt, is_inf, le, lift, mul, rpow
from .rearrangement import decreasing_rearrangement, increasing_rearrangement


class NotAbsolutelyContinuous(ValueError):
    pass


@dataclass(frozen=True)
class TwoMeasures:
    w_mu: StepFunction
    w_nu: StepFunction

    def __post_init__(self):
        if self.w_mu.domain != self.w_nu.domain:
            raise ValueError("the two densities must share a domain")

    @property
    def domain(self) -> Interval:
        return self.w_mu.domain

    @property
    def mu(self) -> WeightedSpace:
        return WeightedSpace(self.w_mu)

    @property
    def nu(self) -> WeightedSpace:
        return WeightedSpace(self.w_nu)


def check_abs_continuity(m: TwoMeasures) -> bool:
    _, mu_vals, nu_vals = refine(m.w_mu, m.w_nu)
    return all(a == 0 for a, b in zip(mu_vals, nu_vals) if b == 0)


def radon_nikodym(m: TwoMeasures) -> StepFunction:
    if not check_abs_continuity(m):
        raise NotAbsolutelyContinuous("mu charges a nu-null piece")
    return m.w_mu.combine(m.w_nu, lambda a, b: a / b if b else Fraction(0))


def _integral_upto(phi: StepFunction, upper, transform=None):
    """``integral_0^upper transform(phi(t)) dt`` for ``phi`` on ``(0, M)``, ``M >= upper``."""
    acc = Fraction(0)
    for a, b, v in phi.pieces():
        if a >= upper:
            break
        value = v if transform is None else transform(v)
        acc = add(acc, mul(value, min(b, upper) - a))
    return acc


def l1_plus_linf_norm(f: StepFunction, space: WeightedSpace):
    """``integral_0^min(mu(R), 1) f*(t) dt``."""
    total = space.total_measure
    if total == 0:
        return Fraction(0)
    return _integral_upto(decreasing_rearrangement(f, space), min(total, Fraction(1)))


@dataclass(frozen=True)
class EmbeddingResult:
    absolutely_continuous: bool
    A: object
    A_pow: object  # A ** p' (A itself when p = 1)
    p: Fraction
    p_prime: object
    threshold: object
    top_set: StepFunction | None  # indicator of the optimal level set E

    @property
    def embeds(self) -> bool:
        return self.absolutely_continuous and not is_inf(self.A)

    def to_dict(self) -> dict:
        return {
            "absolutely_continuous": self.absolutely_continuous,
            "A": fmt(self.A),
            "A_pow_p_prime": fmt(self.A_pow),
            "p": fmt(self.p),
            "p_prime": fmt(self.p_prime),
            "threshold": fmt(self.threshold),
            "embeds": self.embeds,
            "top_set": None if self.top_set is None else self.top_set.to_dict(),
        }


def _top_set(h: StepFunction, space: WeightedSpace, budget):
    """A 0/1 indicator of a set of mu-measure ``budget`` on which h is largest."""
    cells = [(a, b, v, d) for a, b, v, d, _ in space.cells(h) if d > 0]
    cells.sort(key=lambda c: -c[2])
    pieces, left = [], budget
    for a, b, _, d in cells:
        if left == 0:
            break
        mass = INF if (is_inf(a) or is_inf(b)) else d * (b - a)
        if mass <= left:
            pieces.append((a, b, 1))
            left -= mass
            continue
        span = left / d
        if not is_inf(a):
            pieces.append((a, a + span, 1))
        elif not is_inf(b):
            pieces.append((b - span, b, 1))
        else:
            pieces.append((Fraction(0), span, 1))
        left = Fraction(0)
    return StepFunction.from_pieces(space.domain, pieces)


def embedding_constant(m: TwoMeasures, p) -> EmbeddingResult:
    p = Fraction(p)
    if p < 1:
        raise ValueError("need p >= 1")
    rn = radon_nikodym(m)
    mu = m.mu
    total = mu.total_measure
    budget = min(total, Fraction(1))
    if budget == 0:
        zero = Fraction(0)
        return EmbeddingResult(True, zero, zero, p, INF if p == 1 else p / (p - 1), zero, None)
    rn_star = decreasing_rearrangement(rn, mu)
    if p == 1:
        A = rn_star.values[0]
        E = _top_set(rn, mu, min(budget, _top_level_mass(rn, mu)))
        return EmbeddingResult(True, A, A, p, INF, A, E)
    q = 1 / (p - 1)  # p' - 1
    p_prime = p / (p - 1)
    A_pow = _integral_upto(rn_star, budget, lambda v: rpow(v, q))
    A = rpow(A_pow, 1 / p_prime)
    threshold = _value_before(rn_star, budget)
    E = _top_set(rn, mu, budget)
    return EmbeddingResult(True, A, A_pow, p, p_prime, rpow(threshold, q), E)


def _value_before(f_star: StepFunction, t):
    """``f*(t-)``."""
    for a, b, v in f_star.pieces():
        if a < t <= b:
            return v
    return f_star.values[-1]


def _top_level_mass(f: StepFunction, space: WeightedSpace):
    top = max(v for _, _, v, d, _ in space.cells(f) if d > 0)
    acc = Fraction(0)
    for _, _, v, d, mass in space.cells(f):
        if d > 0 and v == top:
            acc = add(acc, mass)
    return acc


@dataclass(frozen=True)
class EmbeddingNormReport:
    A: object
    checked: int
    violations: int
    max_ratio: float
    extremal_ratio: object

    @property
    def ok(self) -> bool:
        return self.violations == 0

    def to_dict(self) -> dict:
        return {
            "A": fmt(self.A),
            "checked": self.checked,
            "violations": self.violations,
            "max_ratio": self.max_ratio,
            "extremal_ratio": None if self.extremal_ratio is None else fmt(self.extremal_ratio),
        }


def _ratio(lhs, A, lp):
    denom = mul(A, lp)
    if denom == 0:
        return Fraction(0) if lhs == 0 else INF
    return lift(lhs) / lift(denom)


def norm_inequality_holds(f: StepFunction, m: TwoMeasures, res: EmbeddingResult):
    """``||f||_{L1+Linf(mu)} <= A ||f||_{L^p(nu)}`` in p-th-power form; returns (ok, lhs, Lp-norm)."""
    lhs = l1_plus_linf_norm(f, m.mu)
    p = res.p
    integral = integrate_power(f, p, m.nu)
    if p == 1:
        return le(lhs, mul(res.A, integral)), lhs, integral
    # lhs**p <= (A**p')**(p-1) * integral
    ok = le(rpow(lhs, p), mul(rpow(res.A_pow, p - 1), integral))
    return ok, lhs, rpow(integral, 1 / p)


def extremal_ratio(m: TwoMeasures, res: EmbeddingResult):
    """Ratio attained by ``f = (dmu/dnu)**(1/(p-1)) * chi_E`` (``chi_E`` itself for p = 1).

    The values of ``f`` may be irrational, so both norms are evaluated cell by
    cell: the (L1+Linf) norm by a greedy sort of the cells, the L^p norm by
    summing ``f**p`` against ``nu``.
    """
    if res.top_set is None:
        return None
    rn = radon_nikodym(m)
    q = Fraction(0) if res.p == 1 else 1 / (res.p - 1)
    cells = []
    for _, _, (r, e), d_mu, mu_mass in common_cells(m.mu, rn, res.top_set):
        if e and r > 0:
            nu_mass = mu_mass / r if not is_inf(mu_mass) else INF
            cells.append((rpow(r, q), mu_mass, nu_mass))
    cells.sort(key=lambda c: lift(c[0]), reverse=True)
    left, lhs = min(m.mu.total_measure, Fraction(1)), Fraction(0)
    for v, mass, _ in cells:
        take = min(mass, left)
        lhs = add(lhs, mul(v, take))
        left -= take
        if left == 0:
            break
    integral = Fraction(0)
    for v, _, nu_mass in cells:
        integral = add(integral, mul(rpow(v, res.p), nu_mass))
    return _ratio(lhs, res.A, rpow(integral, 1 / res.p))


def verify_embedding_norm(m: TwoMeasures, p, samples: Iterable[StepFunction]) -> EmbeddingNormReport:
    res = embedding_constant(m, p)
    checked = violations = 0
    best = 0.0
    for f in samples:
        checked += 1
        ok, lhs, lp = norm_inequality_holds(f, m, res)
        violations += not ok
        best = max(best, float(_ratio(lhs, res.A, lp)))
    ext_ratio = extremal_ratio(m, res)
    if ext_ratio is not None:
        best = max(best, float(ext_ratio))
    return EmbeddingNormReport(res.A, checked, violations, best, ext_ratio)


# the closing corollary


@dataclass(frozen=True)
class CorollaryReport:
    norm: object
    finite: bool
    A_pow: object | None
    identity: bool | None

    def to_dict(self) -> dict:
        return {
            "norm": fmt(self.norm),
            "finite": self.finite,
            "A_pow_p_prime": None if self.A_pow is None else fmt(self.A_pow),
            "identity": self.identity,
        }


def lowstar_as_weight(v: StepFunction, space: WeightedSpace) -> StepFunction:
    """``v_*`` on ``(0, inf)``, cut to zero past ``mu(R)`` on finite spaces."""
    low = increasing_rearrangement(v, space)
    total = space.total_measure
    if is_inf(total):
        return low
    return low.restrict(0, total).extend(HALF_LINE)


def _nondecreasing_tail(v: PowerTail) -> bool:
    if any(m.exponent < 0 for _, m in v.pieces if m.coeff != 0):
        return False
    for (iv1, m1), (_, m2) in zip(v.pieces, v.pieces[1:]):
        if not le(m1(iv1.hi), m2(iv1.hi)):
            return False
    return True


def corollary_check(space: WeightedSpace, v, p) -> CorollaryReport:
    p = Fraction(p)
    if not p > 1:
        raise ValueError("need p > 1")
    q = 1 / (p - 1)
    if isinstance(v, PowerTail):
        if space.domain != HALF_LINE or space.density != StepFunction.constant(HALF_LINE, 1):
            raise ValueError("power-tail weights are supported on Lebesgue (0, inf)")
        if not _nondecreasing_tail(v):
            raise ValueError("power-tail weights must be nondecreasing (then v_* = v)")
        if not bp_check(v, p).in_class:
            raise BpPreconditionError("v_* is not in B_p")
        norm = v.power(-q).integral(Fraction(0), Fraction(1))
        return CorollaryReport(norm, not is_inf(norm), None, None)

    w = lowstar_as_weight(v, space)
    if not bp_check(w, p).in_class:
        raise BpPreconditionError("v_* is not in B_p")
    budget = min(space.total_measure, Fraction(1))
    # v**(-q) is decreasing in v, so its decreasing rearrangement is (v_*)**(-q)
    norm = _integral_upto(w, budget, lambda x: rpow(x, -q)) if budget > 0 else Fraction(0)
    res = embedding_constant(TwoMeasures(space.density, v * space.density), p)
    return CorollaryReport(norm, not is_inf(norm), res.A_pow, close(res.A_pow, norm))
