"""Power-tail weights, the B_p condition, and the power-weight Lorentz example.

A ``PowerTail`` is a weight that is a single monomial ``c * (|x|/s)**beta`` on
each of finitely many intervals.  Step weights are the special case
``beta = 0``.  Integrals of monomials are done in closed form, so every B_p
decision rests on exact exponent comparisons rather than quadrature.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .core import HALF_LINE, Interval, StepFunction, _midpoint
from .numeric import (
    INF,
    MP,
    add,
    close,
    div,
    ext,
    fmt,
    is_exact,
    is_inf,
    le,
    lift,
    log,
    mul,
    rpow,
    sub,
)


class NonIntegrableWeight(ValueError):
    pass


class BpPreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class Monomial:
    """``coeff * (t / scale) ** exponent``."""

    coeff: object
    exponent: Fraction
    scale: Fraction = Fraction(1)

    def __post_init__(self):
        c = ext(self.coeff) if is_exact(self.coeff) or isinstance(self.coeff, str) else lift(self.coeff)
        if c < 0 or is_inf(c):
            raise ValueError("monomial coefficients must be finite and nonnegative")
        object.__setattr__(self, "coeff", c)
        object.__setattr__(self, "exponent", Fraction(self.exponent))
        object.__setattr__(self, "scale", Fraction(self.scale))
        if self.scale <= 0:
            raise ValueError("scale must be positive")

    def __call__(self, t):
        if self.coeff == 0:
            return Fraction(0)
        return mul(self.coeff, rpow(div(t, self.scale), self.exponent))

    def times(self, c, shift_exponent=Fraction(0)) -> "Monomial":
        """``c * t**shift_exponent * self`` rewritten as one monomial."""
        coeff = mul(mul(self.coeff, c), rpow(self.scale, shift_exponent))
        return Monomial(coeff, self.exponent + shift_exponent, self.scale)

    def power(self, e) -> "Monomial":
        e = Fraction(e)
        if self.coeff == 0:
            if e < 0:
                raise ZeroDivisionError("negative power of a vanishing monomial")
            return self
        return Monomial(rpow(self.coeff, e), self.exponent * e, self.scale)


def monomial_integrate(term: Monomial, lo, hi):
    """Closed-form ``integral_lo^hi term(t) dt`` for ``0 <= lo < hi <= inf``; inf if divergent."""
    if lo < 0 or not lo < hi:
        raise ValueError("need 0 <= lo < hi")
    if term.coeff == 0:
        return Fraction(0)
    beta, s = term.exponent, term.scale
    a, b = div(lo, s), div(hi, s)
    front = mul(term.coeff, s)
    if beta == -1:
        if a == 0 or is_inf(b):
            return INF
        return mul(front, sub(log(b), log(a)))
    e = beta + 1
    if e < 0 and a == 0:
        return INF
    if e > 0 and is_inf(b):
        return INF
    upper = Fraction(0) if is_inf(b) else rpow(b, e)
    lower = rpow(a, e) if a != 0 else Fraction(0)
    return mul(front, div(sub(upper, lower), e))


@dataclass(frozen=True)
class PowerTail:
    """A weight that is one monomial in ``|x|`` on each piece of a partition of ``domain``."""

    domain: Interval
    pieces: tuple  # ((Interval, Monomial), ...)

    def __post_init__(self):
        ps = tuple(sorted(self.pieces, key=lambda p: p[0].lo))
        if not ps:
            raise ValueError("a power tail needs at least one piece")
        if ps[0][0].lo != self.domain.lo or ps[-1][0].hi != self.domain.hi:
            raise ValueError("pieces must cover the domain")
        for (i1, _), (i2, _) in zip(ps, ps[1:]):
            if i1.hi != i2.lo:
                raise ValueError("pieces must be contiguous")
        for iv, _ in ps:
            if iv.lo < 0 < iv.hi:
                raise ValueError("split pieces at 0 so |x| is monotone on each")
        object.__setattr__(self, "pieces", ps)

    @classmethod
    def monomial(cls, coeff, exponent, domain: Interval = HALF_LINE, scale=1) -> "PowerTail":
        return cls(domain, ((domain, Monomial(coeff, exponent, scale)),))

    @classmethod
    def from_step(cls, f: StepFunction) -> "PowerTail":
        pieces = []
        for a, b, v in f.pieces():
            if is_inf(v):
                raise ValueError("step weight has infinite values")
            if a < 0 < b:
                pieces += [(Interval(a, 0), Monomial(v, 0)), (Interval(0, b), Monomial(v, 0))]
            else:
                pieces.append((Interval(a, b), Monomial(v, 0)))
        return cls(f.domain, tuple(pieces))

    @classmethod
    def abs_power(cls, alpha, domain: Interval) -> "PowerTail":
        """``|x| ** alpha`` on ``domain``."""
        alpha = Fraction(alpha)
        if domain.lo < 0 < domain.hi:
            parts = [Interval(domain.lo, 0), Interval(0, domain.hi)]
        else:
            parts = [domain]
        return cls(domain, tuple((iv, Monomial(1, alpha)) for iv in parts))

    @property
    def breaks(self) -> list:
        return [iv.lo for iv, _ in self.pieces[1:]]

    def __call__(self, x):
        for iv, m in self.pieces:
            if iv.lo < x < iv.hi:
                return m(abs(x))
        raise ValueError(f"{x} is outside the pieces (or on a breakpoint)")

    def term_integral(self, iv: Interval, m: Monomial, lo, hi):
        """``integral_lo^hi m(|x|) dx`` for ``(lo, hi)`` inside the piece ``iv``."""
        if iv.hi <= 0:
            return monomial_integrate(m, -hi, -lo)
        return monomial_integrate(m, lo, hi)

    def integral(self, lo=None, hi=None):
        lo = self.domain.lo if lo is None else lo
        hi = self.domain.hi if hi is None else hi
        acc = Fraction(0)
        for iv, m in self.pieces:
            a, b = max(iv.lo, lo), min(iv.hi, hi)
            if a < b:
                acc = add(acc, self.term_integral(iv, m, a, b))
        return acc

    def integrate_step(self, f: StepFunction, p=1, density: StepFunction | None = None):
        """``integral f**p * w * density dx`` with 0 * inf = 0."""
        if f.domain != self.domain or (density is not None and density.domain != self.domain):
            raise ValueError("domain mismatch")
        cuts = set(f.breaks) | set(self.breaks)
        if density is not None:
            cuts |= set(density.breaks)
        edges = [self.domain.lo, *sorted(cuts), self.domain.hi]
        acc = Fraction(0)
        for a, b in zip(edges, edges[1:]):
            m = _midpoint(a, b)
            fv = rpow(f(m), p)
            d = Fraction(1) if density is None else density(m)
            if fv == 0 or d == 0:
                continue
            iv, mono = next((iv, mono) for iv, mono in self.pieces if iv.lo <= a and b <= iv.hi)
            acc = add(acc, mul(mul(fv, d), self.term_integral(iv, mono, a, b)))
        return acc

    def power(self, e) -> "PowerTail":
        return PowerTail(self.domain, tuple((iv, m.power(e)) for iv, m in self.pieces))

    def to_dict(self) -> dict:
        return {
            "domain": self.domain.to_list(),
            "pieces": [
                {"interval": iv.to_list(), "coeff": fmt(m.coeff), "exponent": fmt(m.exponent), "scale": fmt(m.scale)}
                for iv, m in self.pieces
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PowerTail":
        dom = Interval(*(ext(x) for x in data["domain"]))
        pieces = []
        for item in data["pieces"]:
            iv = Interval(*(ext(x) for x in item["interval"]))
            pieces.append((iv, Monomial(ext(item["coeff"]), ext(item["exponent"]), ext(item.get("scale", "1")))))
        return cls(dom, tuple(pieces))


def as_power_tail(w) -> PowerTail:
    return w if isinstance(w, PowerTail) else PowerTail.from_step(w)


# B_p


@dataclass(frozen=True)
class BpReport:
    in_class: bool
    constant_C: object
    checked_grid: tuple
    asymptotic_exponents: tuple  # (near 0, near inf)
    limits: tuple  # (ratio limit at 0+, ratio limit at inf)

    def to_dict(self) -> dict:
        return {
            "in_class": self.in_class,
            "C": fmt(self.constant_C),
            "grid_size": len(self.checked_grid),
            "exponents": [fmt(e) for e in self.asymptotic_exponents],
            "limits": [fmt(x) for x in self.limits],
        }


def tail_integral(w: PowerTail, r, p):
    """``L(r) = integral_r^inf w(t) t**-p dt``."""
    acc = Fraction(0)
    for iv, m in w.pieces:
        if iv.hi <= r:
            continue
        acc = add(acc, monomial_integrate(m.times(1, -Fraction(p)), max(iv.lo, r), iv.hi))
    return acc


def head_integral(w: PowerTail, r):
    """``W(r) = integral_0^r w(t) dt``."""
    return w.integral(Fraction(0), r) if r > 0 else Fraction(0)


def bp_ratio(w: PowerTail, r, p):
    """``r**p * L(r) / W(r)``: the smallest admissible C at this r."""
    L, W = tail_integral(w, r, p), head_integral(w, r)
    if L == 0:
        return Fraction(0)
    if W == 0 or is_inf(L):
        return INF
    return div(mul(rpow(r, p), L), W)


def _derivative_sign(w: PowerTail, r, p) -> int:
    # sign of d/dr ratio, up to the positive factor r**(p-1) / W**2
    L, W, wr = lift(tail_integral(w, r, p)), lift(head_integral(w, r)), lift(w(r))
    r, p = lift(r), lift(p)
    D = p * L * W - MP.power(r, 1 - p) * wr * W - r * wr * L
    return 0 if D == 0 else (1 if D > 0 else -1)


def _samples(lo, hi) -> list:
    two = Fraction(2)
    if lo == 0 and is_inf(hi):
        return [two**k for k in range(-40, 41)]
    if lo == 0:
        return [hi * two**-k for k in range(60, 0, -1)]
    if is_inf(hi):
        return [lo * two**k for k in range(1, 61)]
    return [lo + (hi - lo) * j / 64 for j in range(1, 64)]


def _bisect(w, p, a, b):
    for _ in range(80):
        m = (a + b) / 2
        if _derivative_sign(w, m, p) > 0:
            a = m
        else:
            b = m
    return (a + b) / 2


def bp_check(w, p) -> BpReport:
    """Decide whether ``w`` on ``(0, inf)`` satisfies the B_p condition and bound C."""
    w = as_power_tail(w)
    p = Fraction(p)
    if w.domain != HALF_LINE:
        raise ValueError("B_p weights live on (0, inf)")
    first, last = w.pieces[0][1], w.pieces[-1][1]
    b0, bt = first.exponent, last.exponent

    if first.coeff == 0:
        lim0 = INF
    elif b0 <= -1:
        raise NonIntegrableWeight(f"t**{b0} is not integrable near 0")
    elif b0 >= p - 1:
        lim0 = INF
    else:
        lim0 = (b0 + 1) / (p - 1 - b0)
    if last.coeff == 0:
        lim_inf = Fraction(0)
    elif bt >= p - 1:
        lim_inf = INF
    elif bt > -1:
        lim_inf = (bt + 1) / (p - 1 - bt)
    else:
        lim_inf = Fraction(0)
    exps = (b0, bt)
    if is_inf(lim0) or is_inf(lim_inf):
        return BpReport(False, INF, (), exps, (lim0, lim_inf))

    exact_cands = [lim0, lim_inf] + [bp_ratio(w, b, p) for b in w.breaks]
    numeric_cands, grid = [], []
    for iv, _ in w.pieces:
        pts = _samples(iv.lo, iv.hi)
        grid += pts
        vals = [bp_ratio(w, r, p) for r in pts]
        numeric_cands += vals
        signs = [_derivative_sign(w, r, p) for r in pts]
        for i in range(len(pts) - 1):
            if signs[i] > 0 and signs[i + 1] < 0:
                numeric_cands.append(bp_ratio(w, _bisect(w, p, pts[i], pts[i + 1]), p))
    best = max(exact_cands, key=lift)
    top_numeric = max(numeric_cands, key=lift, default=Fraction(0))
    if lift(top_numeric) > lift(best) and not close(top_numeric, best, MP.mpf("1e-40")):
        best = top_numeric
    return BpReport(not is_inf(best), best, tuple(grid), exps, (lim0, lim_inf))


def bp_inequality_holds(w, p, C, r) -> bool:
    """Direct check of ``L(r) <= C r**-p W(r)`` at one ``r`` (margin REL_TOL)."""
    w = as_power_tail(w)
    L = tail_integral(w, r, p)
    rhs = mul(C, div(head_integral(w, r), rpow(r, p)))
    return le(L, rhs)


# the |x|**alpha example


def power_weight_rearrangement(alpha) -> PowerTail:
    """Nondecreasing rearrangement of ``|x|**alpha`` on the real line: ``(t/2)**alpha``."""
    alpha = Fraction(alpha)
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    return PowerTail.monomial(1, alpha, HALF_LINE, scale=2 if alpha else 1)


@dataclass(frozen=True)
class LorentzIdentityReport:
    q: Fraction
    lambda_integral: object
    lorentz_integral: object
    integrand_identity: bool
    scaled_integral: object
    scaling_identity: bool

    @property
    def ok(self) -> bool:
        return self.integrand_identity and self.scaling_identity

    def to_dict(self) -> dict:
        return {
            "q": fmt(self.q),
            "lambda": fmt(self.lambda_integral),
            "lorentz": fmt(self.lorentz_integral),
            "scaled": fmt(self.scaled_integral),
            "ok": self.ok,
        }


def classical_lorentz_identity_check(g_star: StepFunction, alpha, p) -> LorentzIdentityReport:
    """``int g*^p t^alpha`` against ``int g*^p t^(p/q - 1)`` with ``q = p/(alpha+1)``."""
    alpha, p = Fraction(alpha), Fraction(p)
    if not (0 <= alpha < p - 1):
        raise ValueError("need 0 <= alpha < p - 1")
    if g_star.domain != HALF_LINE:
        g_star = g_star.extend(HALF_LINE)
    q = p / (alpha + 1)
    lam = PowerTail.monomial(1, alpha).integrate_step(g_star, p)
    lor = PowerTail.monomial(1, p / q - 1).integrate_step(g_star, p)
    scaled = power_weight_rearrangement(alpha).integrate_step(g_star, p)
    return LorentzIdentityReport(
        q, lam, lor, lam == lor if is_exact(lam) else close(lam, lor),
        scaled, close(scaled, mul(rpow(Fraction(1, 2), alpha), lam)),
    )


# B_p => the two inclusions


@dataclass(frozen=True)
class ChainCheck:
    lower_bound_ok: int
    l1_linf_finite: int
    vacuous: int
    total: int

    @property
    def ok(self) -> bool:
        return self.lower_bound_ok == self.total and self.l1_linf_finite + self.vacuous == self.total

    def to_dict(self) -> dict:
        return {
            "first_inclusion": f"{self.lower_bound_ok}/{self.total}",
            "second_inclusion": f"{self.l1_linf_finite}/{self.total - self.vacuous}",
            "vacuous": self.vacuous,
            "ok": self.ok,
        }


def bp_implies_banach_chain_check(w, p, space, v, samples: Iterable[StepFunction]) -> ChainCheck:
    """On each sample: ``Lambda^p(v_*) <= L^p(v)`` and, if finite, finite (L1+Linf) norm."""
    from .embedding import l1_plus_linf_norm
    from .hull import lambda_integral, weighted_lp_integral

    p = Fraction(p)
    if not p > 1:
        raise BpPreconditionError("need 1 < p < inf")
    report = bp_check(w, p)
    if not report.in_class:
        raise BpPreconditionError("the weight is not in B_p")
    ok = finite = vacuous = n = 0
    for f in samples:
        n += 1
        lam = lambda_integral(f, space, w, p)
        lp = weighted_lp_integral(f, space, v, p)
        if le(lam, lp):
            ok += 1
        if is_inf(lam):
            vacuous += 1
        elif not is_inf(l1_plus_linf_norm(f, space)):
            finite += 1
    return ChainCheck(ok, finite, vacuous, n)


__all__ = [
    "BpPreconditionError",
    "BpReport",
    "ChainCheck",
    "LorentzIdentityReport",
    "Monomial",
    "NonIntegrableWeight",
    "PowerTail",
    "as_power_tail",
    "bp_check",
    "bp_implies_banach_chain_check",
    "bp_inequality_holds",
    "bp_ratio",
    "classical_lorentz_identity_check",
    "head_integral",
    "monomial_integrate",
    "power_weight_rearrangement",
    "tail_integral",
]
