"""Seeded random instances for campaigns and property tests.

Step functions have at most 8 pieces.  Positive values are rationals ``a/b``
with ``1 <= a, b <= 1000`` (about a fifth of the pieces are zero), and
breakpoints are rationals with denominators up to 8 in ``[-12, 12]``.
Domains are drawn from finite, half-infinite and two-sided intervals.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .core import HALF_LINE, Interval, StepFunction, WeightedSpace
from .numeric import INF, is_inf

MAX_PIECES = 8
MAX_NUM = 1000
MAX_DEN = 1000
DOMAIN_KINDS = ("finite", "half", "two-sided")


def rng_for(seed: int, *salt) -> random.Random:
    """Independent stream for a (seed, salt) pair; stable across runs and platforms."""
    return random.Random(repr((seed, *salt)))


def random_value(rng: random.Random, zero_prob=0.2, max_num=MAX_NUM, max_den=MAX_DEN) -> Fraction:
    if rng.random() < zero_prob:
        return Fraction(0)
    return Fraction(rng.randint(1, max_num), rng.randint(1, max_den))


def random_domain(rng: random.Random, kind: str | None = None) -> Interval:
    kind = kind or rng.choice(DOMAIN_KINDS)
    if kind == "finite":
        lo = Fraction(rng.randint(-6, 2))
        return Interval(lo, lo + Fraction(rng.randint(1, 24), rng.randint(1, 4)))
    if kind == "half":
        return HALF_LINE if rng.random() < 0.7 else Interval(-INF, Fraction(rng.randint(-4, 4)))
    return Interval(-INF, INF)


def random_breaks(rng: random.Random, domain: Interval, count: int) -> tuple:
    lo = domain.lo if not is_inf(domain.lo) else Fraction(-12)
    hi = domain.hi if not is_inf(domain.hi) else Fraction(12)
    pts = set()
    for _ in range(count * 3):
        if len(pts) >= count:
            break
        den = rng.randint(1, 8)
        x = Fraction(rng.randint(int(lo * den) - 1, int(hi * den) + 1), den)
        if domain.lo < x < domain.hi:
            pts.add(x)
    return tuple(sorted(pts))


def random_step(
    rng: random.Random,
    domain: Interval,
    zero_prob=0.2,
    zero_tails=False,
    max_num=MAX_NUM,
    max_den=MAX_DEN,
    positive=False,
) -> StepFunction:
    """A step function with at most ``MAX_PIECES`` pieces on ``domain``.

    ``zero_tails`` forces the value 0 on unbounded pieces (finite L^p norms).
    """
    breaks = random_breaks(rng, domain, rng.randint(0, MAX_PIECES - 1))
    vals = [random_value(rng, 0 if positive else zero_prob, max_num, max_den) for _ in range(len(breaks) + 1)]
    if zero_tails:
        if is_inf(domain.lo):
            vals[0] = Fraction(0)
        if is_inf(domain.hi):
            vals[-1] = Fraction(0)
    return StepFunction(domain, breaks, tuple(vals))


def random_space(rng: random.Random, domain: Interval | None = None, null_prob=0.1) -> WeightedSpace:
    """Density with small positive values, occasionally zero on a bounded piece."""
    domain = domain or random_domain(rng)
    breaks = random_breaks(rng, domain, rng.randint(0, 4))
    vals = [Fraction(rng.randint(1, 12), rng.randint(1, 6)) for _ in range(len(breaks) + 1)]
    for i in range(1, len(vals) - 1):
        if rng.random() < null_prob:
            vals[i] = Fraction(0)
    return WeightedSpace(StepFunction(domain, breaks, tuple(vals)))


def random_instance(rng: random.Random, kind: str | None = None, **kw):
    space = random_space(rng, random_domain(rng, kind))
    return space, random_step(rng, space.domain, **kw)


def random_nonincreasing(rng: random.Random, M=None, max_pieces=MAX_PIECES, max_num=50, max_den=8) -> StepFunction:
    """A nonincreasing step function on ``(0, M)`` (``M = inf`` by default) with finite values."""
    M = INF if M is None else M
    k = rng.randint(1, max_pieces)
    top = M if not is_inf(M) else Fraction(12)
    eighths = int(top * 8)
    cuts = sorted({Fraction(rng.randint(1, eighths - 1), 8) for _ in range(k - 1)}) if eighths >= 2 else []
    cuts = [c for c in cuts if c < top]
    vals = sorted((random_value(rng, 0, max_num, max_den) for _ in range(len(cuts) + 1)), reverse=True)
    if is_inf(M) and rng.random() < 0.8:
        vals[-1] = Fraction(0)
    return StepFunction(Interval(0, M), tuple(cuts), tuple(vals))


@dataclass(frozen=True)
class Chain:
    """``f_n = f + c * chi_{A_n}``, ``A_n`` nested with ``mu(A_n) = m * 2^-n``."""

    space: WeightedSpace
    f: StepFunction
    members: tuple
    masses: tuple


def decreasing_chain(rng: random.Random, length: int = 6) -> Chain:
    space, f = random_instance(rng)
    cells = [(a, b, d) for a, b, _, d, _ in space.cells(f) if d > 0]
    a, b, d = rng.choice(cells)
    if is_inf(a) and is_inf(b):
        a = Fraction(0)
    room = (b - a) * d if not (is_inf(a) or is_inf(b)) else Fraction(4)
    m = min(room, Fraction(rng.randint(1, 8), rng.randint(1, 4)))
    c = random_value(rng, 0, 40, 4)
    members, masses = [], []
    for n in range(1, length + 1):
        mass = m / 2**n
        width = mass / d
        lo, hi = (a, a + width) if not is_inf(a) else (b - width, b)
        bump = StepFunction.indicator(space.domain, lo, hi, c)
        members.append(f + bump)
        masses.append(mass)
    return Chain(space, f, tuple(members), tuple(masses))
