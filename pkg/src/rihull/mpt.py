"""Measure-preserving transformations from a weighted space onto (0, mu(R)).

A transformation is a finite list of pieces.  An ``AffinePiece`` maps a
source interval of constant density ``d`` onto a target interval by
``x -> offset + d * (x - source.lo)``, so length is pushed forward to
Lebesgue measure exactly.  An ``InterleavePiece`` takes several sources of
infinite measure onto one half-line ``(offset, inf)`` by dealing out blocks of
``block`` units of measure round-robin; it is needed when a level set has
more than one unbounded component, or an unbounded component to the left.
Density-zero intervals are null and listed separately.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal

from .core import Interval, StepFunction, WeightedSpace
from .numeric import INF, Ext, add, ext, fmt, is_inf
from .rearrangement import level_measures


class RyffNeitherCondition(ValueError):
    """No transformation with ``f = f_* o sigma`` exists; carries the witness level."""

    def __init__(self, witness):
        super().__init__(f"neither Ryff condition holds (witness level s = {fmt(witness)})")
        self.witness = witness


@dataclass(frozen=True)
class AffinePiece:
    source: Interval
    offset: Fraction
    slope: Fraction

    @property
    def target(self) -> Interval:
        length = self.source.length
        return Interval(self.offset, INF if is_inf(length) else self.offset + self.slope * length)

    def __call__(self, x):
        return self.offset + self.slope * (x - self.source.lo)

    def to_dict(self) -> dict:
        return {"source": self.source.to_list(), "offset": fmt(self.offset), "slope": fmt(self.slope)}


@dataclass(frozen=True)
class InterleavePiece:
    sources: tuple
    densities: tuple
    offset: Fraction
    block: Fraction = Fraction(1)

    @property
    def target(self) -> Interval:
        return Interval(self.offset, INF)

    def _anchor(self, i):
        src = self.sources[i]
        return (src.lo, 1) if not is_inf(src.lo) else (src.hi, -1)

    def __call__(self, x):
        for i, src in enumerate(self.sources):
            if x in src:
                end, direction = self._anchor(i)
                u = self.densities[i] * (x - end) * direction
                j = math.floor(u / self.block)
                return self.offset + (j * len(self.sources) + i) * self.block + (u - j * self.block)
        raise ValueError(f"{fmt(x)} is not in any source")

    def blocks(self, rounds: int):
        """Affine parts of the first ``rounds`` rounds plus the remaining tails.

        Yields ``(lo, hi, t0, x0, slope)`` meaning ``sigma(x) = t0 + slope * (x - x0)``
        on ``(lo, hi)``, where ``x0`` is the end nearer the anchor.  Tails have
        ``t0 = None``.
        """
        k = len(self.sources)
        for i, d in enumerate(self.densities):
            end, direction = self._anchor(i)
            for j in range(rounds):
                near = end + direction * j * self.block / d
                far = end + direction * (j + 1) * self.block / d
                t0 = self.offset + (j * k + i) * self.block
                yield (min(near, far), max(near, far), t0, near, direction * d)
            near = end + direction * rounds * self.block / d
            lo, hi = (near, self.sources[i].hi) if direction > 0 else (self.sources[i].lo, near)
            yield (lo, hi, None, near, direction * d)

    def to_dict(self) -> dict:
        return {
            "interleave": [s.to_list() for s in self.sources],
            "densities": [fmt(d) for d in self.densities],
            "offset": fmt(self.offset),
            "block": fmt(self.block),
        }


@dataclass(frozen=True)
class MPTransform:
    pieces: tuple
    null_sources: tuple = field(default=())

    @property
    def domain(self) -> Interval:
        srcs = self.sources()
        return Interval(min(s.lo for s in srcs), max(s.hi for s in srcs))

    def sources(self) -> list[Interval]:
        out = list(self.null_sources)
        for p in self.pieces:
            out.extend(p.sources if isinstance(p, InterleavePiece) else [p.source])
        return out

    def __call__(self, x):
        x = ext(x)
        for p in self.pieces:
            if isinstance(p, InterleavePiece):
                if any(x in s for s in p.sources):
                    return p(x)
            elif x in p.source:
                return p(x)
        raise ValueError(f"sigma is not defined at {fmt(x)} (null set or outside)")

    def to_dict(self) -> dict:
        return {
            "pieces": [p.to_dict() for p in self.pieces],
            "null": [s.to_list() for s in self.null_sources],
        }


@dataclass(frozen=True)
class MPTCheck:
    ok: bool
    reason: str = ""

    def __bool__(self):
        return self.ok


@dataclass(frozen=True)
class RyffVerdict:
    kind: Literal["CondI", "CondII", "Neither"]
    T: Ext
    kappa_T: Ext
    witness: Ext | None = None


def ryff_conditions(f: StepFunction, space: WeightedSpace) -> RyffVerdict:
    """Classify ``f`` by the two conditions under which ``f = f_* o sigma`` is solvable.

    (i) ``kappa_f(T) < inf``; (ii) ``kappa_f(s) < inf`` for ``s < T`` and
    ``mu{f = T} = 0``, where ``T`` is the essential supremum.  For step data
    (ii) can never hold on its own because the top level always has positive
    measure, but it is evaluated as stated.
    """
    levels = level_measures(f, space)
    if not levels:
        raise ValueError("the space has zero total measure")
    T = levels[-1][0]
    kappa_T = Fraction(0)
    for v, m in levels[:-1]:
        kappa_T = add(kappa_T, m)
    if not is_inf(kappa_T):
        return RyffVerdict("CondI", T, kappa_T)
    below_finite = all(not is_inf(m) for v, m in levels if v < T)
    top_null = levels[-1][1] == 0
    if below_finite and top_null:
        return RyffVerdict("CondII", T, kappa_T)
    first_infinite = next(i for i, (_, m) in enumerate(levels) if is_inf(m))
    return RyffVerdict("Neither", T, kappa_T, witness=levels[first_infinite + 1][0])


def _positive_cells(space: WeightedSpace, f: StepFunction):
    cells, null = [], []
    for a, b, v, d, _ in space.cells(f):
        if d == 0:
            null.append(Interval(a, b))
        else:
            cells.append((a, b, v, d))
    return cells, null


def _lay_out(groups, null, block=Fraction(1)) -> MPTransform:
    """Assign consecutive targets to groups of cells, left to right inside a group."""
    pieces, offset = [], Fraction(0)
    for cells in groups:
        bounded = [c for c in cells if not (is_inf(c[0]) or is_inf(c[1]))]
        unbounded = [c for c in cells if is_inf(c[0]) or is_inf(c[1])]
        if is_inf(offset) and (bounded or unbounded):
            raise ValueError("cannot place cells after an infinite target")
        for a, b, _, d in bounded:
            pieces.append(AffinePiece(Interval(a, b), offset, d))
            offset += d * (b - a)
        if unbounded:
            split = []
            for a, b, v, d in unbounded:
                if is_inf(a) and is_inf(b):
                    split += [(a, Fraction(0), v, d), (Fraction(0), b, v, d)]
                else:
                    split.append((a, b, v, d))
            if len(split) == 1 and not is_inf(split[0][0]):
                a, b, _, d = split[0]
                pieces.append(AffinePiece(Interval(a, b), offset, d))
            else:
                pieces.append(
                    InterleavePiece(
                        tuple(Interval(a, b) for a, b, _, _ in split),
                        tuple(d for *_, d in split),
                        offset,
                        block,
                    )
                )
            offset = INF
    return MPTransform(tuple(pieces), tuple(null))


def _grouped(cells, descending: bool):
    values = sorted({c[2] for c in cells}, reverse=descending)
    return [[c for c in cells if c[2] == v] for v in values]


def build_increasing_mpt(f: StepFunction, space: WeightedSpace) -> MPTransform:
    """A transformation with ``f = f_* o sigma`` a.e.; raises when none exists."""
    verdict = ryff_conditions(f, space)
    if verdict.kind == "Neither":
        raise RyffNeitherCondition(verdict.witness)
    cells, null = _positive_cells(space, f)
    return _lay_out(_grouped(cells, descending=False), null)


def build_decreasing_mpt(f: StepFunction, space: WeightedSpace) -> MPTransform:
    """A transformation with ``f = f* o sigma`` a.e.

    Works whenever every positive level set has finite measure (the zero set
    may be infinite; it is then mapped onto the tail).
    """
    for v, m in level_measures(f, space):
        if v > 0 and is_inf(m):
            raise ValueError(f"level {fmt(v)} has infinite measure; f* o sigma cannot reproduce f")
    cells, null = _positive_cells(space, f)
    return _lay_out(_grouped(cells, descending=True), null)


def tiling_mpt(space: WeightedSpace, block=Fraction(1)) -> MPTransform:
    """Canonical left-to-right transformation of a space onto ``(0, mu(R))``."""
    cells, null = _positive_cells(space, StepFunction.constant(space.domain, 0))
    return _lay_out([cells], null, block=Fraction(block))


def verify_mpt(sigma: MPTransform, space: WeightedSpace) -> MPTCheck:
    """Exactly check disjoint covering sources, slope = density, and tiling targets."""
    density = space.density
    srcs = sorted(sigma.sources(), key=lambda s: s.lo)
    if not srcs:
        return MPTCheck(False, "no sources")
    if srcs[0].lo != space.domain.lo or srcs[-1].hi != space.domain.hi:
        return MPTCheck(False, "sources do not reach both ends of the domain")
    for s1, s2 in zip(srcs, srcs[1:]):
        if s1.hi != s2.lo:
            kind = "overlap" if s1.hi > s2.lo else "gap"
            return MPTCheck(False, f"source {kind} between {s1} and {s2}")
    for s in sigma.null_sources:
        if density.restrict(s.lo, s.hi).values != (0,):
            return MPTCheck(False, f"null source {s} carries positive density")
    targets = []
    for p in sigma.pieces:
        if isinstance(p, AffinePiece):
            local = density.restrict(p.source.lo, p.source.hi)
            if len(local.values) != 1:
                return MPTCheck(False, f"density not constant on source {p.source}")
            if is_inf(p.source.lo):
                return MPTCheck(False, f"affine source {p.source} has no finite left end")
            if p.slope != local.values[0] or p.slope <= 0:
                return MPTCheck(False, f"slope {fmt(p.slope)} != density {fmt(local.values[0])} on {p.source}")
        else:
            if p.block <= 0 or len(p.sources) != len(p.densities):
                return MPTCheck(False, "malformed interleave piece")
            for s, d in zip(p.sources, p.densities):
                local = density.restrict(s.lo, s.hi)
                if local.values != (d,) or d <= 0:
                    return MPTCheck(False, f"interleave density mismatch on {s}")
                if s.bounded or (is_inf(s.lo) and is_inf(s.hi)):
                    return MPTCheck(False, f"interleave source {s} must have exactly one finite end")
        targets.append(p.target)
    targets.sort(key=lambda t: t.lo)
    total = space.total_measure
    if not targets:
        return MPTCheck(False, "no targets")
    if targets[0].lo != 0 or targets[-1].hi != total:
        return MPTCheck(False, f"targets do not tile (0, {fmt(total)})")
    for t1, t2 in zip(targets, targets[1:]):
        if t1.hi != t2.lo:
            kind = "overlap" if t1.hi > t2.lo else "gap"
            return MPTCheck(False, f"target {kind} between {t1} and {t2}")
    return MPTCheck(True)


def check_representation(f: StepFunction, sigma: MPTransform, target_fn: StepFunction) -> bool:
    """Piece-exact check of ``f = target_fn o sigma`` on every non-null source."""
    for p in sigma.pieces:
        srcs = p.sources if isinstance(p, InterleavePiece) else (p.source,)
        t = p.target
        on_target = target_fn.restrict(t.lo, t.hi).values
        if len(on_target) != 1:
            return False
        for s in srcs:
            if f.restrict(s.lo, s.hi).values != on_target:
                return False
    return True


def compose_with_rearrangement(g_star: StepFunction, sigma: MPTransform) -> StepFunction:
    """The step function ``x -> g_star(sigma(x))``; zero on null sources."""
    pieces = []

    def pull_back(x0, t0, slope, t_lo, t_hi):
        if t_lo < g_star.domain.lo or t_hi > g_star.domain.hi:
            raise ValueError(f"target ({fmt(t_lo)}, {fmt(t_hi)}) escapes the domain of g*")
        for a, b, v in g_star.restrict(t_lo, t_hi).pieces():
            xa = x0 + (a - t0) / slope
            xb = x0 + (b - t0) / slope if not is_inf(b) else (INF if slope > 0 else -INF)
            pieces.append((min(xa, xb), max(xa, xb), v))

    for p in sigma.pieces:
        if isinstance(p, AffinePiece):
            t = p.target
            pull_back(p.source.lo, p.offset, p.slope, t.lo, t.hi)
            continue
        if not is_inf(g_star.domain.hi):
            raise ValueError("an unbounded target needs g* defined on a half-line")
        last = g_star.breaks[-1] if g_star.breaks else p.offset
        span = len(p.sources) * p.block
        rounds = max(0, math.ceil((last - p.offset) / span)) if last > p.offset else 0
        tail_value = g_star.values[-1]
        for lo, hi, t0, x0, slope in p.blocks(rounds):
            if t0 is None:
                pieces.append((lo, hi, tail_value))
            else:
                pull_back(x0, t0, slope, t0, t0 + p.block)
    return StepFunction.from_pieces(sigma.domain, pieces)
