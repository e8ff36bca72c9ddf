"""Brute-force floating-point oracle for differential testing.

Nothing here calls the exact engine: functions are read only through their raw
``domain``/``breaks``/``values`` fields, the domain is cut into a fine grid
aligned with every breakpoint, and rearrangements are obtained by sorting
cells.  Unbounded ends are truncated far enough out that the truncated tail
carries more mass than any window the oracle is asked about.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np


def _raw(fn):
    """(lo, hi, breaks, values) as floats; values may be inf."""
    return (
        float(fn.domain.lo),
        float(fn.domain.hi),
        np.array([float(b) for b in fn.breaks], dtype=float),
        np.array([float(v) for v in fn.values], dtype=float),
    )


def _sample(breaks: np.ndarray, values: np.ndarray, x: np.ndarray) -> np.ndarray:
    return values[np.searchsorted(breaks, x, side="right")]


@dataclass(frozen=True)
class GridModel:
    """Cells of a truncated domain with per-cell density and function values."""

    lo: np.ndarray
    hi: np.ndarray
    density: np.ndarray
    values: tuple  # one array per modelled function
    window: float  # oracle answers are trustworthy on (0, window) in rearranged time

    @property
    def length(self) -> np.ndarray:
        return self.hi - self.lo

    @property
    def mass(self) -> np.ndarray:
        return self.density * self.length

    @property
    def size(self) -> int:
        return len(self.lo)


def grid_model(funcs, density, N: int) -> GridModel:
    """Grid with about ``N`` cells, aligned with every breakpoint of ``funcs`` and ``density``."""
    dlo, dhi, dbreaks, dvals = _raw(density)
    raws = [_raw(f) for f in funcs]
    cuts = np.unique(np.concatenate([dbreaks, *(r[2] for r in raws)]))
    if np.isinf(dlo):
        anchor = cuts[0] if cuts.size else (0.0 if np.isinf(dhi) else dhi)
        finite_lo = anchor - 1.0
    else:
        finite_lo = dlo
    finite_hi = dhi if not np.isinf(dhi) else (cuts[-1] if cuts.size else finite_lo) + 1.0
    inner_edges = np.unique(np.concatenate([[finite_lo, finite_hi], cuts]))
    mids = (inner_edges[:-1] + inner_edges[1:]) / 2
    inner_mass = float(np.sum(_sample(dbreaks, dvals, mids) * np.diff(inner_edges)))
    # tails: long enough to carry more than the whole bounded part plus 2 units
    need = inner_mass + 2.0
    edges = list(inner_edges)
    if np.isinf(dlo):
        d = float(_sample(dbreaks, dvals, np.array([finite_lo - 1.0]))[0])
        edges.insert(0, finite_lo - (need / d if d > 0 else 1.0))
    if np.isinf(dhi):
        d = float(_sample(dbreaks, dvals, np.array([finite_hi + 1.0]))[0])
        edges.append(finite_hi + (need / d if d > 0 else 1.0))
    edges = np.array(edges)
    # spread N cells over the pieces in proportion to their length
    spans = np.diff(edges)
    counts = np.maximum(1, np.floor(N * spans / spans.sum()).astype(int))
    lo_parts, hi_parts = [], []
    for a, b, k in zip(edges[:-1], edges[1:], counts):
        e = np.linspace(a, b, k + 1)
        lo_parts.append(e[:-1])
        hi_parts.append(e[1:])
    lo, hi = np.concatenate(lo_parts), np.concatenate(hi_parts)
    mid = (lo + hi) / 2
    dens = _sample(dbreaks, dvals, mid)
    vals = tuple(_sample(r[2], r[3], mid) for r in raws)
    unbounded_mass = np.isinf(dlo) or np.isinf(dhi)
    window = inner_mass + 1.0 if unbounded_mass else float(np.sum(dens * (hi - lo)))
    return GridModel(lo, hi, dens, vals, window)


def _sorted_cells(model: GridModel, which: int, descending: bool):
    vals, mass = model.values[which], model.mass
    keep = mass > 0
    vals, mass = vals[keep], mass[keep]
    order = np.argsort(-vals if descending else vals, kind="stable")
    return np.cumsum(mass[order]), vals[order]


def grid_rearrange(f, space, N: int, descending: bool = True):
    """``(ends, values, window)`` with the rearrangement equal to ``values[i]`` on ``(ends[i-1], ends[i])``."""
    model = grid_model([f], space.density, N)
    ends, vals = _sorted_cells(model, 0, descending)
    return ends, vals, model.window


def evaluate_rearranged(ends, vals, t):
    idx = np.searchsorted(ends, t, side="left")
    idx = np.minimum(idx, len(vals) - 1)
    return vals[idx]


def rearrangement_l1_gap(exact_star, f, space, N: int) -> float:
    """Relative L1 distance between an exact ``f*`` and the oracle's, over a trusted window."""
    ends, vals, window = grid_rearrange(f, space, N)
    lo, hi, eb, ev = _raw(exact_star)
    top = min(hi, window)
    t = np.linspace(0.0, top, 200001)[1:-1]
    a = _sample(eb, ev, t)
    b = evaluate_rearranged(ends, vals, t)
    scale = np.sum(np.abs(a))
    return float(np.sum(np.abs(a - b)) / scale) if scale else float(np.sum(np.abs(b)))


def l1_plus_linf(f, space, N: int) -> float:
    ends, vals, _ = grid_rearrange(f, space, N)
    total = ends[-1] if len(ends) else 0.0
    budget = min(total, 1.0)
    prev = np.concatenate([[0.0], ends[:-1]])
    taken = np.clip(np.minimum(ends, budget) - prev, 0.0, None)
    return float(np.sum(np.where(taken > 0, vals * taken, 0.0)))


def weighted_lp_integral(f, space, v, p, N: int) -> float:
    model = grid_model([f, v], space.density, N)
    fv, vv = model.values
    mass = model.mass
    term = np.where((fv == 0) | (vv == 0) | (mass == 0), 0.0, fv ** float(p) * vv * mass)
    return float(np.sum(term))


def lambda_integral(f, space, v, p, N: int) -> float:
    """``integral f*^p v_*`` by sorting cells: f descending against v ascending."""
    model = grid_model([f, v], space.density, N)
    f_ends, f_vals = _sorted_cells(model, 0, descending=True)
    v_ends, v_vals = _sorted_cells(model, 1, descending=False)
    top = min(f_ends[-1], model.window) if len(f_ends) else 0.0
    cuts = np.unique(np.concatenate([[0.0], f_ends[f_ends < top], v_ends[v_ends < top], [top]]))
    mids = (cuts[:-1] + cuts[1:]) / 2
    fs = evaluate_rearranged(f_ends, f_vals, mids)
    vs = evaluate_rearranged(v_ends, v_vals, mids)
    term = np.where(fs == 0, 0.0, fs ** float(p) * vs * np.diff(cuts))
    return float(np.sum(term))


def bathtub_search(m, p, N: int, exact: bool | None = None):
    """Greedy fill by descending ``h = (dmu/dnu)**(p'-1)`` until mu-budget ``min(mu(R), 1)``.

    Returns ``(A, A**p')``.  With ``exact`` (default: when ``p' - 1`` is an
    integer) the fill runs in rationals over the breakpoint cells and the
    second entry is an exact Fraction.
    """
    p = Fraction(p)
    if p <= 1:
        raise ValueError("the bathtub oracle needs p > 1")
    q = 1 / (p - 1)
    if exact is None:
        exact = q.denominator == 1
    if exact:
        return _bathtub_exact(m, int(q), p / (p - 1))
    model = grid_model([m.w_nu], m.w_mu, N)
    w_nu = model.values[0]
    mass = model.mass
    keep = mass > 0
    h = (model.density[keep] / w_nu[keep]) ** float(q)
    mass = mass[keep]
    budget = min(float(np.sum(mass)), 1.0)
    order = np.argsort(-h, kind="stable")
    h, mass = h[order], mass[order]
    ends = np.cumsum(mass)
    prev = np.concatenate([[0.0], ends[:-1]])
    taken = np.clip(np.minimum(ends, budget) - prev, 0.0, None)
    value = float(np.sum(h * taken))
    return value ** float((p - 1) / p), value


def _bathtub_exact(m, q: int, p_prime: Fraction):
    mu_d, nu_d = m.w_mu, m.w_nu
    cuts = sorted(set(mu_d.breaks) | set(nu_d.breaks))
    lo, hi = mu_d.domain.lo, mu_d.domain.hi
    edges = [lo, *cuts, hi]
    cells = []
    finite_mass = Fraction(0)
    for a, b in zip(edges, edges[1:]):
        mid = _mid(a, b)
        d_mu, d_nu = _at(mu_d, mid), _at(nu_d, mid)
        if d_mu == 0:
            continue
        if a == float("-inf") or b == float("inf"):
            # one unit of measure more than the budget ever needs
            cells.append([(d_mu / d_nu) ** q, Fraction(2), True])
        else:
            mass = d_mu * (b - a)
            finite_mass += mass
            cells.append([(d_mu / d_nu) ** q, mass, False])
    total_unbounded = any(c[2] for c in cells)
    budget = Fraction(1) if total_unbounded else min(finite_mass, Fraction(1))
    cells.sort(key=lambda c: -c[0])
    left, value = budget, Fraction(0)
    for h, mass, _ in cells:
        take = min(mass, left)
        value += h * take
        left -= take
        if left == 0:
            break
    return float(value) ** float(1 / p_prime), value


def _mid(a, b):
    inf = float("inf")
    if a == -inf and b == inf:
        return Fraction(0)
    if a == -inf:
        return b - 1
    if b == inf:
        return a + 1
    return (a + b) / 2


def _at(fn, x):
    i = 0
    while i < len(fn.breaks) and fn.breaks[i] <= x:
        i += 1
    return fn.values[i]
