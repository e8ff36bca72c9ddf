"""Seeded randomized campaigns used by the ``verify`` and ``oracle-diff`` commands.

Cases are generated from ``(seed, index)`` alone and reported in index order,
so a report depends only on its inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import oracle
from .cases import random_instance, random_nonincreasing, random_space, random_step, rng_for
from .core import StepFunction, WeightedSpace, integrate
from .embedding import TwoMeasures, embedding_constant, l1_plus_linf_norm
from .hull import HullInstance, hull_lower_bound, hull_witness, hull_witness_degenerate, lambda_integral, weighted_lp_integral
from .inequalities import hardy_littlewood, reverse_hardy_littlewood
from .mpt import build_increasing_mpt, check_representation, ryff_conditions, verify_mpt
from .numeric import MP, fmt, is_inf, rel_diff
from .rearrangement import (
    decreasing_formula,
    decreasing_rearrangement,
    distribution,
    equimeasurable,
    finite_space_duality_check,
    increasing_rearrangement,
    inf_formula,
    lower_distribution,
    sup_formula,
)


@dataclass
class Tally:
    passed: int = 0
    failed: int = 0
    first_failure: str | None = None

    def record(self, ok: bool, what: str):
        if ok:
            self.passed += 1
        else:
            self.failed += 1
            if self.first_failure is None:
                self.first_failure = what

    def to_dict(self) -> dict:
        return {"passed": self.passed, "failed": self.failed, "first_failure": self.first_failure}


@dataclass
class CampaignReport:
    seed: int
    cases: int
    tallies: dict = field(default_factory=dict)

    def tally(self, name: str) -> Tally:
        return self.tallies.setdefault(name, Tally())

    @property
    def ok(self) -> bool:
        return all(t.failed == 0 for t in self.tallies.values())

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "cases": self.cases,
            "checks": {k: v.to_dict() for k, v in sorted(self.tallies.items())},
            "ok": self.ok,
        }


def _dump(*fns) -> str:
    return " | ".join(str(f) for f in fns)


def run_verify(seed: int, cases: int, epsilon=Fraction(1, 10), p=Fraction(2)) -> CampaignReport:
    rep = CampaignReport(seed, cases)
    for i in range(cases):
        rng = rng_for(seed, "verify", i)
        space, f = random_instance(rng)
        g = random_step(rng, space.domain)
        f_star = decreasing_rearrangement(f, space)
        rep.tally("rearrangement.equimeasurable").record(
            equimeasurable(f, space, f_star, _lebesgue(f_star)), _dump(space.density, f)
        )
        kappa = lower_distribution(f, space)
        low = increasing_rearrangement(f, space)
        rep.tally("rearrangement.formulas").record(
            sup_formula(kappa) == low == inf_formula(kappa)
            and decreasing_formula(distribution(f, space)).restrict(0, f_star.domain.hi) == f_star,
            _dump(space.density, f),
        )
        if not is_inf(space.total_measure):
            rep.tally("rearrangement.duality").record(finite_space_duality_check(f, space), _dump(space.density, f))
        rep.tally("inequalities.hardy_littlewood").record(hardy_littlewood(f, g, space).holds, _dump(space.density, f, g))
        rep.tally("inequalities.reverse").record(reverse_hardy_littlewood(f, g, space).holds, _dump(space.density, f, g))
        verdict = ryff_conditions(f, space)
        if verdict.kind == "Neither":
            rep.tally("mpt.neither_certificate").record(
                all(v < verdict.witness for v in low.values), _dump(space.density, f)
            )
        else:
            sigma = build_increasing_mpt(f, space)
            rep.tally("mpt.verify").record(
                bool(verify_mpt(sigma, space)) and check_representation(f, sigma, low), _dump(space.density, f)
            )
        inst = HullInstance(space, g, p)
        rep.tally("hull.lower_bound").record(hull_lower_bound(f, inst).holds, _dump(space.density, f, g))
        g_star = random_nonincreasing(rng, None if is_inf(space.total_measure) else space.total_measure)
        if inst.vstar_is_zero:
            if not any(is_inf(b) and v > 0 for _, b, v in g_star.pieces()):
                w = hull_witness_degenerate(g_star, inst, epsilon)
                rep.tally("hull.degenerate").record(
                    w.equimeasurable_with_g and w.lp_pow == 0, _dump(space.density, g, g_star)
                )
        else:
            w = hull_witness(g_star, inst, epsilon)
            rep.tally("hull.witness").record(
                w.equimeasurable_with_g and w.sandwich_holds, _dump(space.density, g, g_star)
            )
    return rep


def _lebesgue(fn: StepFunction) -> WeightedSpace:
    return WeightedSpace.lebesgue(fn.domain)


def run_oracle_diff(seed: int, cases: int, grid: int, p=Fraction(2)) -> dict:
    """Worst relative disagreement between exact values and the grid oracle, per family."""
    worst = {"rearrangement": 0.0, "l1_plus_linf": 0.0, "lp": 0.0, "lambda": 0.0, "A": 0.0}
    evaluated = 0
    for i in range(cases):
        rng = rng_for(seed, "oracle", i)
        space = random_space(rng, null_prob=0)
        f = random_step(rng, space.domain, zero_tails=True, max_num=50, max_den=8)
        v = random_step(rng, space.domain, max_num=50, max_den=8)
        if integrate(f, space) == 0:
            continue
        evaluated += 1
        f_star = decreasing_rearrangement(f, space)
        worst["rearrangement"] = max(worst["rearrangement"], oracle.rearrangement_l1_gap(f_star, f, space, grid))
        worst["l1_plus_linf"] = max(
            worst["l1_plus_linf"], rel_diff(l1_plus_linf_norm(f, space), _exactish(oracle.l1_plus_linf(f, space, grid)))
        )
        worst["lp"] = max(
            worst["lp"],
            rel_diff(weighted_lp_integral(f, space, v, p), _exactish(oracle.weighted_lp_integral(f, space, v, p, grid))),
        )
        lam = lambda_integral(f, space, increasing_rearrangement(v, space), p)
        worst["lambda"] = max(worst["lambda"], rel_diff(lam, _exactish(oracle.lambda_integral(f, space, v, p, grid))))
        nu = random_step(rng, space.domain, positive=True, max_num=50, max_den=8)
        m = TwoMeasures(space.density, nu)
        res = embedding_constant(m, p)
        _, approx = oracle.bathtub_search(m, p, grid, exact=False)
        worst["A"] = max(worst["A"], rel_diff(res.A_pow, _exactish(approx)))
    return {
        "seed": seed,
        "cases": cases,
        "evaluated": evaluated,
        "grid": grid,
        "p": fmt(p),
        "worst_relative": {k: f"{v:.3e}" for k, v in worst.items()},
        "ok": all(v <= 1e-3 for v in worst.values()),
    }


def _exactish(x: float):
    return MP.mpf(x)
