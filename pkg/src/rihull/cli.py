"""Command-line front end: ``rihull <command> --scenario FILE [options]``.

Scenario files are JSON.  Every rational is a string matching
``[-]?[0-9]+(/[1-9][0-9]*)?`` or ``inf``.  Reports go to stdout as JSON with
sorted keys; exit status is 0 when every assertion passes, 1 on the first
failing assertion, 2 on malformed input.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction
from pathlib import Path

from .bp import PowerTail, bp_check, classical_lorentz_identity_check, power_weight_rearrangement
from .campaign import run_oracle_diff, run_verify
from .core import Interval, StepFunction, WeightedSpace, integrate
from .embedding import (
    TwoMeasures,
    corollary_check,
    embedding_constant,
    l1_plus_linf_norm,
    lowstar_as_weight,
    verify_embedding_norm,
)
from .hull import (
    HullInstance,
    hull_lower_bound,
    hull_witness,
    hull_witness_degenerate,
    lambda_integral,
    weighted_lp_integral,
)
from .mpt import RyffNeitherCondition, build_increasing_mpt, check_representation, ryff_conditions, verify_mpt
from .numeric import INF, MP, RationalParseError, fmt, is_inf, le, lift, parse_ext
from .rearrangement import (
    decreasing_rearrangement,
    distribution,
    equimeasurable,
    inf_formula,
    increasing_rearrangement,
    lower_distribution,
    rearrangements,
    sup_formula,
)


class ScenarioError(ValueError):
    pass


class AssertionFailed(Exception):
    def __init__(self, what: str, report: dict):
        super().__init__(what)
        self.report = report


# scenario parsing


def _rational(value, where: str):
    if not isinstance(value, str):
        if isinstance(value, int) and not isinstance(value, bool):
            return Fraction(value)
        raise ScenarioError(f"{where}: expected a rational string, got {value!r}")
    try:
        return parse_ext(value)
    except RationalParseError as exc:
        raise ScenarioError(f"{where}: {exc}") from None


def _interval(obj, where: str) -> Interval:
    if not isinstance(obj, list) or len(obj) != 2:
        raise ScenarioError(f"{where}: expected [lo, hi]")
    try:
        return Interval(_rational(obj[0], f"{where}[0]"), _rational(obj[1], f"{where}[1]"))
    except ScenarioError:
        raise
    except ValueError as exc:
        raise ScenarioError(f"{where}: {exc}") from None


def _step(obj, where: str, default_domain: Interval | None = None) -> StepFunction:
    if not isinstance(obj, dict):
        raise ScenarioError(f"{where}: expected an object with domain/breaks/values")
    if "domain" in obj:
        domain = _interval(obj["domain"], f"{where}.domain")
    elif default_domain is not None:
        domain = default_domain
    else:
        raise ScenarioError(f"{where}.domain: missing")
    breaks = [_rational(b, f"{where}.breaks[{i}]") for i, b in enumerate(obj.get("breaks", []))]
    if "values" not in obj:
        raise ScenarioError(f"{where}.values: missing")
    values = [_rational(v, f"{where}.values[{i}]") for i, v in enumerate(obj["values"])]
    try:
        return StepFunction(domain, tuple(breaks), tuple(values))
    except ValueError as exc:
        raise ScenarioError(f"{where}: {exc}") from None


def _weight(obj, where: str, default_domain: Interval):
    if isinstance(obj, dict) and "power_tail" in obj:
        try:
            return PowerTail.from_dict(obj["power_tail"])
        except (KeyError, ValueError) as exc:
            raise ScenarioError(f"{where}.power_tail: {exc}") from None
    if isinstance(obj, dict) and "abs_power" in obj:
        dom = _interval(obj["domain"], f"{where}.domain") if "domain" in obj else default_domain
        return PowerTail.abs_power(_rational(obj["abs_power"], f"{where}.abs_power"), dom)
    return _step(obj, where, default_domain)


class Scenario:
    def __init__(self, data: dict, overrides: dict):
        if not isinstance(data, dict):
            raise ScenarioError("scenario: top level must be an object")
        sp = data.get("space", {"domain": ["0", "inf"]})
        if not isinstance(sp, dict):
            raise ScenarioError("space: expected an object")
        domain = _interval(sp.get("domain"), "space.domain")
        if "values" in sp:
            density = _step(sp, "space", domain)
        else:
            density = StepFunction.constant(domain, 1)
        try:
            self.space = WeightedSpace(density)
        except ValueError as exc:
            raise ScenarioError(f"space: {exc}") from None
        funcs = data.get("functions", {})
        if not isinstance(funcs, dict):
            raise ScenarioError("functions: expected an object of named step functions")
        self.functions = {k: _step(v, f"functions.{k}", domain) for k, v in sorted(funcs.items())}
        self.weight = _weight(data["weight"], "weight", domain) if "weight" in data else None
        self.nu = _step(data["nu"], "nu", domain) if "nu" in data else None
        self.g_star = _step(data["g_star"], "g_star") if "g_star" in data else None
        self.alpha = _rational(data["alpha"], "alpha") if "alpha" in data else None
        self.p = _rational(overrides.get("p") or data.get("p", "2"), "p")
        self.epsilon = _rational(overrides.get("epsilon") or data.get("epsilon", "1/10"), "epsilon")
        self.seed = int(overrides.get("seed") if overrides.get("seed") is not None else data.get("seed", 0))
        self.cases = int(overrides.get("cases") if overrides.get("cases") is not None else data.get("cases", 100))
        self.grid = int(overrides.get("grid") if overrides.get("grid") is not None else data.get("grid", 100000))


def load_scenario(path: str | None, overrides: dict) -> Scenario:
    if path is None:
        return Scenario({}, overrides)
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ScenarioError(f"{path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    return Scenario(data, overrides)


# commands


def _check(report: dict, ok: bool, what: str):
    report.setdefault("assertions", []).append({"check": what, "ok": bool(ok)})
    if not ok:
        raise AssertionFailed(what, report)


def _need(sc: Scenario, attr: str, cmd: str):
    if getattr(sc, attr) is None:
        raise ScenarioError(f"{cmd}: scenario needs '{attr}'")


def cmd_rearrange(sc: Scenario) -> dict:
    out: dict = {"functions": {}}
    for name, f in sc.functions.items():
        r = rearrangements(f, sc.space)
        out["functions"][name] = {
            "mu_f": r.mu_f.to_dict(),
            "kappa_f": r.kappa_f.to_dict(),
            "f_star": r.f_star.to_dict(),
            "f_lowstar": r.f_lowstar.to_dict(),
        }
        _check(out, equimeasurable(f, sc.space, r.f_star, WeightedSpace.lebesgue(r.f_star.domain)),
               f"{name}: f and f* equimeasurable")
        _check(out, sup_formula(r.kappa_f) == r.f_lowstar == inf_formula(r.kappa_f),
               f"{name}: sup/inf formulas agree with f_*")
    return out


def cmd_norms(sc: Scenario) -> dict:
    out: dict = {"functions": {}}
    for name, f in sc.functions.items():
        entry = {"integral": fmt(integrate(f, sc.space)), "l1_plus_linf": fmt(l1_plus_linf_norm(f, sc.space))}
        if sc.weight is not None:
            entry["lp_pow"] = fmt(weighted_lp_integral(f, sc.space, sc.weight, sc.p))
            if isinstance(sc.weight, StepFunction):
                inst = HullInstance(sc.space, sc.weight, sc.p)
                entry["lambda_pow"] = fmt(lambda_integral(f, sc.space, inst.v_lowstar, sc.p))
                rep = hull_lower_bound(f, inst)
                entry["lower_bound_holds"] = rep.holds
                out["functions"][name] = entry
                _check(out, rep.holds, f"{name}: Lambda^p(v_*) <= L^p(v)")
        out["functions"][name] = entry
    return out


def cmd_ryff(sc: Scenario) -> dict:
    out: dict = {"functions": {}}
    for name, f in sc.functions.items():
        verdict = ryff_conditions(f, sc.space)
        entry = {"kind": verdict.kind, "T": fmt(verdict.T), "kappa_T": fmt(verdict.kappa_T)}
        out["functions"][name] = entry
        if verdict.kind == "Neither":
            entry["witness"] = fmt(verdict.witness)
            low = increasing_rearrangement(f, sc.space)
            _check(out, all(v < verdict.witness for v in low.values), f"{name}: f_* < s everywhere")
            continue
        try:
            sigma = build_increasing_mpt(f, sc.space)
        except RyffNeitherCondition as exc:  # pragma: no cover - guarded by the verdict
            raise AssertionFailed(str(exc), out) from None
        entry["sigma"] = sigma.to_dict()
        check = verify_mpt(sigma, sc.space)
        entry["verify"] = check.reason or "ok"
        _check(out, bool(check), f"{name}: sigma is measure preserving")
        _check(out, check_representation(f, sigma, increasing_rearrangement(f, sc.space)), f"{name}: f = f_* o sigma")
    return out


def cmd_embed(sc: Scenario) -> dict:
    _need(sc, "nu", "embed")
    m = TwoMeasures(sc.space.density, sc.nu)
    res = embedding_constant(m, sc.p)
    out = {"result": res.to_dict()}
    rep = verify_embedding_norm(m, sc.p, sc.functions.values())
    out["verification"] = rep.to_dict()
    _check(out, rep.ok, "norm inequality on every sample")
    if rep.extremal_ratio is not None:
        _check(out, le(1 - MP.mpf("1e-9"), rep.extremal_ratio), "extremal candidate attains A")
    return out


def cmd_hull(sc: Scenario) -> dict:
    _need(sc, "weight", "hull")
    inst = HullInstance(sc.space, sc.weight, sc.p)
    out: dict = {"p": fmt(sc.p)}
    if inst.v_lowstar is not None:
        out.update(S=fmt(inst.S), T=fmt(inst.T), kappa_S=fmt(inst.kappa_S), v_lowstar=inst.v_lowstar.to_dict())
        out["lower_bound"] = {}
        for name, f in sc.functions.items():
            rep = hull_lower_bound(f, inst)
            out["lower_bound"][name] = {"lambda_pow": fmt(rep.lhs), "lp_pow": fmt(rep.rhs), "holds": rep.holds}
            _check(out, rep.holds, f"{name}: lower bound")
    if sc.g_star is not None:
        degenerate = inst.v_lowstar is None or inst.vstar_is_zero
        w = (hull_witness_degenerate if degenerate else hull_witness)(sc.g_star, inst, sc.epsilon)
        out["witness"] = w.to_dict()
        _check(out, w.equimeasurable_with_g, "witness equimeasurable with g*")
        _check(out, w.sandwich_holds, "witness sandwich")
    return out


def cmd_bp(sc: Scenario) -> dict:
    out: dict = {"p": fmt(sc.p)}
    if sc.alpha is not None:
        w = power_weight_rearrangement(sc.alpha)
        out["v_lowstar"] = w.to_dict()
    elif isinstance(sc.weight, StepFunction):
        w = lowstar_as_weight(sc.weight, sc.space)
        out["v_lowstar"] = w.to_dict()
    elif sc.weight is not None:
        w = sc.weight
    else:
        raise ScenarioError("bp: scenario needs 'weight' or 'alpha'")
    rep = bp_check(w, sc.p)
    out["bp"] = rep.to_dict()
    if sc.alpha is not None and sc.g_star is not None and 0 <= sc.alpha < sc.p - 1:
        lor = classical_lorentz_identity_check(sc.g_star, sc.alpha, sc.p)
        out["lorentz"] = lor.to_dict()
        _check(out, lor.ok, "classical Lorentz identity")
    if sc.weight is not None and rep.in_class and sc.p > 1 and sc.alpha is None:
        cor = corollary_check(sc.space, sc.weight, sc.p)
        out["corollary"] = cor.to_dict()
        _check(out, cor.finite and cor.identity is not False, "corollary")
    return out


def cmd_verify(sc: Scenario) -> dict:
    rep = run_verify(sc.seed, sc.cases, sc.epsilon, sc.p)
    out = rep.to_dict()
    if not rep.ok:
        bad = next(k for k, t in sorted(rep.tallies.items()) if t.failed)
        raise AssertionFailed(f"{bad}: {rep.tallies[bad].first_failure}", out)
    return out


def cmd_oracle_diff(sc: Scenario) -> dict:
    out = run_oracle_diff(sc.seed, sc.cases, sc.grid, sc.p)
    if not out["ok"]:
        raise AssertionFailed("oracle disagreement above 1e-3", out)
    return out


COMMANDS = {
    "rearrange": cmd_rearrange,
    "norms": cmd_norms,
    "ryff": cmd_ryff,
    "embed": cmd_embed,
    "hull": cmd_hull,
    "bp": cmd_bp,
    "verify": cmd_verify,
    "oracle-diff": cmd_oracle_diff,
}


# output


def _step_tables(obj, prefix=""):
    if isinstance(obj, dict):
        if set(obj) == {"domain", "breaks", "values"}:
            yield prefix or "function", obj
            return
        for k in sorted(obj):
            yield from _step_tables(obj[k], f"{prefix}.{k}" if prefix else k)
    elif isinstance(obj, list):
        for i, item in enumerate(obj):
            yield from _step_tables(item, f"{prefix}[{i}]")


def write_csv(report: dict, directory: str):
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    for name, table in _step_tables(report):
        edges = [table["domain"][0], *table["breaks"], table["domain"][1]]
        safe = name.replace("/", "_").replace("[", "_").replace("]", "")
        with open(out / f"{safe}.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["lo", "hi", "value"])
            for i, v in enumerate(table["values"]):
                w.writerow([edges[i], edges[i + 1], v])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rihull", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--scenario", metavar="PATH")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--cases", type=int)
        sp.add_argument("--grid", type=int)
        sp.add_argument("--csv", metavar="DIR")
        sp.add_argument("--epsilon", metavar="RAT")
        sp.add_argument("--p", metavar="RAT")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {"p": args.p, "epsilon": args.epsilon, "seed": args.seed, "cases": args.cases, "grid": args.grid}
    try:
        sc = load_scenario(args.scenario, overrides)
        report = COMMANDS[args.command](sc)
        status = 0
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        # library preconditions (non-integrable weight, eps = 0 refused, ...)
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except AssertionFailed as exc:
        report = dict(exc.report)
        report["failed"] = str(exc)
        status = 1
    print(json.dumps(report, sort_keys=True, indent=2))
    if args.csv:
        write_csv(report, args.csv)
    if status:
        print(f"assertion failed: {report['failed']}", file=sys.stderr)
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
