from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from rihull.cases import random_instance, random_step, rng_for
from rihull.core import DomainMismatch, Interval, StepFunction, WeightedSpace, integrate, refine
from rihull.numeric import INF, RationalParseError, add, fmt, mul, parse_ext
from rihull.rearrangement import layer_cake_check

from conftest import leb, sf, space


def test_integrate_unit_square():
    assert integrate(sf(0, 1, (0, 1, 1)), leb(0, 1)) == 1


def test_integrate_sum_of_rectangles():
    assert integrate(sf(0, 2, (0, 1, 2), (1, 2, 3)), leb(0, 2)) == 5


def test_integrate_zero_times_infinity():
    f = sf(0, "inf", (0, 1, 1), (1, "inf", 0))
    assert integrate(f, leb(0)) == 1


def test_integrate_domain_mismatch():
    with pytest.raises(DomainMismatch):
        integrate(sf(0, 1, (0, 1, 1)), leb(0, 2))


def test_refine_disjoint_breaks():
    f = StepFunction(Interval(0, 3), (1,), (1, 2))
    g = StepFunction(Interval(0, 3), (2,), (5, 6))
    assert refine(f, g) == ((1, 2), (1, 2, 2), (5, 5, 6))


def test_refine_identical_partitions():
    f = StepFunction(Interval(0, 3), (1, 2), (1, 2, 3))
    assert refine(f, f) == ((1, 2), f.values, f.values)


def test_refine_constant_against_k_breaks():
    f = StepFunction.constant(Interval(0, 4), 7)
    g = StepFunction(Interval(0, 4), (1, 2, 3), (1, 2, 3, 4))
    breaks, fv, gv = refine(f, g)
    assert breaks == (1, 2, 3) and fv == (7,) * 4 and gv == g.values


def test_refine_domain_mismatch():
    with pytest.raises(DomainMismatch):
        refine(StepFunction.constant(Interval(0, 1), 1), StepFunction.constant(Interval(0, 2), 1))


def test_layer_cake_examples(two_piece):
    assert layer_cake_check(two_piece, leb(0, 1))
    assert integrate(two_piece, leb(0, 1)) == 2
    assert layer_cake_check(StepFunction.constant(Interval(0, 1), 0), leb(0, 1))
    f, sp = sf(0, 1, (0, 1, 2)), space(0, 1, (0, 1, 3))
    assert layer_cake_check(f, sp) and integrate(f, sp) == 6


def test_canonical_merging():
    f = StepFunction(Interval(0, 3), (1, 2), (4, 4, 5))
    assert f.breaks == (2,) and f.values == (4, 5)


@pytest.mark.parametrize("text,value", [("3", F(3)), ("-2/4", F(-1, 2)), ("inf", INF), ("0", F(0))])
def test_parse_rationals(text, value):
    assert parse_ext(text) == value


@pytest.mark.parametrize("text", ["1/0", "1.5", "", "1/-2", "abc", "1/01x"])
def test_parse_rejects(text):
    with pytest.raises(RationalParseError):
        parse_ext(text)


def test_extended_arithmetic():
    assert mul(0, INF) == 0 and mul(INF, 0) == 0
    assert add(F(1), INF) == INF
    assert mul(F(2), INF) == INF


def test_invalid_step_functions():
    with pytest.raises(ValueError):
        StepFunction(Interval(0, 1), (F(1, 2),), (1,))
    with pytest.raises(ValueError):
        StepFunction(Interval(0, 1), (2,), (1, 2))
    with pytest.raises(ValueError):
        StepFunction(Interval(0, 1), (), (-1,))
    with pytest.raises(ValueError):
        Interval(1, 1)


seeds = st.integers(min_value=0, max_value=2**32)


@given(seeds)
def test_round_trip(seed):
    rng = rng_for(seed, "rt")
    _, f = random_instance(rng)
    assert StepFunction.from_dict(f.to_dict()) == f
    assert all(parse_ext(fmt(v)) == v for v in f.values)


@given(seeds)
def test_refine_preserves_integral(seed):
    rng = rng_for(seed, "refine")
    sp, f = random_instance(rng, zero_tails=True)
    g = random_step(rng, sp.domain)
    breaks, fv, _ = refine(f, g)
    assert StepFunction(f.domain, breaks, fv) == f
    assert integrate(StepFunction(f.domain, breaks, fv), sp) == integrate(f, sp)


@given(seeds)
def test_integral_monotone_and_additive(seed):
    rng = rng_for(seed, "mono")
    sp, f = random_instance(rng)
    g = f + random_step(rng, sp.domain)
    assert integrate(f, sp) <= integrate(g, sp)
    h = random_step(rng, sp.domain)
    assert integrate(f + h, sp) == add(integrate(f, sp), integrate(h, sp))
