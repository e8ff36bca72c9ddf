from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from rihull.cases import random_instance, random_step, rng_for
from rihull.core import Interval, StepFunction, integrate
from rihull.inequalities import hardy_littlewood, reverse_hardy_littlewood, reverse_hl_simple_chain
from rihull.numeric import is_inf, le
from rihull.rearrangement import increasing_rearrangement

from conftest import leb, sf, space


def test_forward_equality_for_equal_functions(two_piece):
    rep = hardy_littlewood(two_piece, two_piece, leb(0, 1))
    assert (rep.lhs, rep.rhs, rep.holds) == (5, 5, True)


def test_forward_disjoint_supports():
    f, g = sf(0, 2, (0, 1, 1)), sf(0, 2, (1, 2, 4))
    rep = hardy_littlewood(f, g, leb(0, 2))
    assert rep.lhs == 0 and rep.rhs == 4 and rep.holds


def test_forward_equality_when_already_rearranged():
    f = sf(0, 3, (0, 1, 3), (1, 3, 1))
    g = sf(0, 3, (0, 2, 2), (2, 3, F(1, 2)))
    rep = hardy_littlewood(f, g, leb(0, 3))
    assert rep.lhs == rep.rhs and rep.holds


def test_reverse_equal_functions(two_piece):
    rep = reverse_hardy_littlewood(two_piece, two_piece, leb(0, 1))
    assert (rep.lhs, rep.rhs, rep.holds) == (5, 3, True)
    assert rep.slack == 2


def test_reverse_f_one_on_finite_space():
    sp = space(0, 4, (0, 1, 2), (1, 4, 1))
    g = sf(0, 4, (0, 2, 5), (2, 3, 1), (3, 4, 7))
    rep = reverse_hardy_littlewood(StepFunction.constant(sp.domain, 1), g, sp)
    assert rep.lhs == rep.rhs == integrate(g, sp)


def test_reverse_vanishing_lower_rearrangement():
    g = sf(0, "inf", (0, 2, 1))
    f = sf(0, "inf", (0, 5, 3), (5, 9, 1))
    rep = reverse_hardy_littlewood(f, g, leb(0))
    assert rep.rhs == 0 and rep.holds and rep.lhs == 6


class TestSimpleChain:
    g = sf(0, 2, (0, F(1, 2), 1), (F(1, 2), 1, 3), (1, 2, 2))

    def test_single_layer_is_f_one(self):
        rep = reverse_hl_simple_chain([(1, Interval(0, 1))], sf(0, 1, (0, 1, 2)), leb(0, 1))
        assert rep.lhs == rep.layered == rep.restricted == rep.lowered == rep.rhs == 2

    def test_two_nested_layers(self):
        rep = reverse_hl_simple_chain([(2, Interval(0, 1)), (1, Interval(0, 2))], self.g, leb(0, 2))
        # f = 3 on (0,1), 1 on (1,2); g_* = 1, 2, 3 on halves/unit
        assert (rep.lhs, rep.layered, rep.restricted, rep.lowered, rep.rhs) == (8, 8, 8, 7, 7)
        assert rep.holds

    def test_zero_coefficients(self):
        rep = reverse_hl_simple_chain([(0, Interval(0, 1)), (0, Interval(0, 2))], self.g, leb(0, 2))
        assert rep.lhs == rep.rhs == rep.lowered == 0 and rep.holds

    def test_rejects_non_nested(self):
        with pytest.raises(ValueError):
            reverse_hl_simple_chain([(1, Interval(0, 1)), (1, Interval(1, 2))], self.g, leb(0, 2))


seeds = st.integers(min_value=0, max_value=2**32)


@given(seeds)
def test_both_directions(seed):
    rng = rng_for(seed, "hl")
    sp, f = random_instance(rng)
    g = random_step(rng, sp.domain)
    fwd, rev = hardy_littlewood(f, g, sp), reverse_hardy_littlewood(f, g, sp)
    assert fwd.holds and rev.holds
    assert fwd.lhs == rev.lhs
    assert le(rev.rhs, fwd.lhs) and le(fwd.lhs, fwd.rhs)


@given(seeds)
def test_random_nested_chain(seed):
    rng = rng_for(seed, "chain")
    sp, g = random_instance(rng, kind="finite")
    lo, hi = sp.domain.lo, sp.domain.hi
    cuts = sorted({lo + (hi - lo) * F(rng.randint(1, 16), 16) for _ in range(3)})
    layers = [(F(rng.randint(0, 9), rng.randint(1, 4)), Interval(lo, c)) for c in cuts]
    assert reverse_hl_simple_chain(layers, g, sp).holds
