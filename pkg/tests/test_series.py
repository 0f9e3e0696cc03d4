from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wkbcalc.errors import ParseError, ZeroLeadingCoefficient
from wkbcalc.series import (
    TauSeries,
    add,
    invert,
    kstar_check,
    kstar_exp,
    mul,
    substitute_neg_tau,
)

T = TauSeries


def test_add_examples():
    assert add(T({0: 1}), T({-1: 1})) == T({0: 1, -1: 1})
    s = add(T({1: 1, 0: 1}), T({1: -1}))
    assert s == T({0: 1}) and s.top_degree == 0


def test_add_takes_window_intersection():
    a = T({0: 1, -1: 2, -2: 3}, depth=3)
    b = T({0: 1, -1: 1, -2: 1, -3: 1, -4: 1}, depth=5)
    s = a + b
    assert s.floor == -2
    assert s.coeffs == {0: 2, -1: 3, -2: 4}


def test_mul_examples():
    assert mul(T({0: 1, -1: 1}), T({0: 1, -1: -1})) == T({0: 1, -2: -1})
    s = T({2: 3, -1: Fraction(1, 2)}, depth=4)
    assert mul(T.one(), s) == s
    assert mul(T({1: 1}), T({-1: 1})).is_one()


def test_mul_window_is_coarsest_sound():
    a = T({0: 1, -1: 1}, depth=2)  # known down to tau^-1
    b = T({1: 1})
    p = a * b
    assert p.floor == 0 and p.coeffs == {1: 1, 0: 1}


def test_invert_examples():
    inv = invert(T({0: 1, -1: -1}), depth=4)
    assert inv == T({0: 1, -1: 1, -2: 1, -3: 1}, depth=4)
    assert (inv * T({0: 1, -1: -1})).is_one()
    assert invert(T.one()).is_one()
    with pytest.raises(ZeroLeadingCoefficient):
        invert(T.zero())


def test_invert_default_depth_comes_from_input():
    a = T({2: 2, 1: 1, 0: 5}, depth=3)
    b = a.inverse()
    assert b.top_degree == -2 and b.depth == 3
    assert (a * b).is_one()


def test_substitute_neg_tau_examples():
    assert substitute_neg_tau(T({0: 1, -1: 1})) == T({0: 1, -1: -1})
    assert substitute_neg_tau(T({2: 1})) == T({2: 1})
    s = T({3: 1, 0: 2, -5: 7}, depth=9)
    assert substitute_neg_tau(substitute_neg_tau(s)) == s


def test_kstar_examples():
    assert kstar_check(T.one())
    assert not kstar_check(T({0: 1, -1: 1}))
    for a in (Fraction(1), Fraction(-3, 2), Fraction(7, 5)):
        s = T({0: 1, -1: a, -2: a * a / 2}, depth=3)
        assert kstar_check(s)


def test_kstar_rejects_wrong_leading_term():
    assert not kstar_check(T({0: 2}))
    assert not kstar_check(T({1: 1, 0: 1}))


def test_kstar_exp_needs_odd_negative_exponents():
    with pytest.raises(ValueError):
        kstar_exp({-2: 1}, 4)


def test_json_roundtrip_and_zero():
    s = T({1: Fraction(-2, 3), -1: 4}, depth=5)
    assert T.from_json(s.to_json()) == s
    z = T.zero(floor=-3)
    assert T.from_json(z.to_json()) == z
    with pytest.raises(ParseError):
        T.from_json({"top": 0, "depth": 1, "coeffs": {"x": "1"}})


# -- properties -------------------------------------------------------------------

fractions = st.fractions(min_value=-5, max_value=5, max_denominator=4)


@st.composite
def series(draw, depth=None):
    top = draw(st.integers(-2, 2))
    depth = depth or draw(st.integers(1, 5))
    coeffs = {top - k: draw(fractions) for k in range(depth)}
    coeffs[top] = draw(fractions.filter(bool))
    return T(coeffs, depth=depth)


@st.composite
def kstar_members(draw, depth=6):
    odd = {j: draw(fractions) for j in range(-1, -depth, -2)}
    return kstar_exp(odd, depth)


@settings(max_examples=60, deadline=None)
@given(series(), series(), series())
def test_ring_axioms(a, b, c):
    assert ((a * b) * c).agrees(a * (b * c))
    assert (a * b).agrees(b * a)
    assert (a * (b + c)).agrees(a * b + a * c)
    assert ((a + b) + c).agrees(a + (b + c))


@settings(max_examples=60, deadline=None)
@given(series())
def test_inverse_is_two_sided(a):
    b = a.inverse()
    assert (a * b).is_one() and (b * a).is_one()


@settings(max_examples=40, deadline=None)
@given(series(depth=6), series(depth=6), st.integers(1, 5))
def test_truncation_coherence(a, b, k):
    direct = a.truncate(k) * b.truncate(k)
    assert (a * b).truncate(k) == direct.truncate(k) or (a * b).truncate(k).agrees(direct)
    assert a.inverse().truncate(k) == a.truncate(k).inverse()


@settings(max_examples=40, deadline=None)
@given(kstar_members(), kstar_members())
def test_kstar_is_a_group(s, t):
    assert kstar_check(s) and kstar_check(t)
    assert kstar_check(s * t)
    assert kstar_check(s.inverse())
