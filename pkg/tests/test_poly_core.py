from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ctkit.poly_core import (
    RatPoly,
    binom_poly,
    binom_rat,
    interpolate,
    poly_divide,
    poly_gcd,
    primitive_normalize,
)

rats = st.fractions(min_value=-5, max_value=5, max_denominator=6)
polys = st.lists(rats, max_size=6).map(RatPoly)
nonzero_polys = polys.filter(lambda f: not f.is_zero())


def test_construction_strips_leading_zeros():
    assert RatPoly([1, 2, 0, 0]).coeffs == (1, 2)
    assert RatPoly([0]).is_zero()
    assert RatPoly([]).is_zero()
    assert RatPoly().degree == float("-inf")


def test_eval_and_str():
    f = RatPoly([Fraction(1, 2), 0, 3])  # 3t^2 + 1/2
    assert f(2) == 12 + Fraction(1, 2)
    assert f(0) == Fraction(1, 2)
    assert "t" in str(RatPoly([0, 1]))


@given(polys, polys, polys)
def test_ring_axioms(f, g, h):
    assert f + g == g + f
    assert f * g == g * f
    assert (f + g) * h == f * h + g * h
    assert f + RatPoly() == f
    assert f * RatPoly([1]) == f
    assert (f - f).is_zero()


@given(polys, polys, nonzero_polys)
def test_divide_exactness(f, h, g):
    # poly_divide(f*g + h, g) recovers f plus the division of h
    q0, r0 = poly_divide(h, g)
    q, r = poly_divide(f * g + h, g)
    assert q == f + q0
    assert r == r0
    assert r.is_zero() or r.degree < g.degree


@given(polys, nonzero_polys)
def test_divide_reconstructs(f, g):
    q, r = poly_divide(f, g)
    assert q * g + r == f


@given(st.lists(st.tuples(st.integers(-8, 8), rats), min_size=1, max_size=6,
                unique_by=lambda n: n[0]))
def test_interpolate_hits_every_node(nodes):
    f = interpolate(nodes)
    for x, y in nodes:
        assert f(x) == y
    assert f.degree < len(nodes)


def test_interpolate_duplicate_abscissae_named():
    with pytest.raises(ValueError) as e:
        interpolate([(1, 0), (2, 5), (1, 3)])
    assert "1" in str(e.value)


@given(st.integers(-4, 4), rats, st.integers(0, 6), st.integers(-6, 6))
def test_binom_poly_matches_pointwise(a, b, k, t0):
    assert binom_poly(a, b, k)(t0) == binom_rat(a * t0 + b, k)


def test_binom_rat_small():
    assert binom_rat(5, 2) == 10
    assert binom_rat(Fraction(1, 2), 2) == Fraction(-1, 8)
    assert binom_rat(-1, 3) == -1
    assert binom_rat(3, 0) == 1


@given(nonzero_polys, nonzero_polys)
@settings(max_examples=60)
def test_gcd_divides_both(f, g):
    d = poly_gcd(f, g)
    _, r1 = poly_divide(f, d)
    _, r2 = poly_divide(g, d)
    assert r1.is_zero() and r2.is_zero()
    # monic normalization
    assert d.coeffs[-1] == 1


def test_gcd_known_pairs():
    t = RatPoly([0, 1])
    f = (t - 1) * (t + 2)
    g = (t - 1) * (t + 3)
    assert poly_gcd(f, g) == t - 1
    assert poly_gcd(f, RatPoly()) == f  # gcd with 0, f already monic
    # coprime pair used downstream: residual tables
    a = RatPoly([-30, -2, 1])
    b = RatPoly([320, 0, 9])
    assert poly_gcd(a, b).degree == 0


@given(nonzero_polys)
def test_primitive_normalize_roundtrip(f):
    prim, scale = primitive_normalize(f)
    assert prim * RatPoly([scale]) == f
    # integer, content-free, positive leading coefficient
    assert all(c.denominator == 1 for c in map(Fraction, prim.coeffs))
    assert Fraction(prim.coeffs[-1]) > 0


def test_primitive_normalize_example():
    f = RatPoly([Fraction(-4, 6), Fraction(-2, 6)])  # -(2/6)(t + 2)
    prim, scale = primitive_normalize(f)
    assert prim.coeffs == (2, 1)
    assert scale == Fraction(-1, 3)
