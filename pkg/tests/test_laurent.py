from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ctkit.laurent import (
    Diff,
    EvalDomain,
    GeomInv,
    Monomial,
    OnePlus,
    PolyFactor,
    Series,
    expand_factor,
    factor_vars,
    normalize_negative_power,
    series_mul,
)

DOM = EvalDomain(3)


def test_factor_vars():
    assert factor_vars(Monomial("x", -2)) == ("x",)
    assert factor_vars(Diff("a", "b", 4)) == ("a", "b")
    assert factor_vars(GeomInv("u", "w", 2)) == ("u", "w")


def test_normalize_negative_power_first_dominant():
    sign, mono, geom = normalize_negative_power("u", "v", -3, "u")
    assert sign == 1
    assert mono == Monomial("u", -3)
    assert geom == GeomInv("v", "u", 3)


def test_normalize_negative_power_second_dominant():
    sign, mono, geom = normalize_negative_power("u", "v", -3, "v")
    assert sign == -1  # (-1)^(-3)
    assert mono == Monomial("v", -3)
    assert geom == GeomInv("u", "v", 3)
    sign, _, _ = normalize_negative_power("u", "v", -4, "v")
    assert sign == 1


def test_normalize_negative_power_rejects():
    with pytest.raises(ValueError):
        normalize_negative_power("u", "v", 2, "u")
    with pytest.raises(ValueError):
        normalize_negative_power("u", "v", -2, "w")


def test_expand_oneplus_binomial_row():
    # (1+x)^(a*t+b) at t=3, a=0,b=4 -> plain (1+x)^4
    s = expand_factor(OnePlus("x", 0, 4), {"x": (0, 6)}, DOM)
    assert [s.terms.get((k,), 0) for k in range(6)] == [1, 4, 6, 4, 1, 0]


def test_expand_diff_signs():
    s = expand_factor(Diff("a", "b", 2), {"a": (0, 2), "b": (0, 2)}, DOM)
    assert s.terms[(2, 0)] == 1
    assert s.terms[(1, 1)] == -2
    assert s.terms[(0, 2)] == 1


def test_expand_geom_inv_coeffs():
    # (1 - u/w)^(-2) = sum_j (j+1) (u/w)^j
    s = expand_factor(GeomInv("u", "w", 2), {"u": (0, 4), "w": (-4, 0)}, DOM)
    for j in range(5):
        assert s.terms[(j, -j)] == j + 1


_window = st.tuples(st.integers(-3, 0), st.integers(0, 6))


@given(
    st.one_of(
        st.builds(Monomial, st.just("x"), st.integers(-3, 4)),
        st.builds(OnePlus, st.just("x"), st.integers(-3, 3), st.integers(-4, 6)),
        st.builds(PolyFactor, st.just("x"),
                  st.tuples(st.lists(st.integers(-3, 3), max_size=3),
                            st.integers(1, 3)).map(lambda lc: (*lc[0], lc[1]))),
    ),
    _window,
    st.integers(1, 5),
)
def test_window_soundness_univariate(f, win, pad):
    # enlarging the window never changes coefficients inside the original
    a = expand_factor(f, {"x": win}, DOM)
    b = expand_factor(f, {"x": (win[0] - pad, win[1] + pad)}, DOM)
    for e in range(win[0], win[1] + 1):
        assert a.terms.get((e,), 0) == b.terms.get((e,), 0)


@given(st.integers(1, 4), st.integers(1, 5), _window, _window)
def test_window_soundness_bivariate(n, pad, wu, ww):
    f = GeomInv("u", "w", n)
    a = expand_factor(f, {"u": wu, "w": ww}, DOM)
    b = expand_factor(f, {"u": (wu[0] - pad, wu[1] + pad),
                          "w": (ww[0] - pad, ww[1] + pad)}, DOM)
    for (eu, ew), c in a.terms.items():
        assert b.terms.get((eu, ew), 0) == c
    for (eu, ew), c in b.terms.items():
        if wu[0] <= eu <= wu[1] and ww[0] <= ew <= ww[1]:
            assert a.terms.get((eu, ew), 0) == c


@given(st.integers(1, 4), st.integers(4, 9))
@settings(max_examples=30)
def test_geom_inv_times_binomial_power_is_one(n, width):
    # (1 - u/w)^(-n) * (w - u)^n * w^(-n) == 1 up to the window edge
    win = ((0, width), (-width, 0))
    geom = expand_factor(GeomInv("u", "w", n), {"u": (0, width), "w": (-width, 0)}, DOM)
    diff = expand_factor(Diff("w", "u", n), {"w": (0, n), "u": (0, n)}, DOM)
    shift = Series(("u", "w"), ((0, 0), (-n, -n)), {(0, -n): DOM.one})
    diff = diff.aligned(("u", "w"), ((0, n), (0, n)))
    prod = series_mul(series_mul(diff, shift, win, None, DOM), geom, win, None, DOM)
    # orders <= width - n are exact under truncation
    assert prod.terms.get((0, 0)) == 1
    for (eu, ew), c in prod.terms.items():
        if (eu, ew) != (0, 0) and eu <= width - n:
            assert c == 0, (eu, ew, c)


def test_series_mul_rejects_mismatched_vars():
    a = Series(("x",), ((0, 1),), {(0,): 1})
    b = Series(("y",), ((0, 1),), {(0,): 1})
    with pytest.raises(ValueError):
        series_mul(a, b, None, None, DOM)


def test_coeff_series_outside_window_raises():
    s = Series(("x",), ((0, 2),), {(1,): 5})
    with pytest.raises(ValueError):
        s.coeff_series("x", 3)
    assert s.coeff_series("x", 1).terms[()] == 5


def test_aligned_rejects_window_excluding_zero():
    s = Series(("x",), ((0, 1),), {(0,): 1})
    with pytest.raises(ValueError):
        s.aligned(("x", "y"), ((0, 1), (1, 2)))
