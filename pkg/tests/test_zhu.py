from fractions import Fraction

import pytest

from ctkit import zhu
from ctkit.poly_core import RatPoly


def test_weight_formula():
    # p=1 collapses to (i-j)^2/4
    assert zhu.h_weight(1, 1, 1) == 0
    assert zhu.h_weight(3, 1, 1) == 1
    assert zhu.h_weight(Fraction(7, 2), 1, 1) == Fraction(25, 16)
    assert zhu.h_weight(2, 1, 2) == Fraction(-1, 8)


def test_fp_small():
    f1 = zhu.f_p(1)
    assert f1 == RatPoly([0, Fraction(2, 3), Fraction(-8, 3)])
    assert f1(0) == 0 and f1(Fraction(1, 4)) == 0
    # 3p-1 roots, all of the stated form
    f2 = zhu.f_p(2)
    for i in range(1, 6):
        assert f2(zhu.h_weight(i, 1, 2)) == 0


def test_ell_and_g_root_sets():
    ell = zhu.ell_p(1)
    assert ell.degree == 3 and ell.coeffs[-1] == 1
    for root in (1, Fraction(9, 16), Fraction(1, 16)):
        assert ell(root) == 0
    for p in (1, 2):
        assert zhu.g_p(2, p) == zhu.ell_p(p)  # m=2 degenerates
    assert zhu.g_p(3, 1)(Fraction(9, 4)) == 0  # h(1,4) root


def test_vp_monic_with_prescribed_roots():
    v = zhu.v_p(2, 1)
    assert v.coeffs[-1] == 1
    assert v(zhu.h_weight(1, 3, 1)) == 0


def test_hp_interp_defining_conditions():
    for m, p in ((2, 1), (2, 2), (3, 1)):
        h = zhu.h_p_interp(m, p)
        f = zhu.f_p(p)
        assert h.degree < 3 * p
        for i in range(1, p + 1):
            x = zhu.h_weight(i, m + 1, p)
            assert h(x) == f(x)
        for i in range(1, 2 * p + 1):
            x = zhu.h_weight(Fraction(6 * p + 1, 2) - i, 1, p)
            assert h(x) == -f(x) / 2


def test_up_interp_defining_conditions():
    from ctkit.poly_core import binom_rat
    for m, p in ((2, 1), (3, 1), (2, 2)):
        u = zhu.u_p_interp(m, p)
        assert u.degree < p
        for i in range(1, p + 1):
            assert u(zhu.h_weight(i, m + 1, p)) == binom_rat(-m * p - 1 + i, 2 * p - 1)
    assert zhu.u_p_interp(3, 1) == RatPoly([-3])  # constant -m at p=1


def test_phi_values():
    assert zhu.phi(3, 2, 1) == -12
    assert zhu.phi(1, 2, 1) == 0


def test_dims_table():
    d = zhu.dims("D", 2, 2)
    assert (d.zhu_dim, d.irreducible_count) == (23, 22)
    assert d.log_modules == 1
    assert d.zhu_dim == d.irreducible_count + d.log_modules  # 2-dim blocks
    a = zhu.dims("A", 2, 1)
    assert (a.zhu_dim, a.irreducible_count, a.center_dim) == (11, 8, 5)
    assert zhu.dims("D", 3, 2).zhu_dim == 33
    with pytest.raises(ValueError):
        zhu.dims("E", 2, 1)


def test_row_counts_close():
    for family in ("D", "A"):
        for m, p in ((2, 1), (3, 1), (2, 2), (4, 1), (3, 2)):
            rows = zhu.build_tables(family, m, p)
            assert len(rows) == zhu.expected_row_count(family, m, p), (family, m, p)


def test_d_table_2_1_spot_values():
    rows = {r.label: r for r in zhu.build_tables("D", 2, 1)}
    assert rows["Lambda(1)_0^-"].l0 == 1
    assert rows["Lambda(1)_0^-"].h2_0 == 4  # -2 f_p(h(1,3))
    assert rows["Pi(1)_0"].h2_0 == 0
    assert rows["Lambda(1)_2^+"].um0 == (-24, 0)
    assert rows["Lambda(1)_2^-"].um0 == (24, 0)
    assert rows["R(1)^sigma"].l0 == Fraction(9, 16)
    assert rows["R(1)^sigma"].h2_0 == Fraction(15, 64)
    assert rows["R(1)^sigma"].um0 == (Fraction(45, 16), 0)


def test_h2_consistency_and_distinctness():
    for m, p in ((2, 1), (3, 1)):
        rows = zhu.build_tables("D", m, p)
        assert zhu.h2_fp_rows_check(rows, p) == []
        assert zhu.distinct_check(rows) == []


def test_distinctness_degeneracies_are_reported_not_dropped():
    # at p=2 the defining formulas genuinely coincide in two places:
    # the weight polynomial has a double root at 0, and the R weights
    # are reflection-symmetric (h(3/2,1) = h(5/2,1)); the checker must
    # surface these rather than silently uniquifying
    rows = zhu.build_tables("D", 2, 2)
    assert zhu.h2_fp_rows_check(rows, 2) == []
    found = zhu.distinct_check(rows)
    assert ("Lambda(1)_0^+", "Pi(1)_0") in found
    assert ("R(1,l=1)", "R(1,l=2)") in found


def test_a_table_2_1_spot_values():
    from ctkit.poly_core import binom_rat
    rows = {r.label: r for r in zhu.build_tables("A", 2, 1)}
    lam0 = [r for r in rows.values() if r.h0 == 0]
    assert lam0  # the uncharged top row
    # highest-weight eigenvalues come from one binomial family
    assert rows["Lambda(1)_2"].h0 == binom_rat(-2, 1) == -2
    assert rows["Lambda(1)_2"].dim_lowest == 2
    assert rows["Pi(1)_0^+"].h0 == -rows["Pi(1)_0^-"].h0


def test_csv_rfc4180():
    rows = zhu.build_tables("D", 2, 1)
    text = zhu.rows_to_csv(rows, "D")
    lines = text.split("\r\n")
    assert lines[0] == "module,L0,H2_0,Um_0"
    assert len([l for l in lines if l]) == len(rows) + 1
    # comma-carrying labels are quoted
    assert any(l.startswith('"R(1,l=') for l in lines)


def test_markdown_render():
    md = zhu.rows_to_markdown(zhu.build_tables("A", 2, 1), "A")
    assert md.splitlines()[0].startswith("| module |")
    assert "| 0 |" in md


def test_custom_r_rows():
    rows = zhu.build_tables("D", 2, 1,
                            r_params=[{"i": 1, "ell": 1, "label": "R(custom)"}])
    labels = [r.label for r in rows]
    assert "R(custom)" in labels
    assert "R(1,l=2)" not in labels
