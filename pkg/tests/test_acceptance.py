"""One test per shipped acceptance criterion, each printing a PASS/FAIL
line (run with -s to see them).  Every comparison is exact; there are no
tolerances anywhere in this file."""

import json
import time
from fractions import Fraction
from functools import lru_cache

from ctkit import cli
from ctkit.ct_engine import constant_term, dense_oracle
from ctkit.identity_suite import (
    build_case,
    case_to_json,
    dyson_expression,
    run_case,
    run_pair,
)
from ctkit.poly_core import RatPoly, binom_rat, poly_gcd
from ctkit import zhu

JOBS = 4

# (m, p) -> (first residual, second residual, first scale, second scale)
H_TABLE = {
    (2, 1): (RatPoly([1]), RatPoly([107, 0, 4]),
             Fraction(64, 4725), Fraction(16, 155925)),
    (2, 2): (RatPoly([1]), RatPoly([175, -8, 4]),
             Fraction(-256, 453727248975), Fraction(-64, 28584816685425)),
    (3, 1): (RatPoly([1]), RatPoly([362, 0, 9]),
             Fraction(-4782969, 2317579264000),
             Fraction(-1594323, 356907206656000)),
}

F_TABLE = {
    (2, 1): (RatPoly([1]), RatPoly([85, 0, 4]),
             Fraction(-32, 945), Fraction(-16, 51975)),
    (2, 2): (RatPoly([224, -34, 17]),
             RatPoly([1568, -210, 121, -16, 4]),
             Fraction(32, 1443677610375), Fraction(16, 6640917007725)),
    (3, 1): (RatPoly([1]), RatPoly([320, 0, 9]),
             Fraction(1594323, 231757926400),
             Fraction(531441, 32446109696000)),
}

CELLS = ((2, 1), (2, 2), (3, 1))


@lru_cache(maxsize=None)
def _pair(id, m, p):
    return run_pair(id, m, p, jobs=JOBS)


@lru_cache(maxsize=None)
def _one(id, m, p, mode="interpolated"):
    return run_case(build_case(id, m, p), mode, jobs=JOBS)


def _line(n, ok, desc):
    print(f"CRITERION {n:2d}: {'PASS' if ok else 'FAIL'} - {desc}")
    assert ok, f"criterion {n} failed: {desc}"


def _check_table(builder_id, table):
    for (m, p), (r1, r2, s1, s2) in table.items():
        a, b = _pair(builder_id, m, p)
        if not (a.division_exact and b.division_exact):
            return False, f"({m},{p}) division inexact"
        if (a.residual, b.residual) != (r1, r2):
            return False, f"({m},{p}) residual mismatch: {a.residual} | {b.residual}"
        if (a.scale, b.scale) != (s1, s2) or not s1 or not s2:
            return False, f"({m},{p}) scale mismatch: {a.scale} | {b.scale}"
    return True, "all cells reproduce the tabulated residuals"


def test_criterion_1_h_residual_table():
    ok, why = _check_table("H_pm", H_TABLE)
    _line(1, ok, f"H-pair residuals at {list(H_TABLE)}: {why}")


def test_criterion_2_f_residual_table():
    ok, why = _check_table("F_pm", F_TABLE)
    _line(2, ok, f"F-pair residuals at {list(F_TABLE)}: {why}")


def test_criterion_3_coprimality():
    ok = True
    for id, table in (("H_pm", H_TABLE), ("F_pm", F_TABLE)):
        for m, p in table:
            a, b = _pair(id, m, p)
            g = poly_gcd(a.residual, b.residual)
            ok = ok and g == RatPoly([1]) and a.coprime_partner_check is True
    _line(3, ok, "each residual pair has gcd 1, exactly")


def test_criterion_4_two_display_identity():
    ok = True
    expected_mu = {(2, 1): Fraction(-4, 45), (2, 2): Fraction(40, 4851)}
    for (m, p), mu in expected_mu.items():
        rep = _one("A2", m, p)
        ok = ok and rep.division_exact and rep.display_equality is True
        ok = ok and rep.scale == mu and mu != 0
    _line(4, ok, "both displays agree (factor -2), division exact, "
                 "constant nonzero at (2,1) and (2,2)")


def test_criterion_5_delta_derivative_identities():
    a4 = _one("A4", 2, 1)
    a6 = _one("A6", 2, 1)
    ok = (a4.division_exact and a4.scale == Fraction(-512, 175)
          and a6.division_exact and a6.scale == -10)
    _line(5, ok, "delta-derivative cases divide by the stated binomial "
                 f"products at p=1 (constants {a4.scale}, {a6.scale})")


def test_criterion_6_degree_bounds():
    ok = True
    for (m, p) in CELLS:
        bound = 2 * (m - 1) * (p - 1)
        for first_id, table in (("H_pm", H_TABLE), ("F_pm", F_TABLE)):
            a, b = _pair(first_id, m, p)
            ok = ok and a.residual.degree <= bound
            ok = ok and b.residual.degree <= bound + 2
    _line(6, ok, "residual degrees within 2(m-1)(p-1) and +2 on every cell")


def test_criterion_7_oracle_equivalence():
    ok = True
    for id in ("A1", "A2"):
        exact = _one(id, 2, 1, "exact")
        interp = _one(id, 2, 1, "interpolated")
        ok = ok and exact.lhs_poly == interp.lhs_poly
        expr = build_case(id, 2, 1).lhs[0]
        for t in range(6):
            ok = ok and exact.lhs_poly(t) == dense_oracle(expr, t)
    _line(7, ok, "exact = interpolated coefficientwise; dense oracle "
                 "agrees at t in 0..5 (A1 and A2 at (2,1))")


def test_criterion_8_dyson_sanity():
    t0 = time.perf_counter()
    vals = [constant_term(dyson_expression(n, p), "exact").value(0)
            for n, p in ((2, 1), (2, 2), (3, 1), (3, 2))]
    dt = time.perf_counter() - t0
    ok = vals == [2, 6, 6, 90] and dt < 1.0
    _line(8, ok, f"constant terms {vals} in {dt:.3f}s")


def test_criterion_9_weight_bookkeeping():
    ok = True
    for p in (1, 2):
        d = zhu.dims("D", 2, p)
        ok = ok and (d.zhu_dim, d.irreducible_count) == (12 * p - 1, 11 * p)
    for m, p in ((3, 1), (4, 2)):
        d = zhu.dims("D", m, p)
        ok = ok and d.zhu_dim == (m * m + 8) * p - 1
        ok = ok and d.irreducible_count == (m * m + 7) * p
        a = zhu.dims("A", m, p)
        ok = ok and a.zhu_dim == (2 * m * m + 4) * p - 1
        ok = ok and a.irreducible_count == 2 * m * m * p
        ok = ok and a.center_dim == (m * m + 2) * p - 1

    rows = zhu.build_tables("D", 2, 1)
    ok = ok and len(rows) == zhu.expected_row_count("D", 2, 1)
    ok = ok and zhu.h2_fp_rows_check(rows, 1) == []
    by_label = {r.label: r for r in rows}
    f1 = zhu.f_p(1)
    ok = ok and by_label["Lambda(1)_0^-"].h2_0 == -2 * f1(1) == 4
    ok = ok and by_label["Pi(1)_0"].h2_0 == f1(Fraction(1, 4)) == 0
    ok = ok and by_label["Lambda(1)_2^+"].um0 == (-24, 0)
    ok = ok and by_label["R(1)^sigma"].um0 == (Fraction(45, 16), 0)
    arows = {r.label: r for r in zhu.build_tables("A", 2, 1)}
    ok = ok and arows["Lambda(1)_2"].h0 == binom_rat(-2, 1)
    ok = ok and arows["Lambda(1)_2"].dim_lowest == 2

    for m, p in ((2, 1), (2, 2), (3, 1)):
        h = zhu.h_p_interp(m, p)
        u = zhu.u_p_interp(m, p)
        fp = zhu.f_p(p)
        for i in range(1, p + 1):
            x = zhu.h_weight(i, m + 1, p)
            ok = ok and h(x) == fp(x)
            ok = ok and u(x) == binom_rat(-m * p - 1 + i, 2 * p - 1)
        for i in range(1, 2 * p + 1):
            x = zhu.h_weight(Fraction(6 * p + 1, 2) - i, 1, p)
            ok = ok and h(x) == -fp(x) / 2
    _line(9, ok, "dimension formulas, table rows at (2,1), and both "
                 "interpolants check out exactly")


def test_criterion_10_falsifiability(tmp_path, monkeypatch):
    monkeypatch.setenv("CTKIT_CACHE_DIR", str(tmp_path / "cache"))
    m, p = 2, 1
    doc = case_to_json(build_case("A1", m, p))
    doc["rhs_binomials"][0] = ["1", str(m * p), 2 * (m + 1) * p]
    f = tmp_path / "a1_perturbed.json"
    f.write_text(json.dumps(doc))
    rc = cli.main(["verify", "--case-file", str(f),
                   "--out-dir", str(tmp_path / "out")])
    rep = json.loads((tmp_path / "out" / "A1_m2_p1.json").read_text())
    ok = rc == 2 and rep["division_exact"] is False and rep["remainder"]
    _line(10, ok, "perturbed right-hand side is rejected: "
                  f"division_exact={rep['division_exact']}, exit={rc}")
