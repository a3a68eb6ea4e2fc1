import json
from fractions import Fraction
from functools import lru_cache
from importlib import resources

import pytest

from ctkit.identity_suite import (
    COPRIME_PARTNER,
    IDENTITY_IDS,
    build_case,
    case_from_json,
    case_to_json,
    report_to_json,
    resolve_variant,
    run_case,
    run_pair,
)
from ctkit.poly_core import RatPoly


@lru_cache(maxsize=None)
def _run(id, m, p, mode="interpolated"):
    return run_case(build_case(id, m, p), mode)


def test_a1_scalars():
    # constant-only residual; the scalar factors out in front of the product
    for m, scale in ((1, 2), (2, -4), (3, Fraction(-18, 5))):
        rep = _run("A1", m, 1)
        assert rep.division_exact
        assert rep.residual == RatPoly([1])
        assert rep.scale == scale


def test_a2_both_displays():
    rep = _run("A2", 2, 1)
    assert rep.division_exact
    assert rep.display_equality is True  # second display carries factor -2
    assert rep.residual == RatPoly([1])
    assert rep.scale == Fraction(-4, 45)
    assert rep.passed


def test_a2_m3():
    rep = _run("A2", 3, 1)
    assert rep.division_exact and rep.display_equality
    assert rep.scale == Fraction(-9, 700)


def test_a3_first_display_divides_but_displays_disagree():
    # the two printed displays cannot both be right: under every admissible
    # expansion reading the second one fails to reproduce the first, so the
    # compound claim is reported failed while the division itself is exact.
    rep = _run("A3", 3, 1)
    assert rep.division_exact
    assert rep.residual == RatPoly([1])
    assert rep.scale == Fraction(-192, 67375)
    assert rep.display_equality is False
    assert not rep.passed


def test_a4_delta_pipeline():
    rep = _run("A4", 2, 1)
    assert rep.division_exact
    assert rep.residual == RatPoly([1])
    assert rep.scale == Fraction(-512, 175)


def test_a6_and_alias():
    rep = _run("A6", 2, 1)
    assert rep.division_exact
    assert rep.scale == -10
    alias = build_case("A5", 2, 1)
    assert alias.id == "A5"
    assert alias.lhs == build_case("A6", 2, 1).lhs


def test_h_pair_2_1():
    a, b = run_pair("H_pm", 2, 1)
    assert a.residual == RatPoly([1])
    assert a.scale == Fraction(64, 4725)
    assert b.residual == RatPoly([107, 0, 4])
    assert b.scale == Fraction(16, 155925)
    assert a.coprime_partner_check is True


def test_f_pair_2_1():
    a, b = run_pair("F_pm", 2, 1)
    assert a.residual == RatPoly([1])
    assert a.scale == Fraction(-32, 945)
    assert b.residual == RatPoly([85, 0, 4])
    assert b.scale == Fraction(-16, 51975)
    assert a.coprime_partner_check is True


def test_degree_bounds_small_cells():
    for id in ("H_pm", "F_pm"):
        rep = _run(id, 2, 1)
        assert rep.residual.degree <= 2 * (2 - 1) * (1 - 1)
    for id in ("Htilde_pm", "Ftilde_pm"):
        rep = _run(id, 2, 1)
        assert rep.residual.degree <= 2 * (2 - 1) * (1 - 1) + 2


def test_variant_resolution():
    out = resolve_variant("A2", 2, 1)
    assert out["m(t+1)"] is True
    assert out["resolved"] == "m(t+1)"


def test_exact_mode_matches_interpolated():
    for id in ("A1", "H_pm"):
        assert _run(id, 2, 1, "exact").lhs_poly == _run(id, 2, 1).lhs_poly


def test_case_json_roundtrip():
    for id in IDENTITY_IDS:
        m = 3 if id == "A3" else 2
        case = build_case(id, m, 1)
        doc = case_to_json(case)
        assert doc["schema"] == 1
        assert case_from_json(json.loads(json.dumps(doc))) == case


def test_shipped_case_registry_matches_builders():
    files = resources.files("ctkit") / "cases"
    found = 0
    for entry in files.iterdir():
        if not entry.name.endswith(".json"):
            continue
        doc = json.loads(entry.read_text(encoding="utf-8"))
        case = case_from_json(doc)
        assert case == build_case(case.id, case.m, case.p)
        found += 1
    assert found == len(IDENTITY_IDS)


def test_report_json_shape():
    doc = report_to_json(_run("Htilde_pm", 2, 1))
    assert doc["schema"] == 1
    assert doc["residual"] == ["107", "0", "4"]  # lowest-degree first
    assert doc["scale"] == "16/155925"
    assert doc["division_exact"] is True
    assert doc["remainder"] is None


def test_perturbed_rhs_is_rejected():
    case = build_case("A1", 2, 1)
    doc = case_to_json(case)
    doc["rhs_binomials"][0] = ["1", "2", 12]  # way past the lhs degree
    bad = case_from_json(doc)
    rep = run_case(bad)
    assert rep.division_exact is False
    assert rep.remainder is not None and not rep.remainder.is_zero()
    assert not rep.passed


def test_unknown_id_rejected():
    with pytest.raises(ValueError):
        build_case("Z9", 2, 1)
    with pytest.raises(ValueError):
        build_case("A3", 2, 1)  # needs m >= 3
    with pytest.raises(ValueError):
        run_pair("A1", 2, 1)  # no partner


def test_partner_map_is_involution():
    for a, b in COPRIME_PARTNER.items():
        assert COPRIME_PARTNER[b] == a
