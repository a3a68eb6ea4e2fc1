"""Weight bookkeeping: closed-form polynomials, eigenvalue tables, dimensions.

Everything here is consumer-side arithmetic over the weights

    h(i, j) = (i - jp + p - 1)(i - jp - p + 1) / (4p),

with i allowed to be any exact rational (half-integers and fractions with
denominator m occur as first indices).  The two module families are labeled
"D" (commuting pair L(0), H2(0) plus one extra operator U(0)) and "A"
(L(0), H(0) with a lowest-space dimension column).

U(0) entries of the D family carry a factor i^m (imaginary unit), so they
are kept as exact (re, im) pairs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .poly_core import Rat, RatLike, RatPoly, binom_rat, interpolate


def h_weight(i: RatLike, j: int, p: int) -> Rat:
    """The weight (i - jp + p - 1)(i - jp - p + 1) / (4p)."""
    if p < 1:
        raise ValueError("p must be >= 1")
    i = Fraction(i)
    return (i - j * p + p - 1) * (i - j * p - p + 1) / (4 * p)


@dataclass(frozen=True)
class Weight:
    """A tagged weight value; ``value`` is always h_weight(i, j, p)."""

    i: Rat
    j: int
    p: int
    value: Rat

    @classmethod
    def of(cls, i: RatLike, j: int, p: int) -> "Weight":
        i = Fraction(i)
        return cls(i, j, p, h_weight(i, j, p))


# ---------------------------------------------------------------------------
# closed-form polynomials in x (= the L(0) eigenvalue)


def f_p(p: int) -> RatPoly:
    """Leading-constant-normalized product over the first 3p-1 weights.

    (-1)^p (4p)^(3p-1) (2p)! / ((4p-1)!(3p-1)!p!) * prod_{i=1}^{3p-1} (x - h(i,1))
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    c = Fraction((-1) ** p * (4 * p) ** (3 * p - 1) * math.factorial(2 * p),
                 math.factorial(4 * p - 1) * math.factorial(3 * p - 1)
                 * math.factorial(p))
    out = RatPoly([c])
    for i in range(1, 3 * p):
        out = out * RatPoly([-h_weight(i, 1, p), 1])
    return out


def ell_p(p: int) -> RatPoly:
    """Monic annihilator with roots h(4p-i,1), i<=p, and h(3p+1/2-i,1), i<=2p."""
    out = RatPoly([1])
    for i in range(1, p + 1):
        out = out * RatPoly([-h_weight(4 * p - i, 1, p), 1])
    for i in range(1, 2 * p + 1):
        out = out * RatPoly([-h_weight(Fraction(6 * p + 1, 2) - i, 1, p), 1])
    return out


def g_p(m: int, p: int) -> RatPoly:
    """Like ell_p but the first block of roots sits at h(i, m+1), i<=p."""
    if m < 2:
        raise ValueError("m must be >= 2")
    out = RatPoly([1])
    for i in range(1, p + 1):
        out = out * RatPoly([-h_weight(i, m + 1, p), 1])
    for i in range(1, 2 * p + 1):
        out = out * RatPoly([-h_weight(Fraction(6 * p + 1, 2) - i, 1, p), 1])
    return out


def v_p(m: int, p: int) -> RatPoly:
    """Monic prod_{i=1}^p (x - h(i, m+1)); the true object carries an
    undetermined nonzero scalar, stored here with scalar 1."""
    out = RatPoly([1])
    for i in range(1, p + 1):
        out = out * RatPoly([-h_weight(i, m + 1, p), 1])
    return out


def _hp_nodes(m: int, p: int) -> list[tuple[Rat, Rat]]:
    fp = f_p(p)
    nodes: list[tuple[Rat, Rat]] = []
    for i in range(1, p + 1):
        x = h_weight(i, m + 1, p)
        nodes.append((x, fp(x)))
    for j in range(1, 2 * p + 1):
        x = h_weight(Fraction(6 * p + 1, 2) - j, 1, p)
        nodes.append((x, -fp(x) / 2))
    return nodes


def h_p_interp(m: int, p: int) -> RatPoly:
    """Degree <= 3p-1 interpolant through f_p on the h(i,m+1) block and
    -f_p/2 on the half-integer block.  Node collisions raise (they name
    the colliding positions)."""
    poly = interpolate(_hp_nodes(m, p))
    assert poly.degree < 3 * p
    return poly


def u_p_interp(m: int, p: int) -> RatPoly:
    """Degree <= p-1 interpolant with u(h(i,m+1)) = C(-mp-1+i, 2p-1)."""
    nodes = [(h_weight(i, m + 1, p), binom_rat(-m * p - 1 + i, 2 * p - 1))
             for i in range(1, p + 1)]
    poly = interpolate(nodes)
    assert poly.degree < p
    return poly


def phi(t: RatLike, m: int, p: int) -> Rat:
    """Exact evaluation of the sign-weighted binomial/factorial product.

    (-1)^(m(m-1)p/2) prod_{l=0}^{m-1} C(t+pl, (m+1)p-1)
        * ((m+1)p-1)! ((l+1)p)! / (((m+l+1)p-1)! p!)
    """
    t = Fraction(t)
    k = (m + 1) * p - 1
    out = Fraction(-1) ** ((m * (m - 1) * p) // 2)
    for l in range(m):
        out *= binom_rat(t + p * l, k)
        out *= Fraction(math.factorial(k) * math.factorial((l + 1) * p),
                        math.factorial((m + l + 1) * p - 1) * math.factorial(p))
    return out


# ---------------------------------------------------------------------------
# tables

# the imaginary unit's powers, as exact (re, im)
_I_POW = ((1, 0), (0, 1), (-1, 0), (0, -1))


def _ipow(m: int) -> tuple[Fraction, Fraction]:
    re, im = _I_POW[m % 4]
    return Fraction(re), Fraction(im)


@dataclass(frozen=True)
class ZhuRow:
    """One table row.  D-family rows fill h2_0/um0, A-family rows fill h0
    and dim_lowest; um0 is an exact (re, im) pair."""

    label: str
    l0: Rat
    h2_0: Rat | None = None
    um0: tuple[Rat, Rat] | None = None
    h0: Rat | None = None
    dim_lowest: int = 1


@dataclass(frozen=True)
class DimReport:
    family: str
    m: int
    p: int
    zhu_dim: int
    irreducible_count: int
    center_dim: int | None
    a0_bound: int
    graded_piece_bound: int
    log_modules: int


def dims(family: str, m: int, p: int) -> DimReport:
    if m < 2 or p < 1:
        raise ValueError("need m >= 2, p >= 1")
    if family == "D":
        return DimReport("D", m, p,
                         zhu_dim=(m * m + 8) * p - 1,
                         irreducible_count=(m * m + 7) * p,
                         center_dim=None,
                         a0_bound=(m * m + 5) * p - 1,
                         graded_piece_bound=3 * p,
                         log_modules=p - 1)
    if family == "A":
        # a0_bound: the consistent reading (2m^2+2)p-1; the printed
        # (2m^2p+2)p-1 contradicts the stated total (they agree at p=1)
        return DimReport("A", m, p,
                         zhu_dim=(2 * m * m + 4) * p - 1,
                         irreducible_count=2 * m * m * p,
                         center_dim=(m * m + 2) * p - 1,
                         a0_bound=(2 * m * m + 2) * p - 1,
                         graded_piece_bound=p,
                         log_modules=p - 1)
    raise ValueError(f"unknown family {family!r}")


def expected_row_count(family: str, m: int, p: int) -> int:
    return dims(family, m, p).irreducible_count


def build_tables(family: str, m: int, p: int,
                 r_params: Sequence[dict] | None = None) -> list[ZhuRow]:
    """Enumerate table rows with exact eigenvalues.

    The R(i,j,k) rows depend on an externally defined parameter ell; by
    default they are enumerated over ell = 1..mp (D) or 1..2mp (A) crossed
    with i = 1..m-1, which is the unique rectangular choice closing the
    published counts.  Pass r_params (dicts with keys "i", "ell" and an
    optional "label") to override.  Callers cross-check len(rows) against
    expected_row_count; a mismatch is a finding, not an error here.
    """
    if m < 2 or p < 1:
        raise ValueError("need m >= 2, p >= 1")
    fp = f_p(p)
    rows: list[ZhuRow] = []
    half = Fraction(1, 2)
    zero = Fraction(0)

    if family == "D":
        k = m // 2
        um_scale = Fraction(math.factorial(2 * m), math.factorial(m))
        for i in range(1, p + 1):
            rows.append(ZhuRow(f"Lambda({i})_0^+", h_weight(i, 1, p),
                               h2_0=zero, um0=(zero, zero)))
        for i in range(1, p + 1):
            x = h_weight(i, 3, p)
            rows.append(ZhuRow(f"Lambda({i})_0^-", x, h2_0=-2 * fp(x),
                               um0=(zero, zero)))
        # interior Lambda rows: the +/- pair is a single module
        j_top = k - 1 if m % 2 == 0 else k
        for j in range(1, j_top + 1):
            for i in range(1, p + 1):
                x = h_weight(i, 2 * j + 1, p)
                rows.append(ZhuRow(f"Lambda({i})_{j}", x, h2_0=fp(x),
                                   um0=(zero, zero)))
        for j in range(0, k):
            for i in range(1, p + 1):
                x = h_weight(p + i, 2 * j + 1, p)
                rows.append(ZhuRow(f"Pi({i})_{j}", x, h2_0=fp(x),
                                   um0=(zero, zero)))
        # the U-charged pair: Lambda(i)_m for even m, Pi(i)_m for odd
        for i in range(1, p + 1):
            if m % 2 == 0:
                x = h_weight(i, m + 1, p)
                base = f"Lambda({i})_{m}"
            else:
                x = h_weight(p + i, m + 2, p)
                base = f"Pi({i})_{m}"
            u = um_scale * phi(-m * p + i - 1, m, p)
            rows.append(ZhuRow(base + "^+", x, h2_0=fp(x), um0=(u, zero)))
            rows.append(ZhuRow(base + "^-", x, h2_0=fp(x), um0=(-u, zero)))
        if r_params is None:
            r_params = [{"i": i, "ell": ell}
                        for i in range(1, m) for ell in range(1, m * p + 1)]
        for spec in r_params:
            i, ell = spec["i"], Fraction(spec["ell"])
            x = h_weight(ell + 1 - Fraction(i, m), 1, p)
            rows.append(ZhuRow(spec.get("label", f"R({i},l={ell})"), x,
                               h2_0=fp(x), um0=(zero, zero)))
        ire, iim = _ipow(m)
        tw_scale = Fraction(math.factorial(2 * m),
                            2 ** (m - 1) * math.factorial(m))
        for j in range(1, 2 * p + 1):
            x = h_weight(3 * p + half - j, 1, p)
            u = tw_scale * phi(3 * p - half - j, m, p)
            rows.append(ZhuRow(f"R({j})^sigma", x, h2_0=-fp(x) / 2,
                               um0=(ire * u, iim * u)))
            rows.append(ZhuRow(f"R({j})^h.sigma", x, h2_0=-fp(x) / 2,
                               um0=(-ire * u, -iim * u)))
        return rows

    if family == "A":
        k = m // 2
        for i in range(1, p + 1):
            rows.append(ZhuRow(f"Lambda({i})_0", h_weight(i, 1, p), h0=zero))
        j_top = k - 1 if m % 2 == 0 else k
        for j in range(1, j_top + 1):
            for i in range(1, p + 1):
                x = h_weight(i, 2 * j + 1, p)
                h0 = binom_rat(-2 * j * p - 1 + i, 2 * p - 1)
                rows.append(ZhuRow(f"Lambda({i})_{j}^+", x, h0=h0))
                rows.append(ZhuRow(f"Lambda({i})_{j}^-", x, h0=-h0))
        for j in range(0, k):
            for i in range(1, p + 1):
                x = h_weight(p + i, 2 * j + 1, p)
                h0 = binom_rat(-(2 * j - 1) * p - 1 + i, 2 * p - 1)
                rows.append(ZhuRow(f"Pi({i})_{j}^+", x, h0=h0))
                rows.append(ZhuRow(f"Pi({i})_{j}^-", x, h0=-h0))
        # the dim-2 row carries the +/- eigenvalue pair on one lowest space
        for i in range(1, p + 1):
            if m % 2 == 0:
                x = h_weight(i, m + 1, p)
                label = f"Lambda({i})_{m}"
            else:
                x = h_weight(p + i, m + 2, p)
                label = f"Pi({i})_{m}"
            h0 = binom_rat(-m * p - 1 + i, 2 * p - 1)
            rows.append(ZhuRow(label, x, h0=h0, dim_lowest=2))
        if r_params is None:
            r_params = [{"i": i, "ell": ell}
                        for i in range(1, m)
                        for ell in range(1, 2 * m * p + 1)]
        for spec in r_params:
            i, ell = spec["i"], Fraction(spec["ell"])
            x = h_weight(ell + 1 - Fraction(i, m), 1, p)
            rows.append(ZhuRow(spec.get("label", f"R({i},l={ell})"), x,
                               h0=binom_rat(ell - Fraction(i, m), 2 * p - 1)))
        return rows

    raise ValueError(f"unknown family {family!r}")


# ---------------------------------------------------------------------------
# consistency checks (return findings; they never assert)


def h2_fp_rows_check(rows: Iterable[ZhuRow], p: int) -> list[str]:
    """Labels of Lambda/Pi rows whose H2(0) differs from f_p(L(0)).

    Rows built from the -2 f_p and -f_p/2 formulas (the 0^- and twisted
    rows) are out of scope; so are R rows with user-supplied ell.
    """
    fp = f_p(p)
    bad = []
    for row in rows:
        if row.h2_0 is None:
            continue
        name = row.label
        if name.endswith(("^sigma", "^h.sigma")) or "_0^-" in name:
            continue
        if name.startswith("R("):
            continue
        if fp(row.l0) != row.h2_0:
            bad.append(name)
    return bad


def distinct_check(rows: Sequence[ZhuRow]) -> list[tuple[str, str]]:
    """Pairs of rows sharing the full eigenvalue tuple (collisions are
    reported, never silently dropped)."""
    seen: dict[tuple, str] = {}
    out = []
    for row in rows:
        key = (row.l0, row.h2_0, row.um0, row.h0, row.dim_lowest)
        if key in seen:
            out.append((seen[key], row.label))
        else:
            seen[key] = row.label
    return out


# ---------------------------------------------------------------------------
# rendering


def _rat_cell(x: Rat | None) -> str:
    return "" if x is None else str(x)


def _um_cell(um: tuple[Rat, Rat] | None) -> str:
    if um is None:
        return ""
    re, im = um
    if im == 0:
        return str(re)
    sign = "+" if im > 0 else "-"
    return f"{re}{sign}{abs(im)}i"


def _row_cells(row: ZhuRow, family: str) -> list[str]:
    if family == "D":
        return [row.label, _rat_cell(row.l0), _rat_cell(row.h2_0),
                _um_cell(row.um0)]
    return [row.label, _rat_cell(row.l0), _rat_cell(row.h0),
            str(row.dim_lowest)]


_HEADERS = {"D": ["module", "L0", "H2_0", "Um_0"],
            "A": ["module", "L0", "H0", "dim_lowest"]}


def _csv_field(s: str) -> str:
    if any(c in s for c in ',"\r\n'):
        return '"' + s.replace('"', '""') + '"'
    return s


def rows_to_csv(rows: Sequence[ZhuRow], family: str) -> str:
    lines = [",".join(_HEADERS[family])]
    for row in rows:
        lines.append(",".join(_csv_field(c) for c in _row_cells(row, family)))
    return "\r\n".join(lines) + "\r\n"


def rows_to_markdown(rows: Sequence[ZhuRow], family: str) -> str:
    head = _HEADERS[family]
    lines = ["| " + " | ".join(head) + " |",
             "|" + "|".join(" --- " for _ in head) + "|"]
    for row in rows:
        lines.append("| " + " | ".join(_row_cells(row, family)) + " |")
    return "\n".join(lines) + "\n"
