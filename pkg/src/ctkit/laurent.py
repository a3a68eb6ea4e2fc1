"""Truncated multivariate Laurent series and factor expansion rules.

A `Series` is a sparse map from integer exponent vectors to coefficients,
together with a per-variable inclusive window ``[lo, hi]``; arithmetic never
produces exponents outside the window (terms that would leave it are dropped
eagerly, which the engine's bound propagation makes lossless for the target
coefficient).

Coefficients live in one of three interchangeable domains:

* `PolyDomain`     -- coefficients are `RatPoly` values in t (exact mode),
* `EvalDomain`     -- t is a fixed exact rational; integer t gives plain
                      Python ints (the fast path),
* `ModDomain`      -- like `EvalDomain` at integer t but reduced modulo a
                      word-size prime (used for CRT acceleration).

Factors are the five shapes occurring in residue integrands, plus an explicit
small-polynomial factor for prefactors like (2 + x0):

    Monomial(v, e)      v^e
    OnePlus(v, a, b)    (1 + v)^(a*t + b)
    PolyFactor(v, cs)   cs[0] + cs[1]*v + ...
    Diff(u, v, e)       (u - v)^e with e >= 0
    GeomInv(num, den, N)    (1 - num/den)^(-N), expanded in powers of num/den
    DeltaDeriv(w, v, k)     (1/k!) d^k/dw^k [ v^(-1) delta(w/v) ]

`DeltaDeriv` is never expanded as a series; the engine reduces it directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Union

from .backend import get_backend
from .poly_core import RatPoly, binom_poly, binom_rat

Var = str


# ---------------------------------------------------------------------------
# factors


@dataclass(frozen=True)
class Monomial:
    var: Var
    e: int


@dataclass(frozen=True)
class OnePlus:
    var: Var
    a: int
    b: int


@dataclass(frozen=True)
class PolyFactor:
    var: Var
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if not self.coeffs or self.coeffs[-1] == 0:
            raise ValueError("PolyFactor: coefficients must end with a nonzero entry")


@dataclass(frozen=True)
class Diff:
    u: Var
    v: Var
    e: int

    def __post_init__(self):
        if self.e < 0:
            raise ValueError(
                "Diff: negative powers must be pre-normalized to "
                "Monomial x GeomInv via normalize_negative_power"
            )


@dataclass(frozen=True)
class GeomInv:
    num: Var
    den: Var
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("GeomInv: N must be >= 0")


@dataclass(frozen=True)
class DeltaDeriv:
    w: Var
    v: Var
    k: int

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("DeltaDeriv: k must be >= 0")
        if self.w == self.v:
            raise ValueError("DeltaDeriv: w and v must differ")


Factor = Union[Monomial, OnePlus, PolyFactor, Diff, GeomInv, DeltaDeriv]


def factor_vars(f: Factor) -> tuple[Var, ...]:
    if isinstance(f, (Monomial, OnePlus, PolyFactor)):
        return (f.var,)
    if isinstance(f, Diff):
        return (f.u, f.v)
    if isinstance(f, GeomInv):
        return (f.num, f.den)
    if isinstance(f, DeltaDeriv):
        return (f.w, f.v)
    raise TypeError(f"not a factor: {f!r}")


def normalize_negative_power(u: Var, v: Var, e: int, dominant: Var):
    """Rewrite (u - v)^e with e < 0 as sign * Monomial * GeomInv.

    dominant = u:  u^e * (1 - v/u)^e        -> sign +1
    dominant = v:  (-1)^e * v^e * (1 - u/v)^e  -> sign (-1)^e

    Returns (sign, Monomial, GeomInv); "dominant" is the variable whose
    (negative) powers carry the expansion, i.e. the series is expanded in
    powers of the other one.
    """
    if e >= 0:
        raise ValueError("normalize_negative_power: exponent must be negative")
    if dominant == u:
        return 1, Monomial(u, e), GeomInv(v, u, -e)
    if dominant == v:
        return (-1) ** e, Monomial(v, e), GeomInv(u, v, -e)
    raise ValueError(f"dominant variable {dominant!r} is neither {u!r} nor {v!r}")


# ---------------------------------------------------------------------------
# coefficient domains


class PolyDomain:
    """Coefficients are RatPoly values in t."""

    name = "poly"
    zero = RatPoly()
    one = RatPoly([1])

    def from_int(self, c: int):
        return RatPoly([c])

    def binom(self, a: int, b: int, k: int):
        return binom_poly(a, b, k)

    def binom_int(self, z: int, k: int):
        # C(z, k) for a plain integer z (no t dependence)
        return RatPoly([_int_binom(z, k)])

    def is_zero(self, c) -> bool:
        return not c


class EvalDomain:
    """Coefficients are exact numbers at a fixed rational t.

    With integer t every coefficient is a plain int, which is what the
    compiled kernel is fastest at.
    """

    def __init__(self, t):
        self.t = t if isinstance(t, int) else Fraction(t)
        self.name = f"eval(t={self.t})"
        self.zero = 0
        self.one = 1

    def from_int(self, c: int):
        return c

    def binom(self, a: int, b: int, k: int):
        z = a * self.t + b
        if isinstance(z, int):
            return _int_binom(z, k)
        return binom_rat(z, k)

    def binom_int(self, z: int, k: int):
        return _int_binom(z, k)

    def is_zero(self, c) -> bool:
        return not c


class ModDomain:
    """Integer coefficients reduced modulo a prime (t must be an integer)."""

    def __init__(self, t: int, prime: int):
        if not isinstance(t, int):
            raise TypeError("ModDomain requires an integer t sample")
        self.t = t
        self.prime = prime
        self.name = f"mod({prime},t={t})"
        self.zero = 0
        self.one = 1
        self._inv_fact: list[int] = [1]

    def from_int(self, c: int):
        return c % self.prime

    def _inverse_factorial(self, k: int) -> int:
        while len(self._inv_fact) <= k:
            n = len(self._inv_fact)
            self._inv_fact.append(
                self._inv_fact[-1] * pow(n, self.prime - 2, self.prime) % self.prime
            )
        return self._inv_fact[k]

    def binom(self, a: int, b: int, k: int):
        return self.binom_int(a * self.t + b, k)

    def binom_int(self, z: int, k: int):
        p = self.prime
        acc = 1
        z %= p
        for j in range(k):
            acc = acc * ((z - j) % p) % p
        return acc * self._inverse_factorial(k) % p

    def is_zero(self, c) -> bool:
        return c % self.prime == 0


Domain = Union[PolyDomain, EvalDomain, ModDomain]


def _int_binom(z: int, k: int) -> int:
    """C(z, k) for any integer z, as an exact int."""
    if k < 0:
        raise ValueError("k must be >= 0")
    if z >= 0:
        return math.comb(z, k) if k <= z else 0
    # C(z,k) = (-1)^k C(k - z - 1, k) for z < 0
    return (-1) ** k * math.comb(k - z - 1, k)


# ---------------------------------------------------------------------------
# series


class Series:
    """Sparse windowed Laurent series over an ordered variable tuple."""

    __slots__ = ("vars", "window", "terms")

    def __init__(
        self,
        vars: tuple[Var, ...],
        window: tuple[tuple[int, int], ...],
        terms: dict,
    ):
        self.vars = vars
        self.window = window
        self.terms = terms

    @classmethod
    def scalar(cls, c) -> "Series":
        return cls((), (), {(): c} if c else {})

    def copy(self) -> "Series":
        return Series(self.vars, self.window, dict(self.terms))

    def nterms(self) -> int:
        return len(self.terms)

    def var_index(self, v: Var) -> int:
        try:
            return self.vars.index(v)
        except ValueError:
            raise KeyError(f"variable {v!r} not in series over {self.vars}") from None

    def aligned(self, vars: tuple[Var, ...], window: tuple[tuple[int, int], ...]) -> "Series":
        """Re-embed this series over a superset/reordering of its variables.

        New variables get exponent 0, which must lie inside their window.
        """
        if vars == self.vars:
            return Series(vars, window, self.terms)
        pos = []
        for v in self.vars:
            pos.append(vars.index(v))
        for i, v in enumerate(vars):
            if v not in self.vars:
                lo, hi = window[i]
                if lo > 0 or hi < 0:
                    raise ValueError(f"window for absent variable {v!r} excludes 0")
        n = len(vars)
        out: dict = {}
        for key, c in self.terms.items():
            nk = [0] * n
            for e, j in zip(key, pos):
                nk[j] = e
            out[tuple(nk)] = c
        return Series(vars, window, out)

    def coeff_series(self, v: Var, e: int) -> "Series":
        """Sub-series with exponent exactly e in v, v removed from the set."""
        i = self.var_index(v)
        lo, hi = self.window[i]
        if not lo <= e <= hi:
            raise ValueError(
                f"coeff: exponent {e} for {v!r} outside window [{lo}, {hi}] "
                "(truncation-bound bug)"
            )
        nvars = self.vars[:i] + self.vars[i + 1 :]
        nwin = self.window[:i] + self.window[i + 1 :]
        out: dict = {}
        for key, c in self.terms.items():
            if key[i] == e:
                out[key[:i] + key[i + 1 :]] = c
        return Series(nvars, nwin, out)

    def get(self, key: tuple[int, ...]):
        return self.terms.get(key)

    def __repr__(self):
        return f"<Series vars={self.vars} terms={len(self.terms)}>"


def coeff(s: Series, v: Var, e: int) -> Series:
    return s.coeff_series(v, e)


def series_mul(
    a: Series,
    b: Series,
    window: tuple[tuple[int, int], ...] | None = None,
    total: tuple[int, int] | None = None,
    domain: Domain | None = None,
) -> Series:
    """Windowed product.  Result window defaults to the sum of the inputs'.

    ``total`` optionally bounds the total degree (sum of exponents) of kept
    terms; the engine derives it from its degree bookkeeping.  Terms whose
    exponent vector leaves the window are dropped.
    """
    if a.vars != b.vars:
        raise ValueError(f"series_mul: variable sets differ: {a.vars} vs {b.vars}")
    n = len(a.vars)
    if window is None:
        window = tuple(
            (la + lb, ha + hb) for (la, ha), (lb, hb) in zip(a.window, b.window)
        )
    if total is None:
        tlo = sum(lo for lo, _ in window)
        thi = sum(hi for _, hi in window)
    else:
        tlo, thi = total
    lo = [w[0] for w in window]
    hi = [w[1] for w in window]
    mod = domain.prime if isinstance(domain, ModDomain) else 0
    terms = get_backend().mul(a.terms, b.terms, n, lo, hi, tlo, thi, mod)
    return Series(a.vars, window, terms)


# ---------------------------------------------------------------------------
# factor expansion


def expand_factor(f: Factor, window: Mapping[Var, tuple[int, int]], domain: Domain) -> Series:
    """Expand one factor into a Series over its own variables.

    ``window`` must bound every variable the factor touches; for GeomInv the
    numerator window caps the geometric expansion order.  DeltaDeriv has no
    series expansion -- reduce via ct_engine.
    """
    if isinstance(f, DeltaDeriv):
        raise ValueError("DeltaDeriv cannot be expanded as a series; reduce via ct_engine")

    if isinstance(f, Monomial):
        lo, hi = window[f.var]
        terms = {(f.e,): domain.one} if lo <= f.e <= hi else {}
        return Series((f.var,), ((lo, hi),), terms)

    if isinstance(f, PolyFactor):
        lo, hi = window[f.var]
        terms = {}
        for e, c in enumerate(f.coeffs):
            if c and lo <= e <= hi:
                terms[(e,)] = domain.from_int(c)
        return Series((f.var,), ((lo, hi),), terms)

    if isinstance(f, OnePlus):
        lo, hi = window[f.var]
        terms = {}
        for k in range(max(lo, 0), hi + 1):
            c = domain.binom(f.a, f.b, k)
            if not domain.is_zero(c):
                terms[(k,)] = c
        return Series((f.var,), ((lo, hi),), terms)

    if isinstance(f, Diff):
        (ulo, uhi) = window[f.u]
        (vlo, vhi) = window[f.v]
        terms = {}
        for j in range(f.e + 1):
            # u^(e-j) * (-1)^j * C(e,j) * v^j
            eu, ev = f.e - j, j
            if ulo <= eu <= uhi and vlo <= ev <= vhi:
                c = domain.from_int((-1) ** j * math.comb(f.e, j))
                terms[(eu, ev)] = c
        return Series((f.u, f.v), ((ulo, uhi), (vlo, vhi)), terms)

    if isinstance(f, GeomInv):
        (nlo, nhi) = window[f.num]
        (dlo, dhi) = window[f.den]
        terms = {}
        if f.n == 0:
            if nlo <= 0 <= nhi and dlo <= 0 <= dhi:
                terms[(0, 0)] = domain.one
        else:
            jmax = min(nhi, -dlo)
            for j in range(max(nlo, 0, -dhi), jmax + 1):
                terms[(j, -j)] = domain.binom_int(f.n - 1 + j, j)
        return Series((f.num, f.den), ((nlo, nhi), (dlo, dhi)), terms)

    raise TypeError(f"not a factor: {f!r}")
