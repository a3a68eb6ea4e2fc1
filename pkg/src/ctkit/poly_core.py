"""Exact univariate polynomial arithmetic over the rationals.

Everything downstream (series coefficients, residual polynomials,
interpolation) is built on the two types here: `Rat`, an exact rational
scalar (`fractions.Fraction`), and `RatPoly`, a dense univariate polynomial
in the formal parameter ``t`` with `Rat` coefficients stored
lowest-degree-first.  No floating point is used anywhere.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence, Union

Rat = Fraction

RatLike = Union[int, Fraction]

NEG_INF = float("-inf")  # degree of the zero polynomial


def _as_rat(x: RatLike) -> Rat:
    if isinstance(x, Fraction):
        return x
    return Fraction(x)


class RatPoly:
    """Polynomial in t with exact rational coefficients.

    Coefficients are indexed by power of t (index 0 = constant term) and
    trailing zeros are trimmed on construction:

    >>> RatPoly([1, 2, 0])
    RatPoly([1, 2])
    >>> RatPoly([]).degree
    -inf
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[RatLike] = ()):
        cs = [_as_rat(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Rat, ...] = tuple(cs)

    # -- constructors -------------------------------------------------

    @classmethod
    def const(cls, c: RatLike) -> "RatPoly":
        return cls([c])

    @classmethod
    def x(cls) -> "RatPoly":
        """The monomial t."""
        return cls([0, 1])

    # -- basic queries ------------------------------------------------

    @property
    def degree(self):
        """Highest nonzero power, or -inf for the zero polynomial."""
        return len(self.coeffs) - 1 if self.coeffs else NEG_INF

    def is_zero(self) -> bool:
        return not self.coeffs

    def leading(self) -> Rat:
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def __getitem__(self, k: int) -> Rat:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return Fraction(0)

    def __iter__(self):
        # without this, iteration would probe __getitem__ forever
        return iter(self.coeffs)

    def __call__(self, t: RatLike) -> Rat:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc

    # -- ring operations ----------------------------------------------

    def __add__(self, other) -> "RatPoly":
        other = _coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return RatPoly([self[i] + other[i] for i in range(n)])

    __radd__ = __add__

    def __neg__(self) -> "RatPoly":
        return RatPoly([-c for c in self.coeffs])

    def __sub__(self, other) -> "RatPoly":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "RatPoly":
        return _coerce(other) + (-self)

    def __mul__(self, other) -> "RatPoly":
        other = _coerce(other)
        if not self.coeffs or not other.coeffs:
            return RatPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return RatPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "RatPoly":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = RatPoly([1])
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = RatPoly([other])
        if not isinstance(other, RatPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __repr__(self) -> str:
        return f"RatPoly([{', '.join(str(c) for c in self.coeffs)}])"

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            if k == 0:
                term = str(c)
            else:
                mag = "" if abs(c) == 1 else f"{abs(c)}*"
                sign = "-" if c < 0 else ""
                var = "t" if k == 1 else f"t^{k}"
                term = f"{sign}{mag}{var}"
                if parts and c > 0:
                    term = term
            parts.append(term)
        out = parts[0]
        for term in parts[1:]:
            out += " + " + term if not term.startswith("-") else " - " + term[1:]
        return out


def _coerce(x) -> RatPoly:
    if isinstance(x, RatPoly):
        return x
    if isinstance(x, (int, Fraction)):
        return RatPoly([x])
    raise TypeError(f"cannot coerce {type(x).__name__} to RatPoly")


ZERO = RatPoly()
ONE = RatPoly([1])


def binom_rat(z: RatLike, k: int) -> Rat:
    """Generalized binomial coefficient C(z, k) = z(z-1)...(z-k+1)/k!.

    >>> binom_rat(5, 2)
    Fraction(10, 1)
    >>> binom_rat(-3, 2)
    Fraction(6, 1)
    >>> binom_rat(Fraction(1, 2), 2)
    Fraction(-1, 8)
    """
    if k < 0:
        raise ValueError("binom_rat: k must be >= 0")
    z = _as_rat(z)
    num = Fraction(1)
    for j in range(k):
        num *= z - j
    return num / math.factorial(k)


def binom_poly(a: int, b: RatLike, k: int) -> RatPoly:
    """C(a*t + b, k) as a polynomial in t.

    ``b`` may be any exact rational (half-integer offsets occur in some
    right-hand sides).  Degree is k when a != 0.

    >>> binom_poly(1, 0, 2)
    RatPoly([0, -1/2, 1/2])
    >>> binom_poly(-2, 4, 1)
    RatPoly([4, -2])
    """
    if k < 0:
        raise ValueError("binom_poly: k must be >= 0")
    lin_base = RatPoly([_as_rat(b), a])
    prod = ONE
    for j in range(k):
        prod = prod * (lin_base - j)
    return prod * Fraction(1, math.factorial(k))


def poly_divide(f: RatPoly, g: RatPoly) -> tuple[RatPoly, RatPoly]:
    """Exact quotient and remainder: f = q*g + r with deg r < deg g."""
    if g.is_zero():
        raise ZeroDivisionError("poly_divide: division by the zero polynomial")
    r = list(f.coeffs)
    dg = len(g.coeffs) - 1
    lead = g.coeffs[-1]
    q = [Fraction(0)] * max(len(r) - dg, 0)
    for i in range(len(r) - dg - 1, -1, -1):
        c = r[i + dg] / lead
        if c:
            q[i] = c
            for j, gc in enumerate(g.coeffs):
                r[i + j] -= c * gc
    return RatPoly(q), RatPoly(r[:dg])


def poly_gcd(f: RatPoly, g: RatPoly) -> RatPoly:
    """Monic gcd over the rationals; error when both inputs are zero."""
    if f.is_zero() and g.is_zero():
        raise ValueError("poly_gcd: gcd(0, 0) is undefined")
    a, b = f, g
    while not b.is_zero():
        a, b = b, poly_divide(a, b)[1]
    return a * (1 / a.leading())


def interpolate(nodes: Sequence[tuple[RatLike, RatLike]]) -> RatPoly:
    """Unique polynomial of degree < len(nodes) through the given points.

    Newton divided differences, exact.  Duplicate abscissae are rejected
    with the colliding pair named, since interpolation is only well posed
    when the nodes are distinct.
    """
    xs = [_as_rat(x) for x, _ in nodes]
    ys = [_as_rat(y) for _, y in nodes]
    seen: dict[Rat, int] = {}
    for idx, x in enumerate(xs):
        if x in seen:
            raise ValueError(
                f"interpolate: duplicate abscissa {x} at node positions "
                f"{seen[x]} and {idx}"
            )
        seen[x] = idx
    if not nodes:
        return ZERO
    # divided-difference table, consumed in place
    dd = list(ys)
    for level in range(1, len(xs)):
        for i in range(len(xs) - 1, level - 1, -1):
            dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - level])
    poly = ZERO
    basis = ONE
    for i, c in enumerate(dd):
        poly = poly + basis * c
        if i < len(xs) - 1:
            basis = basis * RatPoly([-xs[i], 1])
    return poly


def primitive_normalize(f: RatPoly) -> tuple[RatPoly, Rat]:
    """Split f into (primitive, scale) with f = scale * primitive.

    ``primitive`` has integer coefficients with gcd 1 and a positive leading
    coefficient; the zero polynomial is rejected.
    """
    if f.is_zero():
        raise ValueError("primitive_normalize: zero polynomial")
    den_lcm = 1
    for c in f.coeffs:
        den_lcm = den_lcm * c.denominator // math.gcd(den_lcm, c.denominator)
    ints = [int(c * den_lcm) for c in f.coeffs]
    g = 0
    for v in ints:
        g = math.gcd(g, v)
    if ints[-1] < 0:
        g = -g
    prim = RatPoly([v // g for v in ints])
    return prim, Fraction(g, den_lcm)
