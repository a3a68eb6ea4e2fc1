"""Iterated-residue engine: turns a CTExpression into a polynomial in t.

The pipeline is:

1. `propagate_bounds` -- interval fixpoint that assigns every factor a
   finite per-variable exponent contribution, from which all truncation
   windows and the t-degree bound are derived.  This is the correctness
   linchpin: truncation is lossless exactly because any monomial reaching
   the target coefficient must decompose into per-factor contributions
   inside these intervals.
2. Variable-major elimination: for each variable (innermost first) multiply
   in the not-yet-consumed factors that touch it, then extract the residue
   coefficient (or apply the formal-delta reduction), dropping the variable.
3. Mode selection: `exact` runs the elimination once with RatPoly
   coefficients; `interpolated` evaluates at t = 0..D with exact integer
   coefficients (optionally modulo primes with CRT reconstruction) and
   interpolates, re-checking the degree bound at t = D+1.

A dense brute-force oracle (`dense_oracle`) provides an independent
verification path and shares no arithmetic with the sparse engine.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .backend import get_backend
from .laurent import (
    DeltaDeriv,
    Diff,
    Domain,
    EvalDomain,
    Factor,
    GeomInv,
    ModDomain,
    Monomial,
    OnePlus,
    PolyDomain,
    PolyFactor,
    Series,
    Var,
    expand_factor,
    factor_vars,
    series_mul,
)
from .poly_core import RatPoly, interpolate

INF = float("inf")


class CTError(Exception):
    pass


class UnboundedWindowError(CTError):
    """A variable's truncation window could not be made finite."""


class DegreeBoundError(CTError):
    """The interpolated polynomial failed the re-check at t = bound + 1."""


class OracleCapError(CTError):
    """dense_oracle instance too large; use the main path."""


# ---------------------------------------------------------------------------
# expression


@dataclass(frozen=True)
class CTExpression:
    """A factor-list description of one iterated-residue computation.

    ``residue_exponents[v]`` is the exponent whose coefficient is extracted
    for v (the standard residue is -1).  ``prefactor`` is an exact scalar
    carried out front (signs produced by normalizing negative powers).
    ``elim_order`` lists variables innermost-first; by default the reverse
    of ``vars``, which keeps the variable that dominates the negative
    exponent supply (conventionally the first) alive until the end.
    """

    vars: tuple[Var, ...]
    factors: tuple[Factor, ...]
    residue_exponents: Mapping[Var, int]
    elim_order: tuple[Var, ...] = ()
    prefactor: Fraction = Fraction(1)

    def __post_init__(self):
        if not self.elim_order:
            object.__setattr__(self, "elim_order", tuple(reversed(self.vars)))
        object.__setattr__(self, "residue_exponents", dict(self.residue_exponents))
        object.__setattr__(self, "prefactor", Fraction(self.prefactor))
        if sorted(self.elim_order) != sorted(self.vars):
            raise ValueError("elim_order must be a permutation of vars")
        if set(self.residue_exponents) != set(self.vars):
            raise ValueError("residue_exponents must cover exactly vars")
        deltas = [f for f in self.factors if isinstance(f, DeltaDeriv)]
        if len(deltas) > 1:
            raise ValueError("at most one DeltaDeriv per expression")
        for f in self.factors:
            for v in factor_vars(f):
                if v not in self.vars:
                    raise ValueError(f"factor {f!r} uses unknown variable {v!r}")
        if deltas:
            d = deltas[0]
            order = list(self.elim_order)
            if order.index(d.v) > order.index(d.w):
                raise ValueError(
                    f"delta variable {d.v!r} must be eliminated before {d.w!r}"
                )

    @property
    def t_degree_bound(self) -> int:
        return propagate_bounds(self).t_degree_bound


@dataclass
class CTResult:
    value: RatPoly
    mode: str
    stats: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# bound propagation


@dataclass
class Bounds:
    """Finite per-factor contribution intervals plus derived windows."""

    factor_ivs: tuple[dict[Var, tuple[int, int]], ...]
    factor_degs: tuple[tuple[int, int], ...]
    var_hull: dict[Var, tuple[int, int]]
    t_degree_bound: int
    feasible: bool


def _refine_sum(intervals: list[list], target: int) -> bool:
    """Tighten each interval against: sum of all = target.  Returns changed."""
    los = [iv[0] for iv in intervals]
    his = [iv[1] for iv in intervals]
    fin_lo = sum(x for x in los if x != -INF)
    n_ilo = sum(1 for x in los if x == -INF)
    fin_hi = sum(x for x in his if x != INF)
    n_ihi = sum(1 for x in his if x == INF)
    changed = False
    for iv in intervals:
        lo, hi = iv
        others_lo = -INF if n_ilo - (lo == -INF) > 0 else fin_lo - (lo if lo != -INF else 0)
        others_hi = INF if n_ihi - (hi == INF) > 0 else fin_hi - (hi if hi != INF else 0)
        new_hi = target - others_lo
        new_lo = target - others_hi
        if new_lo > lo:
            iv[0] = new_lo
            changed = True
        if new_hi < hi:
            iv[1] = new_hi
            changed = True
    return changed


def _initial_iv(f: Factor) -> dict[Var, list]:
    if isinstance(f, Monomial):
        return {f.var: [f.e, f.e]}
    if isinstance(f, OnePlus):
        if f.a == 0 and f.b >= 0:
            return {f.var: [0, f.b]}
        return {f.var: [0, INF]}
    if isinstance(f, PolyFactor):
        lo = next(i for i, c in enumerate(f.coeffs) if c)
        return {f.var: [lo, len(f.coeffs) - 1]}
    if isinstance(f, Diff):
        return {f.u: [0, f.e], f.v: [0, f.e]}
    if isinstance(f, GeomInv):
        return {f.num: [0, INF], f.den: [-INF, 0]}
    if isinstance(f, DeltaDeriv):
        return {f.w: [-INF, INF], f.v: [-INF, INF]}
    raise TypeError(f"not a factor: {f!r}")


def _fixed_degree(f: Factor):
    """Total-degree contribution when it does not depend on the expansion."""
    if isinstance(f, Monomial):
        return f.e
    if isinstance(f, Diff):
        return f.e
    if isinstance(f, GeomInv):
        return 0
    if isinstance(f, DeltaDeriv):
        return -f.k - 1
    return None  # OnePlus / PolyFactor: degree = own exponent interval


def propagate_bounds(expr: CTExpression) -> Bounds:
    """Interval-constraint fixpoint; see module docstring.

    Raises UnboundedWindowError (naming a variable) when some window cannot
    be made finite; returns feasible=False when constraints are empty
    (the target coefficient is identically zero).
    """
    factors = expr.factors
    tau = expr.residue_exponents
    ivs = [_initial_iv(f) for f in factors]
    # degree interval per factor: fixed ones are pinned, free ones alias the
    # factor's own variable interval (OnePlus / PolyFactor are univariate)
    deg_total_target = sum(tau.values())

    var_touch: dict[Var, list[int]] = {v: [] for v in expr.vars}
    for i, f in enumerate(factors):
        for v in factor_vars(f):
            var_touch[v].append(i)

    def couple(i) -> bool:
        f = factors[i]
        iv = ivs[i]
        if isinstance(f, Diff):
            pair = [iv[f.u], iv[f.v]]
            return _refine_sum(pair, f.e)
        if isinstance(f, GeomInv):
            pair = [iv[f.num], iv[f.den]]
            return _refine_sum(pair, 0)
        if isinstance(f, DeltaDeriv):
            pair = [iv[f.w], iv[f.v]]
            return _refine_sum(pair, -f.k - 1)
        return False

    feasible = True
    for _round in range(10_000):
        changed = False
        for v in expr.vars:
            group = [ivs[i][v] for i in var_touch[v]]
            if group:
                changed |= _refine_sum(group, tau[v])
            elif tau[v] != 0:
                feasible = False
        for i in range(len(factors)):
            changed |= couple(i)
        # total-degree constraint across free factors
        free = []
        fixed_sum = 0
        for i, f in enumerate(factors):
            d = _fixed_degree(f)
            if d is None:
                free.append(ivs[i][factor_vars(f)[0]])
            else:
                fixed_sum += d
        if free:
            changed |= _refine_sum(free, deg_total_target - fixed_sum)
        elif deg_total_target != fixed_sum:
            feasible = False
        for iv in ivs:
            for lo_hi in iv.values():
                if lo_hi[0] > lo_hi[1]:
                    feasible = False
        if not feasible:
            break
        if not changed:
            break
    else:  # pragma: no cover - defensive
        raise CTError("bound propagation failed to reach a fixpoint")

    if feasible:
        for i, iv in enumerate(ivs):
            for v, (lo, hi) in iv.items():
                if lo == -INF or hi == INF:
                    raise UnboundedWindowError(
                        f"window for variable {v!r} is unbounded "
                        f"(factor {factors[i]!r}); ill-posed expression or "
                        "wrong dominance choice"
                    )

    factor_ivs = tuple(
        {v: (int(lo), int(hi)) for v, (lo, hi) in iv.items()} for iv in ivs
    )
    factor_degs = []
    for i, f in enumerate(factors):
        d = _fixed_degree(f)
        if d is None:
            factor_degs.append(factor_ivs[i][factor_vars(f)[0]] if feasible else (0, 0))
        else:
            factor_degs.append((d, d))
    factor_degs = tuple(factor_degs)

    # reported per-variable windows: exponents that can occur in the full
    # product (the engine's internal prefix windows are tighter still)
    if feasible:
        var_hull = {
            v: (
                sum(factor_ivs[i][v][0] for i in var_touch[v]),
                sum(factor_ivs[i][v][1] for i in var_touch[v]),
            )
            for v in expr.vars
        }
    else:
        var_hull = {v: (tau[v], tau[v]) for v in expr.vars}

    # joint t-degree bound: OnePlus(a != 0) exponents sum to the free budget
    t_bound = 0
    if feasible:
        free_budget = deg_total_target
        cap = 0
        has_t = False
        for i, f in enumerate(factors):
            d = _fixed_degree(f)
            if d is not None:
                free_budget -= d
            elif isinstance(f, OnePlus) and f.a != 0:
                has_t = True
                cap += factor_ivs[i][f.var][1]
            else:
                free_budget -= factor_ivs[i][factor_vars(f)[0]][0]
        t_bound = min(free_budget, cap) if has_t else 0
        if t_bound < 0:
            feasible = False
            t_bound = 0

    return Bounds(factor_ivs, factor_degs, var_hull, int(t_bound), feasible)


# ---------------------------------------------------------------------------
# delta reduction


def delta_reduce(s: Series, f: DeltaDeriv, domain: Domain | None = None,
                 w_window: tuple[int, int] | None = None) -> Series:
    """Res_v [ s * (1/k!) d_w^k (v^{-1} delta(w/v)) ].

    Each term c*v^e of s maps to c * C(e, k) * w^(e-k), with the falling
    factorial handling negative e; exponents re-attach to w.  v leaves the
    variable set.
    """
    vi = s.var_index(f.v)
    wi = s.var_index(f.w)
    k = f.k
    nvars = s.vars[:vi] + s.vars[vi + 1 :]
    nwin = list(s.window[:vi] + s.window[vi + 1 :])
    wj = nvars.index(f.w)
    if w_window is not None:
        nwin[wj] = w_window
    wlo, whi = nwin[wj]
    out: dict = {}
    for key, c in s.terms.items():
        e = key[vi]
        coef = _falling_binom(e, k, domain)
        if not coef:
            continue
        nk = list(key[:vi] + key[vi + 1 :])
        nk[wj] += e - k
        if not wlo <= nk[wj] <= whi:
            continue
        nk = tuple(nk)
        add = c * coef
        prev = out.get(nk)
        val = add if prev is None else prev + add
        if val:
            out[nk] = val
        elif prev is not None:
            del out[nk]
    return Series(nvars, tuple(nwin), out)


def _falling_binom(e: int, k: int, domain: Domain | None):
    """C(e, k) = e(e-1)...(e-k+1)/k! for any integer e, in the domain."""
    num = 1
    for j in range(k):
        num *= e - j
    val = num // math.factorial(k)  # always exact for integer e
    if domain is None:
        return val
    return domain.from_int(val)


# ---------------------------------------------------------------------------
# elimination core


def _eliminate(expr: CTExpression, bounds: Bounds, domain: Domain, stats: dict | None = None):
    """Run the full elimination; returns a scalar in the domain
    (prefactor NOT applied)."""
    factors = expr.factors
    tau = expr.residue_exponents
    ivs = bounds.factor_ivs
    degs = bounds.factor_degs

    var_touch: dict[Var, list[int]] = {v: [] for v in expr.vars}
    for i, f in enumerate(factors):
        for v in factor_vars(f):
            var_touch[v].append(i)

    rem_lo = {v: sum(ivs[i][v][0] for i in var_touch[v]) for v in expr.vars}
    rem_hi = {v: sum(ivs[i][v][1] for i in var_touch[v]) for v in expr.vars}
    rem_dlo = sum(d[0] for d in degs)
    rem_dhi = sum(d[1] for d in degs)
    target_rem = sum(tau.values())

    acc = Series.scalar(domain.one)
    active: list[Var] = []
    consumed = [False] * len(factors)
    max_terms = 0

    def consume_bookkeeping(i: int):
        nonlocal rem_dlo, rem_dhi
        for u, (lo, hi) in ivs[i].items():
            rem_lo[u] -= lo
            rem_hi[u] -= hi
        rem_dlo -= degs[i][0]
        rem_dhi -= degs[i][1]

    def current_window(vs: Sequence[Var]):
        return tuple((tau[u] - rem_hi[u], tau[u] - rem_lo[u]) for u in vs)

    for v in expr.elim_order:
        batch = [i for i in var_touch[v] if not consumed[i]]
        delta_i = next(
            (i for i in batch if isinstance(factors[i], DeltaDeriv)), None
        )
        plain = [i for i in batch if i != delta_i]
        # smaller expansions first keeps intermediate products lean
        plain.sort(key=lambda i: _expansion_size(factors[i], ivs[i]))
        for i in plain:
            consumed[i] = True
            consume_bookkeeping(i)
            f = factors[i]
            fs = expand_factor(f, ivs[i], domain)
            new_active = active + [u for u in factor_vars(f) if u not in active]
            window = current_window(new_active)
            # inputs are aligned with a hull that always contains 0 so the
            # embedding never rejects; the product itself is pruned to the
            # tight target window
            hull = tuple((min(lo, 0), max(hi, 0)) for lo, hi in window)
            total = (target_rem - rem_dhi, target_rem - rem_dlo)
            a = acc.aligned(tuple(new_active), hull)
            b = fs.aligned(tuple(new_active), hull)
            acc = series_mul(a, b, window, total, domain)
            active = new_active
            if len(acc.terms) > max_terms:
                max_terms = len(acc.terms)
        if delta_i is not None:
            f = factors[delta_i]
            if f.v != v:
                raise CTError(
                    f"DeltaDeriv must be consumed at its residue variable {f.v!r}"
                )
            if tau[v] != -1:
                raise CTError("DeltaDeriv elimination requires residue exponent -1")
            consumed[delta_i] = True
            consume_bookkeeping(delta_i)
            if v not in active:
                # nothing else touches v, so every term has v-exponent 0
                acc = acc.aligned(tuple(active) + (v,), current_window(active) + ((0, 0),))
                active = active + [v]
            if f.w not in active:
                acc = acc.aligned(tuple(active) + (f.w,), current_window(active) + ((0, 0),))
                active = active + [f.w]
            w_win = (tau[f.w] - rem_hi[f.w], tau[f.w] - rem_lo[f.w])
            acc = delta_reduce(acc, f, domain, w_win)
            active = [u for u in active if u != v]
        elif v in active:
            acc = acc.coeff_series(v, tau[v])
            active = [u for u in active if u != v]
        else:
            if tau[v] != 0:
                return domain.zero
        target_rem -= tau[v]
        if not acc.terms:
            break

    if stats is not None:
        stats["max_terms"] = max(stats.get("max_terms", 0), max_terms)
    val = acc.terms.get((), None)
    return val if val is not None else domain.zero


def _expansion_size(f: Factor, iv: Mapping[Var, tuple[int, int]]) -> int:
    if isinstance(f, Monomial):
        return 1
    if isinstance(f, PolyFactor):
        return len(f.coeffs)
    if isinstance(f, (OnePlus,)):
        lo, hi = iv[f.var]
        return hi - max(lo, 0) + 1
    if isinstance(f, Diff):
        return f.e + 1
    if isinstance(f, GeomInv):
        lo, hi = iv[f.num]
        return hi - max(lo, 0) + 1
    return 10**9  # delta: handled separately


# ---------------------------------------------------------------------------
# CRT helpers (mod-prime acceleration of interpolated mode)


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _gen_primes(count: int, below: int = 1 << 30) -> list[int]:
    out = []
    n = below - 1
    while len(out) < count:
        if _is_prime(n):
            out.append(n)
        n -= 2
    return out


CRT_PRIMES = _gen_primes(80)


def _crt_symmetric(residues: Sequence[int], primes: Sequence[int]) -> int:
    x, m = 0, 1
    for r, p in zip(residues, primes):
        # solve x' == x (mod m), x' == r (mod p)
        inv = pow(m % p, p - 2, p)
        k = (r - x) % p * inv % p
        x += m * k
        m *= p
    if x > m // 2:
        x -= m
    return x


# ---------------------------------------------------------------------------
# public entry points


def _sample_exact(args):
    expr, bounds, t = args
    dom = EvalDomain(t)
    return t, _eliminate(expr, bounds, dom)


def _sample_mod(args):
    expr, bounds, t, n_primes = args
    # reconstruct with a growing prime set until two consecutive
    # reconstructions agree (the last prime acts as a guard)
    residues: list[int] = []
    prev = None
    for i, p in enumerate(CRT_PRIMES):
        residues.append(_eliminate(expr, bounds, ModDomain(t, p)))
        if i + 1 >= n_primes:
            val = _crt_symmetric(residues, CRT_PRIMES[: i + 1])
            if prev is not None and val == prev:
                return t, val
            prev = val
    raise CTError("CRT reconstruction did not stabilize; value too large")


def constant_term(
    expr: CTExpression,
    mode: str = "interpolated",
    jobs: int = 1,
    arithmetic: str = "int",
) -> CTResult:
    """Evaluate the expression as an exact polynomial in t.

    mode:
        "exact"        -- one elimination with RatPoly coefficients.
        "interpolated" -- eliminations at t = 0..D with scalar coefficients,
                          Lagrange interpolation, and a re-check at D+1.
    arithmetic (interpolated mode only):
        "int"  -- exact integer coefficients,
        "modp" -- CRT over word-size primes with a guard-prime stability
                  check (transparent acceleration; result is still exact).
    """
    t0 = time.perf_counter()
    bounds = propagate_bounds(expr)
    stats: dict = {
        "backend": get_backend().name,
        "feasible": bounds.feasible,
        "t_degree_bound": bounds.t_degree_bound,
        "arithmetic": arithmetic if mode == "interpolated" else "rational",
    }
    if not bounds.feasible:
        stats["wall_time_s"] = time.perf_counter() - t0
        return CTResult(RatPoly(), mode, stats)

    if mode == "exact":
        val = _eliminate(expr, bounds, PolyDomain(), stats)
        poly = val * expr.prefactor if isinstance(val, RatPoly) else RatPoly([val]) * expr.prefactor
        stats["wall_time_s"] = time.perf_counter() - t0
        return CTResult(poly, mode, stats)

    if mode != "interpolated":
        raise ValueError(f"unknown mode {mode!r}")

    D = bounds.t_degree_bound
    ts = list(range(D + 2))  # includes the re-check point D+1
    if arithmetic == "int":
        work = [(expr, bounds, t) for t in ts]
        fn = _sample_exact
    elif arithmetic == "modp":
        work = [(expr, bounds, t, 2) for t in ts]
        fn = _sample_mod
    else:
        raise ValueError(f"unknown arithmetic {arithmetic!r}")

    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            samples = dict(pool.map(fn, work))
    else:
        samples = dict(map(fn, work))

    pref = expr.prefactor
    nodes = [(t, samples[t] * pref) for t in ts[:-1]]
    poly = interpolate(nodes)
    check_t = ts[-1]
    if poly(check_t) != samples[check_t] * pref:
        raise DegreeBoundError(
            f"degree bound violated: interpolant of degree <= {D} does not "
            f"reproduce the sample at t = {check_t}"
        )
    stats["t_samples"] = len(ts)
    stats["wall_time_s"] = time.perf_counter() - t0
    return CTResult(poly, mode, stats)


# ---------------------------------------------------------------------------
# dense oracle (independent verification path)


def dense_oracle(expr: CTExpression, t_value, cap: int = 4_000_000) -> Fraction:
    """Brute-force the constant term at one rational t.

    The running state is a flat dense array over the full window box (one
    cell per exponent vector, zeros stored explicitly); factors are consumed
    in declaration order with plain nested loops.  No sparse maps, no shared
    series arithmetic with the main engine -- this is the independent
    verification path, and it errors out (advising the main path) when the
    box exceeds ``cap`` cells.
    """
    t = t_value if isinstance(t_value, int) else Fraction(t_value)
    bounds = propagate_bounds(expr)
    if not bounds.feasible:
        return Fraction(0)
    tau = expr.residue_exponents
    factors = expr.factors
    ivs = bounds.factor_ivs
    vs = list(expr.vars)
    idx = {v: i for i, v in enumerate(vs)}

    var_touch: dict[Var, list[int]] = {v: [] for v in vs}
    for i, f in enumerate(factors):
        for u in factor_vars(f):
            var_touch[u].append(i)
    rem_lo = {v: sum(ivs[i][v][0] for i in var_touch[v]) for v in vs}
    rem_hi = {v: sum(ivs[i][v][1] for i in var_touch[v]) for v in vs}

    def window_now():
        return [(tau[v] - rem_hi[v], tau[v] - rem_lo[v]) for v in vs]

    def make_box(win):
        strides, size = [], 1
        for lo, hi in reversed(win):
            strides.append(size)
            size *= hi - lo + 1
        strides.reverse()
        if size > cap:
            raise OracleCapError(
                f"dense oracle: window box of {size} cells exceeds cap {cap}; "
                "use the main path"
            )
        return strides, size

    def encode(exps, win, strides):
        pos = 0
        for e, (lo, hi), s in zip(exps, win, strides):
            if not lo <= e <= hi:
                return -1
            pos += (e - lo) * s
        return pos

    def factor_table(i, f):
        """(vars, list of (exponent tuple, Fraction)) for one factor."""
        if isinstance(f, Monomial):
            return (f.var,), [((f.e,), Fraction(1))]
        if isinstance(f, PolyFactor):
            return (f.var,), [((e,), Fraction(c)) for e, c in enumerate(f.coeffs)]
        if isinstance(f, OnePlus):
            lo, hi = ivs[i][f.var]
            z = f.a * t + f.b
            rows, c = [], Fraction(1)
            for k in range(0, hi + 1):
                if k:
                    c = c * (z - (k - 1)) / k
                if k >= lo:
                    rows.append(((k,), c))
            return (f.var,), rows
        if isinstance(f, Diff):
            rows = [
                ((f.e - j, j), Fraction((-1) ** j * math.comb(f.e, j)))
                for j in range(f.e + 1)
            ]
            return (f.u, f.v), rows
        if isinstance(f, GeomInv):
            nlo, nhi = ivs[i][f.num]
            dlo, dhi = ivs[i][f.den]
            rows = []
            for j in range(max(0, nlo, -dhi), min(nhi, -dlo) + 1):
                c = Fraction(1)
                for r in range(j):
                    c = c * (f.n + r) / (r + 1)
                rows.append(((j, -j), c))
            return (f.num, f.den), rows
        raise TypeError(f)

    win = window_now()
    strides, size = make_box(win)
    data = [Fraction(0)] * size
    start = encode([0] * len(vs), win, strides)
    if start < 0:
        return Fraction(0)
    data[start] = Fraction(1)

    delta = None
    for i, f in enumerate(factors):
        if isinstance(f, DeltaDeriv):
            delta = (i, f)
            continue
        for u, (lo, hi) in ivs[i].items():
            rem_lo[u] -= lo
            rem_hi[u] -= hi
        fvars, table = factor_table(i, f)
        positions = [idx[u] for u in fvars]
        nwin = window_now()
        nstrides, nsize = make_box(nwin)
        ndata = [Fraction(0)] * nsize
        # walk every cell of the old box
        exps = [lo for lo, _ in win]
        for pos in range(len(data)):
            c = data[pos]
            if c:
                for fkey, fc in table:
                    nk = list(exps)
                    for p, e in zip(positions, fkey):
                        nk[p] += e
                    npos = encode(nk, nwin, nstrides)
                    if npos >= 0:
                        ndata[npos] += c * fc
            # advance mixed-radix exponent counter
            for d in range(len(vs) - 1, -1, -1):
                exps[d] += 1
                if exps[d] <= win[d][1]:
                    break
                exps[d] = win[d][0]
        data, win, strides = ndata, nwin, nstrides

    if delta is not None:
        i, f = delta
        for u, (lo, hi) in ivs[i].items():
            rem_lo[u] -= lo
            rem_hi[u] -= hi
        vi, wi = idx[f.v], idx[f.w]
        nwin = window_now()
        nwin[vi] = (tau[f.v], tau[f.v])  # residue slot consumed by the delta
        nstrides, nsize = make_box(nwin)
        ndata = [Fraction(0)] * nsize
        exps = [lo for lo, _ in win]
        for pos in range(len(data)):
            c = data[pos]
            if c:
                e = exps[vi]
                num = 1
                for j in range(f.k):
                    num *= e - j
                coef = Fraction(num, math.factorial(f.k))
                if coef:
                    nk = list(exps)
                    nk[vi] = tau[f.v]
                    nk[wi] += e - f.k
                    npos = encode(nk, nwin, nstrides)
                    if npos >= 0:
                        ndata[npos] += c * coef
            for d in range(len(vs) - 1, -1, -1):
                exps[d] += 1
                if exps[d] <= win[d][1]:
                    break
                exps[d] = win[d][0]
        data, win, strides = ndata, nwin, nstrides

    target = encode([tau[v] for v in vs], win, strides)
    val = data[target] if target >= 0 else Fraction(0)
    return val * expr.prefactor
