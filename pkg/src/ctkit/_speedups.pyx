# distutils: language = c++
# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled windowed sparse multiply.

Exponent vectors are packed into a single 64-bit key (one bit field per
variable, biased so fields stay nonnegative); adding two packed keys adds the
exponent vectors with no carries, so the inner loop is an integer add, field
range checks, and one hash update.  Two variants:

    mul_obj -- coefficients are arbitrary Python numbers (int/Fraction/...)
    mul_mod -- coefficients are C integers modulo a prime < 2^31

Both return None when the exponent ranges cannot be packed into 62 bits;
the caller then falls back to the pure-Python kernel.
"""

from cython.operator cimport dereference as deref, preincrement as inc
from libc.stdlib cimport free, malloc
from libcpp.unordered_map cimport unordered_map

ctypedef long long i64

DEF MAXV = 16


cdef struct Packing:
    int nvars
    int shift[MAXV]
    i64 mask[MAXV]
    i64 bias[MAXV]     # amin + bmin per field, added back when decoding
    i64 amin[MAXV]
    i64 bmin[MAXV]
    i64 wlo[MAXV]      # output window in field coordinates
    i64 whi[MAXV]


cdef int _build_packing(Packing* pk, list akeys, list bkeys, int nvars,
                        list lo, list hi) except -1:
    """Fill *pk; return 0 on success, 1 when packing is impossible."""
    if nvars > MAXV:
        return 1
    cdef i64 amin, amax, bmin, bmax, span, e
    cdef int i, width, shift = 0
    cdef tuple k
    pk.nvars = nvars
    for i in range(nvars):
        amin = amax = (<tuple>akeys[0])[i]
        for k in akeys:
            e = k[i]
            if e < amin: amin = e
            if e > amax: amax = e
        bmin = bmax = (<tuple>bkeys[0])[i]
        for k in bkeys:
            e = k[i]
            if e < bmin: bmin = e
            if e > bmax: bmax = e
        span = (amax + bmax) - (amin + bmin)
        width = 1
        while (<i64>1 << width) <= span:
            width += 1
        if shift + width > 62:
            return 1
        pk.shift[i] = shift
        pk.mask[i] = (<i64>1 << width) - 1
        pk.bias[i] = amin + bmin
        pk.amin[i] = amin
        pk.bmin[i] = bmin
        pk.wlo[i] = (<i64>lo[i]) - pk.bias[i]
        pk.whi[i] = (<i64>hi[i]) - pk.bias[i]
        if pk.wlo[i] < 0: pk.wlo[i] = 0
        if pk.whi[i] > span: pk.whi[i] = span
        shift += width
    return 0


def mul_obj(dict aterms, dict bterms, int nvars, list lo, list hi,
            i64 tlo, i64 thi):
    cdef list akeys, bkeys, acoeffs, bcoeffs
    cdef Packing pk
    cdef i64* apack = NULL
    cdef i64* atot = NULL
    cdef i64* bpack = NULL
    cdef i64* btot = NULL
    cdef i64 e, packed, tot, f
    cdef int i, j, ii, na, nb
    cdef tuple k
    cdef dict out_packed, out
    cdef object ca, cb, prod, prev, pykey

    if not aterms or not bterms:
        return {}
    if len(bterms) > len(aterms):
        aterms, bterms = bterms, aterms
    if nvars == 0:
        out = {}
        if tlo <= 0 <= thi:
            prod = None
            for ca in aterms.values():
                for cb in bterms.values():
                    prod = ca * cb if prod is None else prod + ca * cb
            if prod:
                out[()] = prod
        return out

    akeys = list(aterms.keys())
    bkeys = list(bterms.keys())
    acoeffs = list(aterms.values())
    bcoeffs = list(bterms.values())
    if _build_packing(&pk, akeys, bkeys, nvars, lo, hi):
        return None

    na = len(akeys)
    nb = len(bkeys)
    apack = <i64*>malloc(na * sizeof(i64))
    atot = <i64*>malloc(na * sizeof(i64))
    bpack = <i64*>malloc(nb * sizeof(i64))
    btot = <i64*>malloc(nb * sizeof(i64))
    out_packed = {}
    try:
        for j in range(na):
            k = <tuple>akeys[j]
            packed = 0
            tot = 0
            for i in range(nvars):
                e = k[i]
                tot += e
                packed |= (e - pk.amin[i]) << pk.shift[i]
            apack[j] = packed
            atot[j] = tot
        for j in range(nb):
            k = <tuple>bkeys[j]
            packed = 0
            tot = 0
            for i in range(nvars):
                e = k[i]
                tot += e
                packed |= (e - pk.bmin[i]) << pk.shift[i]
            bpack[j] = packed
            btot[j] = tot

        for j in range(na):
            ca = acoeffs[j]
            for ii in range(nb):
                tot = atot[j] + btot[ii]
                if tot < tlo or tot > thi:
                    continue
                packed = apack[j] + bpack[ii]
                for i in range(nvars):
                    f = (packed >> pk.shift[i]) & pk.mask[i]
                    if f < pk.wlo[i] or f > pk.whi[i]:
                        break
                else:
                    cb = bcoeffs[ii]
                    prod = ca * cb
                    pykey = packed
                    prev = out_packed.get(pykey)
                    if prev is None:
                        out_packed[pykey] = prod
                    else:
                        out_packed[pykey] = prev + prod

        out = {}
        for pykey, prod in out_packed.items():
            if prod:
                packed = pykey
                k = tuple(
                    ((packed >> pk.shift[i]) & pk.mask[i]) + pk.bias[i]
                    for i in range(nvars)
                )
                out[k] = prod
        return out
    finally:
        free(apack)
        free(atot)
        free(bpack)
        free(btot)


def mul_mod(dict aterms, dict bterms, int nvars, list lo, list hi,
            i64 tlo, i64 thi, i64 prime):
    cdef list akeys, bkeys
    cdef Packing pk
    cdef i64* apack = NULL
    cdef i64* atot = NULL
    cdef i64* acf = NULL
    cdef i64* bpack = NULL
    cdef i64* btot = NULL
    cdef i64* bcf = NULL
    cdef unordered_map[i64, i64] acc
    cdef unordered_map[i64, i64].iterator it
    cdef i64 e, packed, tot, f, ca, prod, accv
    cdef int i, j, ii, na, nb
    cdef tuple k
    cdef dict out
    cdef object cv

    if prime <= 1 or prime >= (<i64>1 << 31):
        raise ValueError("prime must be in (1, 2^31)")
    if not aterms or not bterms:
        return {}
    if len(bterms) > len(aterms):
        aterms, bterms = bterms, aterms
    if nvars == 0:
        out = {}
        if tlo <= 0 <= thi:
            tot = 0
            for cva in aterms.values():
                for cvb in bterms.values():
                    tot = (tot + (<i64>cva) * (<i64>cvb)) % prime
            if tot:
                out[()] = tot
        return out

    akeys = list(aterms.keys())
    bkeys = list(bterms.keys())
    if _build_packing(&pk, akeys, bkeys, nvars, lo, hi):
        return None

    na = len(akeys)
    nb = len(bkeys)
    apack = <i64*>malloc(na * sizeof(i64))
    atot = <i64*>malloc(na * sizeof(i64))
    acf = <i64*>malloc(na * sizeof(i64))
    bpack = <i64*>malloc(nb * sizeof(i64))
    btot = <i64*>malloc(nb * sizeof(i64))
    bcf = <i64*>malloc(nb * sizeof(i64))
    try:
        j = 0
        for k, cv in aterms.items():
            packed = 0
            tot = 0
            for i in range(nvars):
                e = k[i]
                tot += e
                packed |= (e - pk.amin[i]) << pk.shift[i]
            apack[j] = packed
            atot[j] = tot
            acf[j] = (<i64>cv) % prime
            j += 1
        j = 0
        for k, cv in bterms.items():
            packed = 0
            tot = 0
            for i in range(nvars):
                e = k[i]
                tot += e
                packed |= (e - pk.bmin[i]) << pk.shift[i]
            bpack[j] = packed
            btot[j] = tot
            bcf[j] = (<i64>cv) % prime
            j += 1

        acc.reserve(<size_t>(na + nb))
        for j in range(na):
            ca = acf[j]
            for ii in range(nb):
                tot = atot[j] + btot[ii]
                if tot < tlo or tot > thi:
                    continue
                packed = apack[j] + bpack[ii]
                for i in range(nvars):
                    f = (packed >> pk.shift[i]) & pk.mask[i]
                    if f < pk.wlo[i] or f > pk.whi[i]:
                        break
                else:
                    prod = ca * bcf[ii] % prime
                    accv = acc[packed] + prod
                    if accv >= prime:
                        accv -= prime
                    acc[packed] = accv

        out = {}
        it = acc.begin()
        while it != acc.end():
            accv = deref(it).second
            if accv:
                packed = deref(it).first
                k = tuple(
                    ((packed >> pk.shift[i]) & pk.mask[i]) + pk.bias[i]
                    for i in range(nvars)
                )
                out[k] = accv
            inc(it)
        return out
    finally:
        free(apack)
        free(atot)
        free(acf)
        free(bpack)
        free(btot)
        free(bcf)
