"""Pure-Python windowed sparse multiply (reference kernel).

Same contract as the compiled kernel in _speedups.pyx; see backend.py.
Correctness reference: the compiled kernel must agree with this one on
every input (property-tested).
"""

from __future__ import annotations


def mul(aterms, bterms, nvars, lo, hi, tlo, thi, mod=0):
    if not aterms or not bterms:
        return {}
    if len(bterms) > len(aterms):
        aterms, bterms = bterms, aterms
    bitems = [(kb, sum(kb), cb) for kb, cb in bterms.items()]
    out: dict = {}
    rng = range(nvars)
    for ka, ca in aterms.items():
        ta = sum(ka)
        for kb, tb, cb in bitems:
            t = ta + tb
            if t < tlo or t > thi:
                continue
            key = tuple(x + y for x, y in zip(ka, kb))
            ok = True
            for i in rng:
                e = key[i]
                if e < lo[i] or e > hi[i]:
                    ok = False
                    break
            if not ok:
                continue
            prod = ca * cb
            prev = out.get(key)
            out[key] = prod if prev is None else prev + prod
    if mod:
        return {k: v % mod for k, v in out.items() if v % mod}
    return {k: v for k, v in out.items() if v}
