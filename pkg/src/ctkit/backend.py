"""Kernel selection: compiled extension when available, pure Python otherwise.

The only hot operation in the package is the windowed sparse multiply; both
implementations share one calling convention:

    mul(aterms, bterms, nvars, lo, hi, tlo, thi, mod) -> dict

where ``aterms``/``bterms`` map exponent tuples to coefficients, ``lo``/``hi``
are per-variable inclusive bounds on kept exponents, ``tlo``/``thi`` bound the
total degree, and ``mod`` is 0 for exact (object) coefficients or a prime for
modular ones.  Set CTKIT_BACKEND=py or =c to force a choice.
"""

from __future__ import annotations

import os

from . import _pykernel


class _PyBackend:
    name = "python"

    @staticmethod
    def mul(aterms, bterms, nvars, lo, hi, tlo, thi, mod=0):
        return _pykernel.mul(aterms, bterms, nvars, lo, hi, tlo, thi, mod)


class _CBackend:
    name = "c"

    def __init__(self, mod_module):
        self._sp = mod_module

    def mul(self, aterms, bterms, nvars, lo, hi, tlo, thi, mod=0):
        if mod:
            out = self._sp.mul_mod(aterms, bterms, nvars, lo, hi, tlo, thi, mod)
        else:
            out = self._sp.mul_obj(aterms, bterms, nvars, lo, hi, tlo, thi)
        if out is None:  # exponent ranges too wide to pack; rare
            return _pykernel.mul(aterms, bterms, nvars, lo, hi, tlo, thi, mod)
        return out


_active = None


def _select():
    choice = os.environ.get("CTKIT_BACKEND", "auto")
    if choice not in ("auto", "c", "py"):
        raise ValueError(f"CTKIT_BACKEND must be auto, c or py, not {choice!r}")
    if choice in ("auto", "c"):
        try:
            from . import _speedups  # type: ignore[attr-defined]

            return _CBackend(_speedups)
        except ImportError:
            if choice == "c":
                raise
    return _PyBackend()


def get_backend():
    global _active
    if _active is None:
        _active = _select()
    return _active


def set_backend(name: str | None):
    """Force a backend ("c"/"py") or reset to auto-selection (None)."""
    global _active
    if name is None:
        _active = None
        return get_backend()
    if name == "py":
        _active = _PyBackend()
    elif name == "c":
        from . import _speedups  # type: ignore[attr-defined]

        _active = _CBackend(_speedups)
    else:
        raise ValueError(f"unknown backend {name!r}")
    return _active
