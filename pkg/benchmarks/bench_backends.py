"""Compare the compiled multiply kernel against the pure-Python fallback.

Times the full verification pipeline on a few representative cells under
each backend and reports the speedup.  Run from the repository root:

    python3 benchmarks/bench_backends.py [--repeat N]
"""

import argparse
import time

from ctkit import backend
from ctkit.ct_engine import constant_term
from ctkit.identity_suite import build_case

CASES = [
    ("H_pm (2,2) interpolated/int", "H_pm", 2, 2, "int"),
    ("Htilde_pm (2,2) interpolated/int", "Htilde_pm", 2, 2, "int"),
    ("Htilde_pm (2,2) interpolated/modp", "Htilde_pm", 2, 2, "modp"),
    ("A4 (p=2) delta pipeline", "A4", 2, 2, "int"),
    ("F_pm (3,1) interpolated/int", "F_pm", 3, 1, "int"),
]


def _time(expr, arithmetic, repeat):
    best = float("inf")
    value = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        value = constant_term(expr, "interpolated", arithmetic=arithmetic).value
        best = min(best, time.perf_counter() - t0)
    return best, value


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    try:
        backend.set_backend("c")
        have_c = True
    except ImportError:
        have_c = False
        print("compiled kernel not built; timing pure backend only\n")
    backend.set_backend(None)

    width = max(len(label) for label, *_ in CASES)
    header = f"{'case':<{width}}  {'python':>9}"
    if have_c:
        header += f"  {'compiled':>9}  {'speedup':>8}"
    print(header)
    print("-" * len(header))

    for label, id, m, p, arithmetic in CASES:
        expr = build_case(id, m, p).lhs[0]
        backend.set_backend("py")
        t_py, v_py = _time(expr, arithmetic, args.repeat)
        line = f"{label:<{width}}  {t_py:>8.3f}s"
        if have_c:
            backend.set_backend("c")
            t_c, v_c = _time(expr, arithmetic, args.repeat)
            if v_py != v_c:
                raise SystemExit(f"backend mismatch on {label}!")
            line += f"  {t_c:>8.3f}s  {t_py / t_c:>7.1f}x"
        print(line)
    backend.set_backend(None)


if __name__ == "__main__":
    main()
