"""Batch driver: run verifications and table generation, persist reports.

Subcommands
    verify        run one identity over an (m, p) grid (or a case file)
    residual      run an identity together with its coprimality partner
    zhu-table     emit a weight table (CSV + Markdown) with its self-checks
    zhu-dims      print the dimension bookkeeping for a family
    oracle        compare the engine against the dense brute-force path
    dyson-sanity  classical product-formula check

Exit status: 0 when every requested check passed, 2 when some check was
falsified (the failing remainder is serialized in its report), 1 for
operational errors (bad arguments, unreadable files, infeasible cells).

Reports are canonical JSON (sorted keys, "num/den" rationals,
coefficient lists lowest-degree-first) and are byte-identical across
runs of the same package version: wall-clock data goes to a separate
``*.timings.json`` sidecar, never into the report itself.  Finished
reports are cached under ``~/.cache/ctkit`` (override with
``CTKIT_CACHE_DIR``); the key covers id, parameters, exponent reading,
mode and package version, so a version bump or mode change recomputes.
All files are written atomically (temp file + rename).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import tempfile
import time
from pathlib import Path

from . import __version__
from .ct_engine import CTError, constant_term, dense_oracle
from .identity_suite import (
    COPRIME_PARTNER,
    IDENTITY_IDS,
    IdentityCase,
    build_case,
    case_to_json,
    dyson_expression,
    dyson_value,
    load_case_file,
    report_to_json,
    run_case,
    run_pair,
)
from . import zhu

EXIT_OK = 0
EXIT_OPERATIONAL = 1
EXIT_FALSIFIED = 2

# user-facing mode names -> engine mode names
_MODES = {"exact": "exact", "interp": "interpolated", "both": "both"}

_CELL_ERRORS = (CTError, ValueError, OverflowError, MemoryError)


# ---------------------------------------------------------------------------
# atomic persistence


def _dump_json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _atomic_write(path: Path, text: str) -> None:
    """Write via a sibling temp file and rename, so readers never see a
    half-written artifact and an interrupted run leaves the old one intact."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=str(path.parent), prefix=path.name + ".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


# ---------------------------------------------------------------------------
# result cache


def cache_dir() -> Path:
    env = os.environ.get("CTKIT_CACHE_DIR")
    if env:
        return Path(env)
    return Path.home() / ".cache" / "ctkit"


def cache_key(id: str, m: int, p: int, exponent_variant: str | None,
              mode: str, content_digest: str | None = None) -> str:
    """Deterministic key; changes with any identifying field or version.

    content_digest is set for cases loaded from files, so an edited case
    (same id/m/p) can never collide with the built-in one.
    """
    blob = json.dumps(
        {
            "id": id,
            "m": m,
            "p": p,
            "exponent_variant": exponent_variant,
            "mode": mode,
            "version": __version__,
            "content": content_digest,
        },
        sort_keys=True,
    )
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:32]


def _case_digest(case: IdentityCase) -> str:
    doc = json.dumps(case_to_json(case), sort_keys=True)
    return hashlib.sha256(doc.encode("utf-8")).hexdigest()[:32]


def cache_load(key: str) -> dict | None:
    f = cache_dir() / f"{key}.json"
    try:
        if not f.exists():
            return None
        doc = json.loads(f.read_text(encoding="utf-8"))
    except (OSError, ValueError):
        print(f"warning: dropping corrupt cache entry {f}", file=sys.stderr)
        return None
    if not isinstance(doc, dict) or doc.get("schema") != 1 or "passed" not in doc:
        print(f"warning: dropping corrupt cache entry {f}", file=sys.stderr)
        return None
    return doc


def cache_store(key: str, doc: dict) -> None:
    try:
        _atomic_write(cache_dir() / f"{key}.json", _dump_json(doc))
    except OSError as e:
        print(f"warning: cache write failed: {e}", file=sys.stderr)


# ---------------------------------------------------------------------------
# verification cells


def _run_one(case: IdentityCase, mode: str, jobs: int, arithmetic: str) -> dict:
    """One engine run -> canonical report document.

    mode "both" runs the exact and the interpolated paths and records
    whether they agree coefficient-by-coefficient; disagreement fails the
    report (it would mean the two routes diverged, which no identity
    finding can excuse).
    """
    if mode == "both":
        exact = run_case(case, "exact", jobs, arithmetic)
        interp = run_case(case, "interpolated", jobs, arithmetic)
        agree = exact.lhs_poly == interp.lhs_poly
        doc = report_to_json(exact)
        doc["mode"] = "both"
        doc["modes_agree"] = agree
        doc["passed"] = bool(doc["passed"] and agree)
        return doc
    rep = run_case(case, mode, jobs, arithmetic)
    doc = report_to_json(rep)
    doc["modes_agree"] = None
    return doc


def _verify_cell(case: IdentityCase, mode: str, jobs: int, arithmetic: str,
                 use_cache: bool, content_digest: str | None = None):
    """Returns (doc, seconds, cache_hit)."""
    key = cache_key(case.id, case.m, case.p, case.exponent_variant, mode,
                    content_digest)
    if use_cache:
        doc = cache_load(key)
        if doc is not None:
            return doc, 0.0, True
    t0 = time.perf_counter()
    doc = _run_one(case, mode, jobs, arithmetic)
    dt = time.perf_counter() - t0
    if use_cache:
        cache_store(key, doc)
    return doc, dt, False


def _cell_name(doc_or_case) -> str:
    if isinstance(doc_or_case, dict):
        return f"{doc_or_case['id']}_m{doc_or_case['m']}_p{doc_or_case['p']}"
    c = doc_or_case
    return f"{c.id}_m{c.m}_p{c.p}"


def _write_cell(out_dir: Path, doc: dict, seconds: float, cache_hit: bool) -> None:
    name = _cell_name(doc)
    _atomic_write(out_dir / f"{name}.json", _dump_json(doc))
    sidecar = {"cell": name, "seconds": round(seconds, 6), "cache_hit": cache_hit}
    _atomic_write(out_dir / f"{name}.timings.json", _dump_json(sidecar))


def _summary_line(doc: dict) -> str:
    bits = [
        f"| {_cell_name(doc)} ",
        f"| {doc['mode']} ",
        f"| {doc['division_exact']} ",
        f"| `{doc['scale']}` ",
        f"| {'PASS' if doc['passed'] else 'FAIL'} |",
    ]
    return "".join(bits)


def _write_summary(out_dir: Path, title: str, lines: list[str],
                   errors: list[str]) -> None:
    body = [f"# {title}", "", "| cell | mode | division exact | scale | verdict |",
            "|---|---|---|---|---|"]
    body += lines
    if errors:
        body += ["", "## errors", ""]
        body += [f"- {e}" for e in errors]
    _atomic_write(out_dir / "summary.md", "\n".join(body) + "\n")


def _sweep_exit(any_falsified: bool, any_error: bool) -> int:
    if any_falsified:
        return EXIT_FALSIFIED
    if any_error:
        return EXIT_OPERATIONAL
    return EXIT_OK


def _cmd_verify(args) -> int:
    mode = _MODES[args.mode]
    out_dir = Path(args.out_dir)
    cells: list[tuple]
    if args.case_file:
        case = load_case_file(args.case_file)
        cells = [(f"{case.id}_m{case.m}_p{case.p}",
                  lambda case=case: (case, _case_digest(case)))]
    else:
        if not args.id:
            raise ValueError("verify needs --id or --case-file")
        # cell construction itself can fail (m out of range); keep it
        # inside the per-cell guard so a sweep never dies early
        cells = [(f"{args.id}_m{m}_p{p}",
                  lambda m=m, p=p: (build_case(args.id, m, p), None))
                 for m in args.m for p in args.p]

    lines, errors = [], []
    any_falsified = any_error = False
    for cell_name, make in cells:
        try:
            case, digest = make()
            doc, dt, hit = _verify_cell(case, mode, args.jobs, args.arithmetic,
                                        not args.no_cache, digest)
        except _CELL_ERRORS as e:
            any_error = True
            errors.append(f"{cell_name}: {e}")
            print(f"{cell_name}: error: {e}", file=sys.stderr)
            continue
        _write_cell(out_dir, doc, dt, hit)
        lines.append(_summary_line(doc))
        verdict = "PASS" if doc["passed"] else "FAIL"
        src = "cache" if hit else f"{dt:.2f}s"
        print(f"{_cell_name(doc)} mode={doc['mode']} "
              f"division_exact={doc['division_exact']} {verdict} ({src})")
        if not doc["passed"]:
            any_falsified = True
    _write_summary(out_dir, "verification", lines, errors)
    return _sweep_exit(any_falsified, any_error)


def _cmd_residual(args) -> int:
    mode = _MODES[args.mode]
    out_dir = Path(args.out_dir)
    pair_mode = mode + "+pair"
    lines, errors = [], []
    any_falsified = any_error = False
    for m in args.m:
        for p in args.p:
            try:
                if args.id in COPRIME_PARTNER:
                    key = cache_key(args.id, m, p, None, pair_mode)
                    docs = None
                    if not args.no_cache:
                        hit = cache_load(key)
                        if hit is not None and "reports" in hit:
                            docs, dt, cached = hit["reports"], 0.0, True
                    if docs is None:
                        t0 = time.perf_counter()
                        first, second = run_pair(args.id, m, p, mode,
                                                 args.jobs, args.arithmetic)
                        docs = [report_to_json(first), report_to_json(second)]
                        dt, cached = time.perf_counter() - t0, False
                        if not args.no_cache:
                            cache_store(key, {
                                "schema": 1,
                                "passed": all(d["passed"] for d in docs),
                                "reports": docs,
                            })
                else:
                    doc, dt, cached = _verify_cell(
                        build_case(args.id, m, p), mode, args.jobs,
                        args.arithmetic, not args.no_cache)
                    docs = [doc]
            except _CELL_ERRORS as e:
                any_error = True
                errors.append(f"{args.id}_m{m}_p{p}: {e}")
                print(f"{args.id}_m{m}_p{p}: error: {e}", file=sys.stderr)
                continue
            for doc in docs:
                _write_cell(out_dir, doc, dt, cached)
                lines.append(_summary_line(doc))
                print(f"{_cell_name(doc)} residual={_poly_str(doc['residual'])} "
                      f"scale={doc['scale']} "
                      f"coprime={doc.get('coprime_partner_check')}")
                if not doc["passed"]:
                    any_falsified = True
                if doc.get("coprime_partner_check") is False:
                    any_falsified = True
    _write_summary(out_dir, f"residuals: {args.id}", lines, errors)
    return _sweep_exit(any_falsified, any_error)


def _poly_str(coeffs: list[str]) -> str:
    if not coeffs:
        return "0"
    terms = []
    for k, c in enumerate(coeffs):
        if c == "0":
            continue
        terms.append(c if k == 0 else (f"{c}*t" if k == 1 else f"{c}*t^{k}"))
    return " + ".join(terms) if terms else "0"


# ---------------------------------------------------------------------------
# weight tables


def _cmd_zhu_table(args) -> int:
    out_dir = Path(args.out_dir)
    rows = zhu.build_tables(args.family, args.m, args.p)
    name = f"zhu_{args.family}_m{args.m}_p{args.p}"
    csv_text = zhu.rows_to_csv(rows, args.family)
    md_text = zhu.rows_to_markdown(rows, args.family)
    _atomic_write(out_dir / f"{name}.csv", csv_text)
    _atomic_write(out_dir / f"{name}.md", md_text)

    expected = zhu.expected_row_count(args.family, args.m, args.p)
    bad_h2 = zhu.h2_fp_rows_check(rows, args.p) if args.family == "D" else []
    collisions = zhu.distinct_check(rows)
    checks = {
        "schema": 1,
        "family": args.family,
        "m": args.m,
        "p": args.p,
        "rows": len(rows),
        "expected_rows": expected,
        "h2_weight_violations": bad_h2,
        "label_collisions": [list(c) for c in collisions],
        "passed": len(rows) == expected and not bad_h2 and not collisions,
    }
    _atomic_write(out_dir / f"{name}.checks.json", _dump_json(checks))
    print(md_text)
    print(f"rows={len(rows)} expected={expected} "
          f"h2_check={'ok' if not bad_h2 else bad_h2} "
          f"distinct={'ok' if not collisions else collisions}")
    return EXIT_OK if checks["passed"] else EXIT_FALSIFIED


def _cmd_zhu_dims(args) -> int:
    rep = zhu.dims(args.family, args.m, args.p)
    print(f"zhu_dim={rep.zhu_dim}, irreducibles={rep.irreducible_count}")
    extras = [f"a0_bound={rep.a0_bound}",
              f"graded_piece_bound={rep.graded_piece_bound}",
              f"log_modules={rep.log_modules}"]
    if rep.center_dim is not None:
        extras.insert(0, f"center_dim={rep.center_dim}")
    print(", ".join(extras))
    if args.out_dir:
        doc = {
            "schema": 1,
            "family": rep.family,
            "m": rep.m,
            "p": rep.p,
            "zhu_dim": rep.zhu_dim,
            "irreducible_count": rep.irreducible_count,
            "center_dim": rep.center_dim,
            "a0_bound": rep.a0_bound,
            "graded_piece_bound": rep.graded_piece_bound,
            "log_modules": rep.log_modules,
        }
        _atomic_write(Path(args.out_dir) /
                      f"zhu_dims_{rep.family}_m{rep.m}_p{rep.p}.json",
                      _dump_json(doc))
    return EXIT_OK


# ---------------------------------------------------------------------------
# self-checks


def _cmd_oracle(args) -> int:
    case = build_case(args.id, args.m, args.p)
    if not (0 <= args.display < len(case.lhs)):
        raise ValueError(f"{args.id} has displays 0..{len(case.lhs) - 1}")
    expr = case.lhs[args.display]
    poly = constant_term(expr, _MODES[args.mode], args.jobs,
                         args.arithmetic).value
    ok = True
    for t in args.t:
        brute = dense_oracle(expr, t, cap=args.cap)
        mine = poly(t)
        match = mine == brute
        ok = ok and match
        print(f"t={t} engine={mine} oracle={brute} "
              f"{'ok' if match else 'MISMATCH'}")
    return EXIT_OK if ok else EXIT_FALSIFIED


def _cmd_dyson(args) -> int:
    ok = True
    for n in args.n:
        for p in args.p:
            expr = dyson_expression(n, p)
            got = constant_term(expr, "exact").value(0)
            want = dyson_value(n, p)
            match = got == want
            ok = ok and match
            print(f"n={n} p={p} ct={got} expected={want} "
                  f"{'ok' if match else 'MISMATCH'}")
    return EXIT_OK if ok else EXIT_FALSIFIED


# ---------------------------------------------------------------------------
# argument plumbing


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors, which would collide with the
    # "falsified" status; route them to the operational code instead.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_OPERATIONAL, f"{self.prog}: error: {message}\n")


def _add_engine_flags(sp, with_mode=True):
    if with_mode:
        sp.add_argument("--mode", choices=sorted(_MODES), default="interp")
    sp.add_argument("--jobs", type=int, default=1,
                    help="worker count for the sampling layer")
    sp.add_argument("--arithmetic", choices=("int", "modp"), default="int")


def _add_sweep_flags(sp):
    sp.add_argument("--m", type=int, nargs="+", default=[2])
    sp.add_argument("--p", type=int, nargs="+", default=[1])
    sp.add_argument("--out-dir", default="ctkit-reports")
    sp.add_argument("--no-cache", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ctkit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("verify", help="verify one identity over a grid")
    sp.add_argument("--id", choices=IDENTITY_IDS)
    sp.add_argument("--case-file", help="serialized case JSON instead of --id")
    _add_sweep_flags(sp)
    _add_engine_flags(sp)
    sp.set_defaults(func=_cmd_verify)

    sp = sub.add_parser("residual",
                        help="extract residuals (with the coprimality partner)")
    sp.add_argument("--id", required=True, choices=IDENTITY_IDS)
    _add_sweep_flags(sp)
    _add_engine_flags(sp)
    sp.set_defaults(func=_cmd_residual)

    sp = sub.add_parser("zhu-table", help="emit a weight table (CSV + Markdown)")
    sp.add_argument("--family", required=True, choices=("D", "A"))
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--out-dir", default="ctkit-reports")
    sp.set_defaults(func=_cmd_zhu_table)

    sp = sub.add_parser("zhu-dims", help="dimension bookkeeping for a family")
    sp.add_argument("--family", required=True, choices=("D", "A"))
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--out-dir", default=None)
    sp.set_defaults(func=_cmd_zhu_dims)

    sp = sub.add_parser("oracle",
                        help="engine vs dense brute force at integer t")
    sp.add_argument("--id", required=True, choices=IDENTITY_IDS)
    sp.add_argument("--m", type=int, default=2)
    sp.add_argument("--p", type=int, default=1)
    sp.add_argument("--t", type=int, nargs="+", default=[0, 1, 2, 3, 4, 5])
    sp.add_argument("--display", type=int, default=0)
    sp.add_argument("--cap", type=int, default=4_000_000,
                    help="dense window-box cell limit")
    _add_engine_flags(sp)
    sp.set_defaults(func=_cmd_oracle)

    sp = sub.add_parser("dyson-sanity", help="classical product-formula check")
    sp.add_argument("--n", type=int, nargs="+", default=[2, 3])
    sp.add_argument("--p", type=int, nargs="+", default=[1, 2])
    sp.set_defaults(func=_cmd_dyson)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _CELL_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_OPERATIONAL
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_OPERATIONAL


if __name__ == "__main__":
    sys.exit(main())
