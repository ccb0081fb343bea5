"""Command-line surface.

Subcommands: compute (one value, any engine or all), table (CSV over a
label range), verify (cross-engine grid plus the invariant suites),
interpolate (polynomial in the labels), vev (raw wedge expectation
values), fixtures (closed-form families).

Rationals are printed as numerator/denominator strings, never floats.
Exit codes: 0 ok, 1 verification failure, 2 bad input, 3 internal
consistency failure.  DRX_THREADS > 1 parallelises grid evaluation with
threads; output order is independent of scheduling.
"""

from __future__ import annotations

import argparse
import itertools
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Iterable, List, Sequence, Tuple

from . import genfun, identities, splitting, wedge
from .errors import (ConventionMismatch, DrxError, NonDivisible, ResidualPole)
from .series import LinearForm

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_BAD_INPUT = 2
EXIT_INCONSISTENT = 3

_INTERNAL = (NonDivisible, ResidualPole, ConventionMismatch)


def _int_list(text: str) -> Tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in text.split(",") if tok.strip() != "")
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated integer list: {text!r}")


def _rat(value: Fraction) -> dict:
    return {"num": str(value.numerator), "den": str(value.denominator)}


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("DRX_THREADS", "1")))
    except ValueError:
        return 1


def _map(fn, items: Sequence):
    workers = _threads()
    if workers == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _engine_value(engine: str, g: int, a: Tuple[int, ...], d: Tuple[int, ...]) -> Fraction:
    if engine == "genfun":
        return genfun.evaluate(g, a, d)
    if engine == "splitting":
        return splitting.dr_intersect(g, a, d)
    if engine == "wedge":
        return wedge.thm2_via_commutators(g, a, d)
    raise ValueError(f"unknown engine {engine!r}")


def cmd_compute(args) -> int:
    g, a, d = args.g, args.a, args.d
    genfun.DrProblem(g, a, d).require_well_posed()
    engines = ["genfun", "splitting", "wedge"] if args.engine == "all" else [args.engine]
    records = []
    values = []
    for engine in engines:
        t0 = time.perf_counter()
        try:
            value = _engine_value(engine, g, a, d)
        except DrxError as exc:
            if isinstance(exc, _INTERNAL):
                raise
            if args.engine == "all":
                records.append({"g": g, "a": list(a), "d": list(d), "engine": engine,
                                "value": None, "skipped": str(exc)})
                continue
            raise
        elapsed = time.perf_counter() - t0
        values.append(value)
        records.append({"g": g, "a": list(a), "d": list(d), "engine": engine,
                        "value": _rat(value), "elapsed": round(elapsed, 6)})
    if args.engine == "all":
        agree = len(set(values)) <= 1
        for rec in records:
            rec["agree"] = agree
    _emit(records if args.engine == "all" else records[0], args.format)
    return EXIT_OK


def cmd_table(args) -> int:
    g, d = args.g, args.d
    n = len(d)
    lo, hi = args.a_range
    rows = []
    points = []
    for free in itertools.product(range(lo, hi + 1), repeat=n - 1):
        last = -sum(free)
        if not lo <= last <= hi:
            continue
        points.append(tuple(free) + (last,))
    vals = _map(lambda a: _safe_value(args.engine, g, a, d), points)
    for a, v in zip(points, vals):
        rows.append(list(a) + [v])
    header = [f"a{i+1}" for i in range(n)] + ["value"]
    if args.format == "json":
        out = [{"a": r[:-1], "value": (_rat(r[-1]) if r[-1] is not None else None)}
               for r in rows]
        print(json.dumps(out))
    else:
        print(",".join(header))
        for r in rows:
            val = "" if r[-1] is None else f"{r[-1].numerator}/{r[-1].denominator}"
            print(",".join(str(x) for x in r[:-1]) + "," + val)
    return EXIT_OK


def _safe_value(engine, g, a, d):
    try:
        return _engine_value(engine, g, tuple(a), tuple(d))
    except DrxError as exc:
        if isinstance(exc, _INTERNAL):
            raise
        return None


def cmd_interpolate(args) -> int:
    g, d = args.g, args.d
    n = len(d)
    grid = genfun.default_grid(g, n)
    coeffs = genfun.interpolate_polynomial(g, n, d, grid)
    held_out = _held_out_points(g, n, grid, 5)
    checks = []
    for avec in held_out:
        predicted = genfun.evaluate_polynomial(coeffs, avec[:-1])
        actual = genfun.evaluate(g, avec, d)
        checks.append(predicted == actual)
    record = {
        "g": g, "d": list(d),
        "variables": [f"a{i+1}" for i in range(n - 1)],
        "coefficients": [{"exponents": list(m), "value": _rat(c)}
                         for m, c in sorted(coeffs.items())],
        "held_out_exact": all(checks),
    }
    _emit(record, args.format)
    return EXIT_OK if all(checks) else EXIT_VERIFY_FAILED


def _held_out_points(g: int, n: int, grid, count: int):
    radius = 1 + max(abs(x) for point in grid for x in point)
    out = []
    for free in itertools.product(range(radius, radius + 2), repeat=n - 1):
        out.append(tuple(free) + (-sum(free),))
        if len(out) == count:
            return out
    k = radius
    while len(out) < count:
        out.append((k, -k) + (0,) * (n - 2))
        k += 1
    return out[:count]


def _parse_ops(text: str) -> List[wedge.EOp]:
    ops = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok.startswith("E"):
            raise argparse.ArgumentTypeError(f"bad operator token {tok!r}")
        name, _, var = tok.partition(":")
        energy = int(name[1:])
        if var in ("", "0"):
            ops.append(wedge.EOp.alpha(energy))
        else:
            ops.append(wedge.EOp.at(energy, var))
    return ops


def cmd_vev(args) -> int:
    ops = _parse_ops(args.ops)
    res = wedge.connected_vev(ops, args.bound) if args.connected else wedge.vev(ops, args.bound)
    num = res.numerator
    record = {
        "ops": args.ops,
        "bound": args.bound,
        "variables": list(num.vars),
        "poles": ["".join(f"{c}*{v}" for v, c in key) for key in res.poles],
        "coefficients": [
            {"exponents": list(e), "value": _rat(c)}
            for e, c in sorted(num.terms.items(), key=lambda t: (sum(t[0]), t[0]))],
    }
    _emit(record, args.format)
    return EXIT_OK


def cmd_fixtures(args) -> int:
    records = identities.paper_fixture_suite()
    bad = identities.fixture_failures(records)
    if args.format == "json":
        print(json.dumps([{
            "family": r.family, "params": list(r.params), "engine": r.engine,
            "expected": _rat(r.expected),
            "got": _rat(r.got) if r.got is not None else None,
            "ok": r.ok, "note": r.note} for r in records]))
    else:
        for r in records:
            status = "ok" if r.ok else "FAIL"
            print(f"{status} {r.family} {r.params} [{r.engine}] {r.note}")
        print(f"{len(records) - len(bad)}/{len(records)} fixture rows pass")
    return EXIT_OK if not bad else EXIT_VERIFY_FAILED


# -- verify ---------------------------------------------------------------


def well_posed_grid(max_g: int, max_n: int, max_abs: int) -> List[tuple]:
    """Canonical well-posed problems: label multisets (sorted) x degree splits."""
    out = []
    for n in range(2, max_n + 1):
        for avec in itertools.combinations_with_replacement(
                range(-max_abs, max_abs + 1), n):
            if sum(avec) != 0:
                continue
            for g in range(0, max_g + 1):
                dim = 2 * g - 3 + n
                if dim < 0:
                    continue
                seen = set()
                for d in itertools.product(range(dim + 1), repeat=n):
                    if sum(d) != dim:
                        continue
                    key = tuple(sorted(zip(avec, d)))
                    if key in seen:
                        continue
                    seen.add(key)
                    out.append((g, avec, d))
    return out


def _verify_point(point) -> List[str]:
    g, a, d = point
    problems = []
    ga = genfun.evaluate(g, a, d)
    try:
        gb = splitting.check_convention(g, a, d, ga)
    except ConventionMismatch as exc:
        raise
    if gb != ga:
        problems.append(f"splitting {gb} != genfun {ga} on g={g} a={a} d={d}")
    try:
        gc = wedge.thm2_via_commutators(g, a, d)
    except DrxError:
        gc = None
    if gc is not None and gc != ga:
        problems.append(f"wedge {gc} != genfun {ga} on g={g} a={a} d={d}")
    return problems


def cmd_verify(args) -> int:
    t0 = time.perf_counter()
    counts = {}
    failures: List[str] = []

    grid = well_posed_grid(args.max_g, args.max_n, args.max_abs_a)
    results = _map(_verify_point, grid)
    for problems in results:
        failures.extend(problems)
    counts["grid points"] = len(grid)

    single = 0
    for g, a, d in grid:
        nz = [i for i, x in enumerate(d) if x > 0]
        if len(nz) > 1:
            continue
        s = nz[0] if nz else 0
        got = wedge.single_psi_via_wedge(g, a, s)
        want = genfun.dr_psi_power(g, a, s)
        single += 1
        if got != want:
            failures.append(f"single-psi wedge {got} != {want} on g={g} a={a} s={s}")
    counts["single-psi points"] = single

    ev = 0
    for inst in _evidence_instances(2, 3, 5):
        ev += 1
        if not identities.evidence_check(inst):
            failures.append(f"completed-cycle identity fails at {inst}")
    counts["evidence instances"] = ev

    fixtures = identities.paper_fixture_suite()
    counts["fixture rows"] = len(fixtures)
    for r in identities.fixture_failures(fixtures):
        failures.append(f"fixture {r.family}{r.params}[{r.engine}] got {r.got}")

    counts["elapsed_s"] = round(time.perf_counter() - t0, 3)
    for k, v in counts.items():
        print(f"{k}: {v}")
    if failures:
        print("FIRST FAILURE:", failures[0])
        return EXIT_VERIFY_FAILED
    print("all checks pass")
    return EXIT_OK


def _evidence_instances(max_g: int, max_n: int, max_K: int):
    for g in range(max_g + 1):
        for n in range(1, max_n + 1):
            for k in itertools.combinations_with_replacement(range(1, max_K + 1), n):
                if sum(k) <= max_K:
                    yield identities.EvidenceInstance(g, k)


def _emit(record, fmt: str):
    if fmt == "json":
        print(json.dumps(record))
    elif fmt == "csv":
        if isinstance(record, dict):
            record = [record]
        keys = sorted({k for r in record for k in r})
        print(",".join(keys))
        for r in record:
            print(",".join(_csv_cell(r.get(k)) for k in keys))
    else:
        print(record)


def _csv_cell(v):
    if isinstance(v, dict) and set(v) == {"num", "den"}:
        return f"{v['num']}/{v['den']}"
    return "" if v is None else str(v).replace(",", ";")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="drx",
        description="Exact DR-cycle psi-integral calculator with three "
                    "cross-validating engines")
    sub = ap.add_subparsers(dest="command", required=True)

    pc = sub.add_parser("compute", help="one intersection number")
    pc.add_argument("--g", type=int, required=True)
    pc.add_argument("--a", type=_int_list, required=True)
    pc.add_argument("--d", type=_int_list, required=True)
    pc.add_argument("--engine", choices=["genfun", "splitting", "wedge", "all"],
                    default="all")
    pc.add_argument("--format", choices=["json", "csv", "plain"], default="json")
    pc.set_defaults(fn=cmd_compute)

    pt = sub.add_parser("table", help="CSV of values over a label range")
    pt.add_argument("--g", type=int, required=True)
    pt.add_argument("--d", type=_int_list, required=True)
    pt.add_argument("--a-range", type=_range_pair, required=True,
                    help="lo..hi for every label")
    pt.add_argument("--engine", choices=["genfun", "splitting", "wedge"],
                    default="genfun")
    pt.add_argument("--format", choices=["json", "csv"], default="csv")
    pt.set_defaults(fn=cmd_table)

    pv = sub.add_parser("verify", help="cross-engine grid and invariant suites")
    pv.add_argument("--max-g", type=int, default=2)
    pv.add_argument("--max-n", type=int, default=4)
    pv.add_argument("--max-abs-a", type=int, default=3)
    pv.set_defaults(fn=cmd_verify)

    pi = sub.add_parser("interpolate", help="polynomial in the labels")
    pi.add_argument("--g", type=int, required=True)
    pi.add_argument("--d", type=_int_list, required=True)
    pi.add_argument("--format", choices=["json", "plain"], default="json")
    pi.set_defaults(fn=cmd_interpolate)

    pw = sub.add_parser("vev", help="wedge vacuum expectation value")
    pw.add_argument("--ops", required=True, help="e.g. E3:z,E-3:w")
    pw.add_argument("--bound", type=int, default=6)
    pw.add_argument("--connected", action="store_true")
    pw.add_argument("--format", choices=["json", "plain"], default="json")
    pw.set_defaults(fn=cmd_vev)

    pf = sub.add_parser("fixtures", help="closed-form family report")
    pf.add_argument("--format", choices=["json", "plain"], default="plain")
    pf.set_defaults(fn=cmd_fixtures)
    return ap


def _range_pair(text: str) -> Tuple[int, int]:
    lo, _, hi = text.partition("..")
    try:
        lo_i, hi_i = int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo..hi, got {text!r}")
    if lo_i > hi_i:
        raise argparse.ArgumentTypeError("empty range")
    return lo_i, hi_i


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except _INTERNAL as exc:
        print(f"internal consistency failure [{type(exc).__name__}]: {exc}",
              file=sys.stderr)
        return EXIT_INCONSISTENT
    except (DrxError, ValueError) as exc:
        print(f"bad input [{type(exc).__name__}]: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
