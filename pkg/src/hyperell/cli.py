"""Command-line interface: ``hyperell decompose|count|fix|verify|genus1-table|bc``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import List, Optional, Sequence

from .curves import Budget
from .engine import PARITIES, Engine, NotPolynomial, UnsupportedBaseCase, build_genus1_table
from .field import BudgetExceeded, FieldError
from .qpoly import ParseError, QPoly, QRat
from .tuples import (AExpr, ExprParseError, UTuple, decompose_a, decompose_bc, parse_aexpr, parse_bcexpr,
                     parse_tuple, partitions)
from .verify import SUITES, run_suite

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_UNSUPPORTED, EXIT_BUDGET = 0, 1, 2, 3, 4
MAX_WEIGHT = 7
DEFAULT_CACHE = ".hyperell-cache"


class UsageError(ValueError):
    pass


def parse_genus(text: str) -> List[int]:
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            lo, hi = int(a), int(b)
            if hi < lo:
                raise UsageError(f"empty genus range {text!r}")
            return list(range(lo, hi + 1))
        return [int(text)]
    except ValueError as exc:
        raise UsageError(f"bad genus {text!r}: use G or A..B") from exc


def parse_q_list(text: Optional[str]) -> List[int]:
    if not text:
        return []
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"bad --q list {text!r}") from exc


def parities(choice: str) -> Sequence[str]:
    return PARITIES if choice == "both" else (choice,)


def parse_target(text: str):
    text = text.strip()
    if text.startswith("("):
        return parse_tuple(text)
    return parse_aexpr(text)


# ---------------------------------------------------------------- rendering


def _num_json(x):
    return [int(x.numerator), int(x.denominator)]


def poly_json(p: QPoly) -> list:
    return [[k] + _num_json(c) for k, c in enumerate(p.c) if c != 0]


def value_json(v: QRat) -> dict:
    out = {"value": v.render()}
    if v.is_poly():
        out["poly"] = poly_json(v.as_poly())
    else:
        out["num"] = poly_json(v.num)
        out["den"] = poly_json(v.den)
    return out


def emit(args, records: List[dict], plain_lines: List[str], latex_lines: Optional[List[str]] = None) -> None:
    if args.format == "json":
        for r in records:
            print(json.dumps(r, sort_keys=True))
    elif args.format == "latex":
        print("\n".join(latex_lines if latex_lines is not None else plain_lines))
    else:
        print("\n".join(plain_lines))


def _evals(v: QRat, qs: List[int]) -> dict:
    return {str(q): str(v(q)) for q in qs}


# ---------------------------------------------------------------- commands


def cmd_decompose(args, engine: Engine) -> int:
    text = args.expr
    if text.strip()[:1] in ("b", "c"):
        obj = parse_bcexpr(text)
        comb = decompose_bc(obj)
    else:
        obj = parse_aexpr(text)
        comb = decompose_a(obj)
    rec = {"expr": obj.render(), "terms": [[t.render()] + _num_json(c) for t, c in comb.items()]}
    emit(args, [rec], [f"{obj.render()} = {comb.render()}"],
         [f"{obj.render('latex')} = {comb.render('latex')}"])
    return EXIT_OK


def _check_weight(target, args) -> None:
    if target.weight > MAX_WEIGHT and not args.allow_unsupported:
        raise UnsupportedBaseCase(f"weight {target.weight} exceeds {MAX_WEIGHT}; pass --allow-unsupported to try")


def cmd_count(args, engine: Engine) -> int:
    target = parse_target(args.expr)
    _check_weight(target, args)
    qs = parse_q_list(args.q)
    records, plain, latex = [], [], []
    name = target.render()
    for par in parities(args.char):
        if args.closed:
            cf = engine.closed_form(target, par)
            records.append({"expr": name, "parity": par, "closed_form": cf.render(), "g_min": cf.g_min,
                            "period": cf.period, "geometric": cf.geometric.render()})
            plain.append(f"{name} [{par}]:\n{cf.render()}")
            latex.append(f"{target.render('latex')}|_{{g,\\mathrm{{{par}}}}} = {cf.render('latex')}")
            continue
        for g in parse_genus(args.genus):
            v = engine.u_value(target, g, par) if isinstance(target, UTuple) else engine.a_value(target, g, par)
            rec = {"expr": name, "parity": par, "genus": g, **value_json(v)}
            if qs:
                rec["at"] = _evals(v, qs)
            records.append(rec)
            extra = "  " + " ".join(f"q={k}:{x}" for k, x in rec["at"].items()) if qs else ""
            plain.append(f"{name} g={g} [{par}]: {v.render()}{extra}")
            latex.append(f"{target.render('latex')}|_{{{g},\\mathrm{{{par}}}}} = {v.render('latex')}")
    emit(args, records, plain, latex)
    return EXIT_OK


def cmd_bc(args, engine: Engine) -> int:
    expr = parse_bcexpr(args.expr)
    if expr.weight > MAX_WEIGHT and not args.allow_unsupported:
        raise UnsupportedBaseCase(f"weight {expr.weight} exceeds {MAX_WEIGHT}")
    qs = parse_q_list(args.q)
    comb = decompose_bc(expr)
    records, plain = [], []
    for par in parities(args.char):
        for g in parse_genus(args.genus):
            v = QRat(QPoly())
            for t, c in comb.items():
                v = v + engine.u_value(t, g, par) * c
            rec = {"expr": expr.render(), "parity": par, "genus": g, **value_json(v)}
            if qs:
                rec["at"] = _evals(v, qs)
            records.append(rec)
            plain.append(f"{expr.render()} g={g} [{par}]: {v.render()}")
    emit(args, records, plain)
    return EXIT_OK


def cmd_fix(args, engine: Engine) -> int:
    n = args.n
    if not 0 <= n <= MAX_WEIGHT:
        raise UsageError(f"n must be between 0 and {MAX_WEIGHT}")
    qs = parse_q_list(args.q)
    records, plain, latex = [], [], []
    for par in parities(args.char):
        for g in parse_genus(args.genus):
            if g < 2:
                raise UsageError("fixed-point counts need genus >= 2")
            for sig, poly in engine.fixed_point_table(g, n, par).items():
                rec = {"kind": "fixed", "cycle_type": sig.render(), "parity": par, "genus": g,
                       "poly": poly_json(poly)}
                if qs:
                    rec["at"] = {str(q): str(poly(q)) for q in qs}
                records.append(rec)
                plain.append(f"g={g} [{par}] sigma={sig.render()}: {poly.render()}")
                latex.append(f"{sig.render()} & {poly.render('latex')} \\\\")
            if args.schur:
                for lam, poly in engine.character_transform(g, n, par).items():
                    integral = poly.is_integral()
                    rec = {"kind": "schur", "shape": lam.render(), "parity": par, "genus": g,
                           "poly": poly_json(poly), "integral_coefficients": integral}
                    if qs:
                        rec["at"] = {str(q): str(poly(q)) for q in qs}
                    records.append(rec)
                    plain.append(f"g={g} [{par}] P{lam.render()}: {poly.render()}"
                                 + ("" if integral else "   (non-integral coefficients)"))
                    latex.append(f"P_{{{lam.render()}}} & {poly.render('latex')} \\\\")
    emit(args, records, plain, latex)
    return EXIT_OK


def cmd_verify(args, engine: Engine) -> int:
    budget = Budget(max_curves=args.budget_curves) if args.budget_curves else Budget()
    names = SUITES if args.suite == "all" else (args.suite,)
    checks = []
    for name in names:
        checks.extend(run_suite(name, engine, budget, args.jobs))
    for c in checks:
        if args.format == "json":
            print(json.dumps(c.to_json(), sort_keys=True))
        else:
            status = "PASS" if c.ok else "FAIL"
            print(f"{status}  [{c.suite}] {c.name} ({c.seconds:.2f}s){'  ' + c.detail if c.detail else ''}")
    failed = [c for c in checks if not c.ok]
    if not failed:
        return EXIT_OK
    # a check that only ran out of budget is not a mismatch
    return EXIT_BUDGET if all(c.error == "BudgetExceeded" for c in failed) else EXIT_MISMATCH


def cmd_genus1_table(args, engine: Engine) -> int:
    table = build_genus1_table(jobs=args.jobs)
    engine.genus1_table = table
    engine.save()
    records = table.to_records()
    plain = [f"{r['key']['expr']}|_1 = {r['value']}" for r in records]
    emit(args, records, plain)
    return EXIT_OK


# ---------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--char", choices=["odd", "even", "both"], default="odd")
    common.add_argument("--genus", default="2", help="G or A..B")
    common.add_argument("--q", help="comma-separated field sizes to evaluate at")
    common.add_argument("--format", choices=["plain", "json", "latex"], default="plain")
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--cache", default=DEFAULT_CACHE, help="cache directory ('none' disables it)")
    common.add_argument("--budget-curves", type=int, default=None)
    common.add_argument("--allow-unsupported", action="store_true")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="hyperell", description="Equivariant point counts of hyperelliptic moduli.")
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("decompose", parents=[common], help="expand a moment into u-tuples")
    s.add_argument("expr")
    s.set_defaults(func=cmd_decompose)
    s = sub.add_parser("count", parents=[common], help="a-moments or u-values per genus")
    s.add_argument("expr")
    s.add_argument("--closed", action="store_true", help="print the closed form in g")
    s.set_defaults(func=cmd_count)
    s = sub.add_parser("fix", parents=[common], help="fixed points of Frobenius times sigma")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--schur", action="store_true", help="add the S_n character transform")
    s.set_defaults(func=cmd_fix)
    s = sub.add_parser("verify", parents=[common], help="run a verification suite")
    s.add_argument("suite", choices=list(SUITES) + ["all"])
    s.set_defaults(func=cmd_verify)
    s = sub.add_parser("genus1-table", parents=[common], help="rebuild the genus-1 moment table")
    s.set_defaults(func=cmd_genus1_table)
    s = sub.add_parser("bc", parents=[common], help="b/c fiber statistics per genus")
    s.add_argument("expr")
    s.set_defaults(func=cmd_bc)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.jobs < 1 or (args.budget_curves is not None and args.budget_curves < 1):
        print("error: --jobs and --budget-curves must be positive", file=sys.stderr)
        return EXIT_USAGE
    cache = None if args.cache == "none" else args.cache
    engine = Engine(cache_dir=cache, jobs=args.jobs)
    try:
        code = args.func(args, engine)
    except (ExprParseError, ParseError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except UnsupportedBaseCase as exc:
        print(f"unsupported: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (NotPolynomial, FieldError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    engine.save()
    return code


if __name__ == "__main__":
    sys.exit(main())
