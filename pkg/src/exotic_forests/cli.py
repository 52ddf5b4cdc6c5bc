"""Command-line entry point.

Exit codes: 0 ok, 1 data error, 2 usage error, 3 verification failure.
Flags take precedence over the environment (``EXOTIC_MAX_SIZE``,
``EXOTIC_SEED``), which takes precedence over built-in defaults.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction
from typing import List, Optional

from . import acceptance
from .algebra import FormalSum, ck_coproduct, dual_ck, format_fraction, gl_product, graft
from .enumeration import FAMILIES, SizeBoundExceeded, enumerate_forests
from .forest import ForestError, concat, sigma
from .order import ELI_DIRECTIONS, assemble_omega, method_order, omega_eval, reduce_by_multiplicativity, report
from .srk import DimensionMismatch, Tableau
from .stochastic import NotFiner, expectation
from .text import ForestSyntaxError, parse, print_latex

EXIT_OK, EXIT_DATA, EXIT_USAGE, EXIT_VERIFY = 0, 1, 2, 3


class DataError(Exception):
    pass


def _forest(text: str):
    try:
        return parse(text)
    except ForestSyntaxError as exc:
        raise DataError(f"{text!r}: {exc}\n  {''.join(text.split())}\n  {' ' * exc.position}^") from exc
    except ForestError as exc:
        raise DataError(f"{text!r}: {type(exc).__name__}: {exc}") from exc


def _dump(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, indent=2)


def _size_text(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{float(q):g}"


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_enumerate(args) -> str:
    max_size = args.max_size if args.max_size is not None else Fraction(os.environ.get("EXOTIC_MAX_SIZE", "3"))
    rows = [f"{f.key}\t{sigma(f)}\t{_size_text(f.size)}" for f in enumerate_forests(max_size, args.family, args.aroma_free)]
    return "\n".join(rows)


def cmd_sigma(args) -> str:
    return str(sigma(_forest(args.forest)))


def cmd_product(args) -> str:
    x, y = _forest(args.left), _forest(args.right)
    if args.op == "concat":
        out = FormalSum.of(concat(x, y))
    elif args.op == "graft":
        out = graft(x, y)
    elif args.op == "gl":
        out = gl_product(x, y)
    else:
        out = dual_ck(x, y)
    return _dump(out.to_json_obj())


def cmd_coproduct(args) -> str:
    return _dump(ck_coproduct(_forest(args.forest)).to_json_obj())


def cmd_expect(args) -> str:
    f = _forest(args.forest)
    if f.n_lianas:
        raise DataError(f"{args.forest!r}: expectation takes a grafted forest, found liana labels")
    return _dump(expectation(f).to_json_obj())


def _latex_report(conds) -> str:
    lines = [r"\begin{tabular}{|c|c|l|}", r"\hline", r" & $\pi$ & $\omega(\pi)$ \\", r"\hline"]
    for c in conds:
        star = r"$\ast$" if c.redundant else ""
        lines.append(f"{star} & ${print_latex(c.target)}$ & ${c.render(latex=True)}$ \\\\")
    lines += [r"\hline", r"\end{tabular}"]
    return "\n".join(lines)


def _csv_report(conds) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["order", "target", "sigma", "redundant", "omega"])
    for c in conds:
        w.writerow([int(c.size), c.target.key, c.sigma_target, int(c.redundant), c.render()])
    return buf.getvalue().rstrip("\n")


def cmd_order_conditions(args) -> str:
    if args.format == "json":
        return _dump(report(args.order, args.eli_direction, args.reduce, args.chains))
    conds = assemble_omega(args.order, args.eli_direction)
    kept, _ = reduce_by_multiplicativity(conds)
    shown = kept if args.reduce else conds
    return _latex_report(shown) if args.format == "latex" else _csv_report(shown)


def _load_tableau(path: str) -> Tableau:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: invalid JSON ({exc})") from exc
    try:
        return Tableau.from_json(data)
    except (KeyError, TypeError) as exc:
        raise DataError(f"{path}: expected keys b, a, d ({exc})") from exc


def cmd_check_method(args) -> str:
    tab = _load_tableau(args.tableau)
    conds = assemble_omega(args.order)
    reduce_by_multiplicativity(conds)
    order, first, value = method_order(conds, tab)
    out = {
        "conditions": [
            {
                "order": int(c.size),
                "target": c.target.key,
                "redundant": c.redundant,
                "omega": format_fraction(omega_eval(c, tab)),
            }
            for c in conds
        ],
        "order": order,
        "first_failure": None if first is None else {"target": first.target.key, "omega": format_fraction(value)},
    }
    return _dump(out)


def cmd_verify(args) -> tuple:
    results = acceptance.run(acceptance.SUITES[args.suite])
    text = "\n".join(acceptance.format_result(r) for r in results)
    return text, all(r.passed for r in results)


# ---------------------------------------------------------------------------

def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="exotic-forests", description="Exotic forests and invariant-measure order conditions.")
    p.add_argument("--seed", type=int, help="seed for randomized suites (overrides EXOTIC_SEED)")
    p.add_argument("--bound", type=_fraction, help="largest forest size allowed (overrides EXOTIC_MAX_SIZE)")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("enumerate", help="list a forest family with σ and size")
    s.add_argument("--family", choices=FAMILIES, default="exotic_trees")
    s.add_argument("--max-size", type=_fraction)
    s.add_argument("--aroma-free", action="store_true")
    s.set_defaults(func=cmd_enumerate)

    s = sub.add_parser("sigma", help="symmetry coefficient of a forest")
    s.add_argument("forest")
    s.set_defaults(func=cmd_sigma)

    s = sub.add_parser("product", help="product of two forests as a formal sum")
    s.add_argument("--op", choices=("concat", "graft", "gl", "dualck"), required=True)
    s.add_argument("left")
    s.add_argument("right")
    s.set_defaults(func=cmd_product)

    s = sub.add_parser("coproduct", help="Connes-Kreimer coproduct")
    s.add_argument("forest")
    s.set_defaults(func=cmd_coproduct)

    s = sub.add_parser("expect", help="expectation of a grafted forest")
    s.add_argument("forest")
    s.set_defaults(func=cmd_expect)

    s = sub.add_parser("order-conditions", help="invariant-measure order conditions")
    s.add_argument("--order", type=int, required=True)
    s.add_argument("--format", choices=("json", "latex", "csv"), default="json")
    s.add_argument("--reduce", action="store_true", help="drop conditions implied by multiplicativity")
    s.add_argument("--eli-direction", choices=ELI_DIRECTIONS, default="shallow")
    s.add_argument("--chains", action="store_true", help="include transformation chains (json)")
    s.set_defaults(func=cmd_order_conditions)

    s = sub.add_parser("check-method", help="evaluate the conditions on a tableau")
    s.add_argument("--tableau", required=True)
    s.add_argument("--order", type=int, default=3)
    s.set_defaults(func=cmd_check_method)

    s = sub.add_parser("verify", help="run acceptance suites")
    s.add_argument("--suite", choices=tuple(acceptance.SUITES), default="all")
    s.set_defaults(func=cmd_verify)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and EXIT_USAGE
    if getattr(args, "order", None) is not None and args.order < 1:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: --order must be positive", file=sys.stderr)
        return EXIT_USAGE
    overrides = {"EXOTIC_SEED": args.seed, "EXOTIC_MAX_SIZE": args.bound}
    saved = {k: os.environ.get(k) for k in overrides}
    try:
        for k, v in overrides.items():
            if v is not None:
                os.environ[k] = str(v)
        return _dispatch(args)
    finally:
        for k, v in saved.items():
            if v is None:
                os.environ.pop(k, None)
            else:
                os.environ[k] = v


def _dispatch(args) -> int:
    try:
        out = args.func(args)
    except (DataError, ForestError, SizeBoundExceeded, DimensionMismatch, NotFiner, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    if isinstance(out, tuple):
        text, ok = out
        print(text)
        return EXIT_OK if ok else EXIT_VERIFY
    print(out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
