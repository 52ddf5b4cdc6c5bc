"""Acceptance checks, one function per criterion.

Each check returns ``(name, passed, detail)``.  ``run`` executes a selection
and reports timings; the CLI ``verify`` command and the test suite both use it.
"""

from __future__ import annotations

import os
import random
import time
from fractions import Fraction
from typing import Callable, Dict, List, NamedTuple, Optional

from . import tables
from .algebra import FormalSum, a_sigma, ck_coproduct, dual_ck, gl_product_direct
from .enumeration import counts_by_size, enumerate_forests
from .forest import liana_blocks, sigma, sub_forest
from .order import (
    all_moves,
    assemble_omega,
    method_order,
    omega_eval,
    reduce_by_multiplicativity,
    run_algorithm1,
)
from .srk import WeightPolynomial, elementary_weight, euler_maruyama, random_tableau
from .stochastic import expectation, pairing_count, pairing_count_bruteforce
from .text import parse


class Result(NamedTuple):
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0


def default_seed() -> int:
    return int(os.environ.get("EXOTIC_SEED", "2024"))


def _timed(limit: Optional[float], fn: Callable[[], tuple]) -> Result:
    t = time.perf_counter()
    name, ok, detail = fn()
    dt = time.perf_counter() - t
    if limit is not None and dt > limit:
        ok = False
        detail += f"; took {dt:.1f}s, limit {limit:.0f}s"
    return Result(name, ok, detail, dt)


# ---------------------------------------------------------------------------

def tree_table():
    name = "1 tree enumeration and symmetries"
    g = counts_by_size(3, "grafted_trees")
    e = counts_by_size(3, "exotic_trees")
    problems = []
    if g != tables.GRAFTED_TREE_COUNTS:
        problems.append(f"grafted counts {dict(g)}")
    if e != tables.EXOTIC_TREE_COUNTS:
        problems.append(f"exotic counts {dict(e)}")
    listed_g = {f.key for f in enumerate_forests(3, "grafted_trees")}
    listed_e = {f.key for f in enumerate_forests(3, "exotic_trees")}
    for row in tables.TREES:
        fg = parse(row.grafted)
        if fg.key not in listed_g or fg.size != row.size or sigma(fg) != row.sigma_grafted:
            problems.append(f"row {row.grafted}")
        if row.exotic is not None:
            fe = parse(row.exotic)
            if fe.key not in listed_e or sigma(fe) != row.sigma_exotic:
                problems.append(f"row {row.exotic}")
    if len({parse(r.grafted).key for r in tables.TREES}) != len(listed_g):
        problems.append("table rows do not cover the enumeration")
    ok = not problems
    return name, ok, "counts 1,1,2,4,8,16 and 1,4,16; all σ match" if ok else "; ".join(problems)


def condition_table():
    name = "2 order conditions up to order 3"
    notes = []
    good_dirs = []
    for direction in ("shallow", "deep"):
        conds = assemble_omega(3, direction)
        kept, dropped = reduce_by_multiplicativity(conds)
        by_key = {c.target.key: c for c in conds}
        bad = []
        for row in tables.CONDITIONS:
            c = by_key.get(parse(row.target).key)
            if c is None or c.symbolic() != tables.weights_from_latex(row.weights) or c.redundant != row.redundant:
                bad.append(row.target)
        if len(conds) == 13 and len(kept) == 9 and len(dropped) == 4 and not bad:
            good_dirs.append(direction)
        else:
            notes.append(f"{direction}: {len(conds)} conditions, mismatched {bad}")
    ok = bool(good_dirs)
    detail = f"13 conditions, 4 redundant, all rows exact with eli_direction in {good_dirs}"
    return name, ok, detail if ok else "; ".join(notes)


CK_EXAMPLE = {
    ("", "(b[b]),b[b[x]]"), ("b", "(b),b[b[x]]"), ("x", "(b[b]),b[b]"), ("b[x]", "(b[b]),b"),
    ("b,x", "(b),b[b]"), ("b,b[x]", "(b),b"), ("(b[b]),x", "b[b]"), ("(b[b]),b[x]", "b"),
    ("(b[b]),b[b[x]]", ""),
}

CHAINS = [
    # (start, intermediate forests, final terms, direction)
    ("b[1],b[1]", ["1,b[b[1]]"], {"b[b[1,1]]": -1, "b[1,b[1]]": -1, "b[b[b]]": -2}, "shallow"),
    ("b[1,1,b[2]],b[2]", ["b[1,1,2],b[b[2]]", "2,b[b[b[1,1,2]]]"],
     {"b[2,b[b[1,1,2]]]": -1, "b[b[2,b[1,1,2]]]": -1, "b[b[b[2,1,1,2]]]": -1, "b[b[b[1,1,b]]]": -2}, "deep"),
    ("1,b[b[b,1]]", [], {"b[1,b[b,1]]": -1, "b[b[1,b,1]]": -1, "b[b[b[1],1]]": -1, "b[b[b,b]]": -2}, "shallow"),
]


def _key(s: str) -> str:
    return parse(s).key if s else ""


def worked_examples():
    name = "3 worked examples"
    problems = []
    ck = ck_coproduct("(b[b]),b[b[x]]")
    got = {(l.key, r.key): c for l, r, c in ck.items()}
    want = {(_key(l), _key(r)): Fraction(1) for l, r in CK_EXAMPLE}
    if got != want:
        problems.append("Δ_CK example")
    e = expectation("b[x,x,b[x,x]]")
    if e != FormalSum.of(parse("b[1,1,b[2,2]]")) + FormalSum.of(parse("b[1,2,b[1,2]]"), 2):
        problems.append(f"E example gave {e}")
    for start, path, finals, direction in CHAINS:
        image, chains = run_algorithm1(start, direction)
        want_sum = FormalSum()
        for k, c in finals.items():
            want_sum += FormalSum.of(parse(k), c)
        if image != want_sum:
            problems.append(f"A({start}) = {image}")
        want_path = [_key(p) for p in path]
        paths = {tuple(s.after.key for s in ch.steps[:-1]) if ch.steps and ch.steps[-1].kind != "ELI" else () for ch in chains}
        if paths != {tuple(want_path)}:
            problems.append(f"chain from {start} went through {sorted(paths)}")
    ok = not problems
    return name, ok, "Δ_CK (9 terms), E[b[x,x,b[x,x]]], three transformation chains" if ok else "; ".join(problems)


def a_sigma_isomorphism():
    name = "4 A_σ intertwines ⋄ and ⊛"
    forests = enumerate_forests(3, "exotic_forests")
    checked = 0
    for x in forests:
        for y in forests:
            if x.size + y.size > 3:
                continue
            lhs = a_sigma(gl_product_direct(x, y))
            rhs = dual_ck(a_sigma(x), a_sigma(y))
            if lhs != rhs:
                return name, False, f"fails for ({x.key}, {y.key})"
            checked += 1
    return name, True, f"{checked} ordered pairs with |π1|+|π2| ≤ 3"


def pairing_counts():
    name = "5 pairing counts"
    checked = 0
    for row in tables.TREES:
        if row.exotic is None:
            continue
        p = pairing_count(row.exotic, row.grafted)
        if p != pairing_count_bruteforce(row.exotic, row.grafted) or p * row.sigma_exotic != row.sigma_grafted:
            return name, False, f"mismatch on {row.exotic}"
        checked += 1
    # every exotic refinement of every grafted tree, not only the tabulated pairs
    for g in enumerate_forests(3, "grafted_trees"):
        for e in {f.key: f for f in expectation(g).forests()}.values() if g.count("x") % 2 == 0 else []:
            if pairing_count(e, g) != pairing_count_bruteforce(e, g):
                return name, False, f"mismatch on {e.key} / {g.key}"
            checked += 1
    return name, True, f"{checked} grafted/exotic pairs agree with exhaustive pairing"


def multiplicativity(seed: Optional[int] = None):
    name = "6 multiplicativity of ω"
    seed = default_seed() if seed is None else seed
    conds = assemble_omega(4)
    by_key = {c.target.key: c for c in conds}
    rng = random.Random(seed)
    tabs = [random_tableau(3, rng) for _ in range(20)]
    n = 0
    for c in conds:
        blocks = liana_blocks(c.target)
        if len(blocks) < 2:
            continue
        parts = [by_key[sub_forest(c.target, b).key] for b in blocks]
        prod = WeightPolynomial({(): 1})
        for p in parts:
            prod = prod * p.symbolic()
        if c.symbolic() != prod:
            return name, False, f"symbolic mismatch on {c.target.key}"
        for t in tabs:
            v = Fraction(1)
            for p in parts:
                v *= omega_eval(p, t)
            if omega_eval(c, t) != v:
                return name, False, f"numeric mismatch on {c.target.key}"
        n += 1
    return name, True, f"{n} splittable targets up to size 4, symbolic and 20 tableaus (s=3, seed {seed})"


def integral_invariance():
    from .oracle import invariance_defect, quartic_1d, quartic_2d, rotated_2d

    name = "7 integral invariance of ELI/IBP"
    steps = {m for d in ("shallow", "deep") for m in all_moves(3, d)}
    worst = 0.0
    for prob in (quartic_1d(), quartic_2d()):
        for m in steps:
            worst = max(worst, invariance_defect(m.before, m.after, prob)[2])
    control = rotated_2d()
    eli = [invariance_defect(m.before, m.after, control)[2] for m in steps if m.kind == "ELI"]
    ok = worst < 1e-6 and max(eli, default=0.0) > 1e-3
    return name, ok, f"{len(steps)} steps, worst relative defect {worst:.1e}; non-gradient ELI defect {max(eli, default=0.0):.3f}"


def composition_law(seed: Optional[int] = None):
    from .oracle import composition_check

    name = "8 composition of S-series"
    seed = default_seed() if seed is None else seed
    rng = random.Random(seed)
    t1, t2 = random_tableau(2, rng), random_tableau(2, rng)
    ok = composition_check(lambda f: elementary_weight(f, t1), lambda f: elementary_weight(f, t2), max_size=3)
    return name, ok, f"exact through h^3 for two random s=2 tableaus (seed {seed})"


def euler_maruyama_check():
    name = "9 Euler-Maruyama order"
    conds = assemble_omega(3)
    em = euler_maruyama()
    by_key = {c.target.key: c for c in conds}
    wb = omega_eval(by_key["b"], em)
    wbb = omega_eval(by_key[parse("b[b]").key], em)
    order, first, value = method_order(conds, em)
    ok = wb == 0 and wbb == Fraction(1, 2) and order == 1
    return name, ok, f"ω(b)={wb}, ω(b[b])={wbb}, order {order}, first failure {first.target.key if first else None} = {value}"


CRITERIA: Dict[int, tuple] = {
    1: (tree_table, 10),
    2: (condition_table, 60),
    3: (worked_examples, None),
    4: (a_sigma_isomorphism, None),
    5: (pairing_counts, None),
    6: (multiplicativity, None),
    7: (integral_invariance, 300),
    8: (composition_law, None),
    9: (euler_maruyama_check, None),
}

SUITES = {
    "tables": (1, 2, 3, 5, 9),
    "algebra": (4, 6),
    "oracle": (7, 8),
    "all": tuple(CRITERIA),
}


def run(which=None) -> List[Result]:
    out = []
    for k in which or CRITERIA:
        fn, limit = CRITERIA[k]
        try:
            out.append(_timed(limit, fn))
        except Exception as exc:  # a crash is a failed criterion, not a crashed report
            out.append(Result(fn.__name__, False, f"{type(exc).__name__}: {exc}"))
    return out


def format_result(r: Result) -> str:
    return f"[{'PASS' if r.passed else 'FAIL'}] {r.name}: {r.detail} ({r.seconds:.1f}s)"
