"""Exhaustive generation of grafted and exotic forests by size.

Sizes are handled internally in half-units (``units = 2 * size``): a black
vertex is 2 units, a grafted vertex or liana end is 1 unit.
"""

from __future__ import annotations

import os
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterator, List, Sequence, Tuple

from .forest import Forest, GRAFTED, canonicalize_raw, is_liana
from .text import parse

FAMILIES = ("grafted_trees", "grafted_forests", "exotic_trees", "exotic_forests")

DEFAULT_MAX_SIZE = 4


class SizeBoundExceeded(ValueError):
    pass


def size_bound() -> Fraction:
    return Fraction(os.environ.get("EXOTIC_MAX_SIZE", DEFAULT_MAX_SIZE))


def check_bound(size, bound=None) -> None:
    bound = size_bound() if bound is None else Fraction(bound)
    if Fraction(size) > bound:
        raise SizeBoundExceeded(f"size {size} exceeds the configured bound {bound}")


# ---------------------------------------------------------------------------
# string-level generation of grafted components
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def rooted_trees(units: int) -> Tuple[str, ...]:
    """Canonical strings of rooted grafted trees (black/grafted vertices) of ``units``."""
    out = []
    if units == 1:
        out.append(GRAFTED)
    if units >= 2:
        for kids in tree_multisets(units - 2):
            out.append("b" + ("[" + ",".join(sorted(kids)) + "]" if kids else ""))
    return tuple(sorted(out))


def _all_trees_upto(units: int) -> List[Tuple[int, str]]:
    return [(u, t) for u in range(1, units + 1) for t in rooted_trees(u)]


@lru_cache(maxsize=None)
def tree_multisets(units: int) -> Tuple[Tuple[str, ...], ...]:
    """Multisets of rooted trees with total ``units``."""
    pool = _all_trees_upto(units)
    out: List[Tuple[str, ...]] = []

    def rec(start: int, left: int, acc: List[str]) -> None:
        if left == 0:
            out.append(tuple(acc))
            return
        for i in range(start, len(pool)):
            u, t = pool[i]
            if u <= left:
                acc.append(t)
                rec(i, left - u, acc)
                acc.pop()

    rec(0, units, [])
    return tuple(out)


@lru_cache(maxsize=None)
def aromas(units: int) -> Tuple[str, ...]:
    """Canonical strings of single aromas: cycles of black-rooted trees."""
    black = [(u, t) for u, t in _all_trees_upto(units) if t.startswith("b")]
    found = set()

    def rec(left: int, seq: List[str]) -> None:
        if left == 0 and seq:
            found.add(min("(" + ",".join(seq[r:] + seq[:r]) + ")" for r in range(len(seq))))
            return
        for u, t in black:
            if u <= left:
                seq.append(t)
                rec(left - u, seq)
                seq.pop()

    rec(units, [])
    return tuple(sorted(found))


def _component_multisets(units: int, pool: Sequence[Tuple[int, str]]) -> Iterator[Tuple[str, ...]]:
    def rec(start: int, left: int, acc: List[str]) -> Iterator[Tuple[str, ...]]:
        if left == 0:
            yield tuple(acc)
            return
        for i in range(start, len(pool)):
            u, t = pool[i]
            if u <= left:
                acc.append(t)
                yield from rec(i, left - u, acc)
                acc.pop()

    yield from rec(0, units, [])


@lru_cache(maxsize=None)
def grafted_forests_units(units: int, trees_only: bool, aroma_free: bool) -> Tuple[Forest, ...]:
    """All grafted forests of exactly ``units``.

    ``trees_only`` restricts to a single rooted component plus at most one
    aroma, which is the convention of the tree tables.
    """
    if units == 0:
        return ()
    out = set()
    tree_pool = _all_trees_upto(units)
    aroma_pool = [] if aroma_free else [(u, a) for u in range(2, units + 1) for a in aromas(u)]
    if trees_only:
        for u, t in tree_pool:
            if u == units:
                out.add(parse(t))
            for ua, a in aroma_pool:
                if u + ua == units:
                    out.add(parse(a + "," + t))
    else:
        for ut in range(1, units + 1):
            for ts in _component_multisets(ut, tree_pool):
                rest = units - ut
                if rest == 0:
                    out.add(parse(",".join(ts)))
                    continue
                for aset in _component_multisets(rest, aroma_pool):
                    out.add(parse(",".join(aset + ts)))
    return tuple(sorted(out, key=lambda f: f.key))


# ---------------------------------------------------------------------------
# pairings: grafted -> exotic
# ---------------------------------------------------------------------------

def perfect_matchings(items: Sequence[int]) -> Iterator[List[Tuple[int, int]]]:
    """All perfect matchings of an even-sized list."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for i, other in enumerate(rest):
        for m in perfect_matchings(rest[:i] + rest[i + 1:]):
            yield [(first, other)] + m


def pairings(forest: Forest) -> Iterator[Forest]:
    """Every exotic forest obtained by pairing the grafted vertices (with repetition)."""
    xs = [v for v, d in enumerate(forest.deco) if d == GRAFTED]
    if len(xs) % 2:
        return
    for m in perfect_matchings(xs):
        deco = list(forest.deco)
        for k, (a, b) in enumerate(m, start=1):
            deco[a] = deco[b] = k
        yield canonicalize_raw(forest.parent, deco)


@lru_cache(maxsize=None)
def exotic_forests_units(units: int, trees_only: bool, aroma_free: bool) -> Tuple[Forest, ...]:
    out = set()
    for g in grafted_forests_units(units, trees_only, aroma_free):
        if g.count("x") % 2 == 0:
            out.update(pairings(g))
    return tuple(sorted(out, key=lambda f: f.key))


# ---------------------------------------------------------------------------
# public API
# ---------------------------------------------------------------------------

def forests_of_size(size, family: str, aroma_free: bool = False) -> Tuple[Forest, ...]:
    """All forests of one exact size in a family, sorted by canonical key."""
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")
    units = Fraction(size) * 2
    if units.denominator != 1:
        raise ValueError(f"size {size} is not a multiple of 1/2")
    units = int(units)
    trees_only = family.endswith("_trees")
    if family.startswith("grafted"):
        return grafted_forests_units(units, trees_only, aroma_free)
    if units % 2:
        return ()
    return exotic_forests_units(units, trees_only, aroma_free)


def enumerate_forests(max_size, family: str, aroma_free: bool = False, bound=None) -> List[Forest]:
    """Complete, duplicate-free list of a family up to ``max_size``.

    Ordered by size, then canonical key.  The empty forest is not included.
    """
    check_bound(max_size, bound)
    step = Fraction(1, 2) if family.startswith("grafted") else Fraction(1)
    out: List[Forest] = []
    s = step
    while s <= Fraction(max_size):
        out.extend(forests_of_size(s, family, aroma_free))
        s += step
    return out


def counts_by_size(max_size, family: str, aroma_free: bool = False) -> Dict[Fraction, int]:
    out: Dict[Fraction, int] = {}
    for f in enumerate_forests(max_size, family, aroma_free):
        out[f.size] = out.get(f.size, 0) + 1
    return out


def family_of(*forests: Forest) -> str:
    """Forest family spanned by the operands: exotic if any liana occurs."""
    if any(is_liana(d) for f in forests for d in f.deco):
        return "exotic_forests"
    return "grafted_forests"
