"""Reference tables for grafted/exotic trees and the order conditions up to order 3.

Forest strings use the package syntax (``x`` grafted, integers are liana
labels, parentheses mark aromas).  Condition rows are kept in the LaTeX
weight notation they are usually printed in and parsed on demand.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Dict, List, NamedTuple, Optional, Tuple

from .srk import Monomial, WeightPolynomial
from .text import parse


class TreeRow(NamedTuple):
    size: Fraction
    grafted: str
    sigma_grafted: int
    exotic: Optional[str]
    sigma_exotic: Optional[int]


def _rows(size: str, *entries) -> List[TreeRow]:
    out = []
    for e in entries:
        g, sg = e[0], e[1]
        ex, se = (e[2], e[3]) if len(e) > 2 else (None, None)
        out.append(TreeRow(Fraction(size), g, sg, ex, se))
    return out


TREES: List[TreeRow] = (
    _rows("1/2", ("x", 1))
    + _rows("1", ("b", 1, "b", 1))
    + _rows("3/2", ("b[x]", 1), ("(b),x", 1))
    + _rows("2", ("b[b]", 1, "b[b]", 1), ("b[x,x]", 2, "b[1,1]", 2), ("(b),b", 1, "(b),b", 1), ("(b[x]),x", 1, "(b[1]),1", 1))
    + _rows(
        "5/2",
        ("b[b,x]", 1), ("b[b[x]]", 1), ("b[x,x,x]", 6), ("(b[x]),b", 1),
        ("(b),b[x]", 1), ("(b[x,x]),x", 2), ("(b,b),x", 2), ("(b[b]),x", 1),
    )
    + _rows(
        "3",
        ("b[b[b]]", 1, "b[b[b]]", 1),
        ("b[b,b]", 2, "b[b,b]", 2),
        ("b[b,x,x]", 2, "b[b,1,1]", 2),
        ("b[b[x],x]", 1, "b[b[1],1]", 1),
        ("b[b[x,x]]", 2, "b[b[1,1]]", 2),
        ("b[x,x,x,x]", 24, "b[1,1,2,2]", 8),
        ("(b,b),b", 2, "(b,b),b", 2),
        ("(b[b]),b", 1, "(b[b]),b", 1),
        ("(b),b[b]", 1, "(b),b[b]", 1),
        ("(b[x,x]),b", 2, "(b[1,1]),b", 2),
        ("(b[x]),b[x]", 1, "(b[1]),b[1]", 1),
        ("(b),b[x,x]", 2, "(b),b[1,1]", 2),
        ("(b,b[x]),x", 1, "(b,b[1]),1", 1),
        ("(b[b,x]),x", 1, "(b[b,1]),1", 1),
        ("(b[b[x]]),x", 1, "(b[b[1]]),1", 1),
        ("(b[x,x,x]),x", 6, "(b[1,1,2]),2", 2),
    )
)

GRAFTED_TREE_COUNTS = {Fraction(1, 2): 1, Fraction(1): 1, Fraction(3, 2): 2, Fraction(2): 4, Fraction(5, 2): 8, Fraction(3): 16}
EXOTIC_TREE_COUNTS = {Fraction(1): 1, Fraction(2): 4, Fraction(3): 16}


class ConditionRow(NamedTuple):
    order: int
    target: str
    redundant: bool
    weights: str  # LaTeX sum of weight monomials
    sources: str  # the same condition as a combination of a(forest)


CONDITIONS: List[ConditionRow] = [
    ConditionRow(1, "b", False, r"\sum_{i=1}^s b_i - 1", r"a{(b)} - a{(1,1)}"),
    ConditionRow(
        2, "b[0,0]", False,
        r"\sum b_i d_i^2 - \frac{1}{2} + \sum b_i - 2 \sum b_i d_i",
        r"a{(b[0,0])} - \frac{1}{2} a{(0,0,1,1)} + a{(0,0,b)} - 2 a{(b[0],0)}",
    ),
    ConditionRow(
        2, "b[b]", False,
        r"\sum b_i a_{ij} - \frac{1}{2} + \sum b_i - 2 \sum b_i d_i",
        r"a{(b[b])} - \frac{1}{2} a{(0,0,1,1)} + a{(0,0,b)} - 2 a{(b[0],0)}",
    ),
    ConditionRow(
        2, "b,b", True,
        r"\sum b_i b_j + 1 - 2 \sum b_i",
        r"a{(b,b)} + a{(0,0,1,1)} - 2 a{(0,0,b)}",
    ),
    ConditionRow(
        3, "b[b,b]", False,
        r"- 4 \sum b_i d_i a_{ij} + \sum b_i + \sum b_i a_{ij} a_{ik} - 4 \sum b_i d_i - \frac{1}{3} + 4 \sum b_i d_i^2 + 2 \sum b_i a_{ij}",
        r"- 4 a{(b[0,b],0)} + a{(0,0,1,1,b)} + a{(b[b,b])} - 4 a{(b[1],0,0,1)} - \frac{1}{3}a{(0,0,1,1,2,2)} + 4 a{(b[0,1],0,1)} + 2 a{(b[b],0,0)}",
    ),
    ConditionRow(
        3, "b[b[b]]", False,
        r"2 \sum b_i d_i b_j + \frac{3}{2} \sum b_i - \sum b_i b_j - \sum b_i d_i b_j d_j + \sum b_i a_{ij} a_{jk} - 2 \sum b_i d_i - \frac{1}{2} + \sum b_i a_{ij} - 2 \sum b_i a_{ij} d_j",
        r"2 a{(b[0],0,b)} + \frac{3}{2} a{(0,0,1,1,b)} - a{(b,b,0,0)} - a{(b[0],b[0])} + a{(b[b[b]])} - 2 a{(b[1],0,0,1)} - \frac{1}{2}a{(0,0,1,1,2,2)} + a{(b[b],0,0)} - 2 a{(b[b[0]],0)}",
    ),
    ConditionRow(
        3, "b[0,0,b]", False,
        r"- 2 \sum b_i d_i a_{ij} + \sum b_i + \sum b_i d_i^2 a_{ij} - 4 \sum b_i d_i - \frac{1}{3} + 5 \sum b_i d_i^2 - 2 \sum b_i d_i^3 + \sum b_i a_{ij}",
        r"- 2 a{(b[0,b],0)} + a{(0,0,1,1,b)} + a{(b[0,0,b])} - 4 a{(b[1],0,0,1)} + a{(b[1,1],0,0)} - \frac{1}{3}a{(0,0,1,1,2,2)} + 4 a{(b[0,1],0,1)} - 2 a{(b[0,1,1],0)} + a{(b[b],0,0)}",
    ),
    ConditionRow(
        3, "b[b[0],0]", False,
        r"\sum b_i d_i b_j - \sum b_i d_i a_{ij} + \sum b_i - \frac{1}{2} \sum b_i b_j - \frac{1}{2} \sum b_i d_i b_j d_j - 2 \sum b_i d_i - \frac{1}{3} + \sum b_i d_i^2 + \sum b_i a_{ij} - \sum b_i a_{ij} d_j + \sum b_i d_i a_{ij} d_j",
        r"a{(b[0],0,b)} - a{(b[0,b],0)} + a{(0,0,1,1,b)} - \frac{1}{2}a{(b,b,0,0)} - \frac{1}{2}a{(b[0],b[0])} - 2 a{(b[1],0,0,1)} - \frac{1}{3}a{(0,0,1,1,2,2)} + a{(b[0,1],0,1)} + a{(b[b],0,0)} - a{(b[b[0]],0)} + a{(b[b[0],0])}",
    ),
    ConditionRow(
        3, "b[b[0,0]]", False,
        r"2 \sum b_i d_i b_j + \frac{3}{2} \sum b_i - \sum b_i b_j - \sum b_i d_i b_j d_j - 2 \sum b_i d_i - \frac{1}{2} + \sum b_i a_{ij} - 2 \sum b_i a_{ij} d_j + \sum b_i a_{ij} d_j^2",
        r"2 a{(b[0],0,b)} + \frac{3}{2} a{(0,0,1,1,b)} - a{(b,b,0,0)} - a{(b[0],b[0])} - 2 a{(b[1],0,0,1)} - \frac{1}{2}a{(0,0,1,1,2,2)} + a{(b[b],0,0)} - 2 a{(b[b[0]],0)} + a{(b[b[0,0]])}",
    ),
    ConditionRow(
        3, "b[0,0,1,1]", False,
        r"\sum b_i - 4 \sum b_i d_i + 6 \sum b_i d_i^2 - \frac{1}{3} - 4 \sum b_i d_i^3 + \sum b_i d_i^4",
        r"a{(0,0,1,1,b)} - 4 a{(b[1],0,0,1)} + 2 a{(b[1,1],0,0)} - \frac{1}{3} a{(0,0,1,1,2,2)} + 4 a{(b[0,1],0,1)} - 4 a{(b[0,1,1],0)} + a{(b[0,0,1,1])}",
    ),
    ConditionRow(
        3, "b,b,b", True,
        r"\sum b_i b_j b_k + 3 \sum b_i - 3 \sum b_i b_j - 1",
        r"a{(b,b,b)} + 3 a{(0,0,1,1,b)} - 3 a{(b,b,0,0)} - a{(0,0,1,1,2,2)}",
    ),
    ConditionRow(
        3, "b[b],b", True,
        # "b_i a_ij b_j" would reuse j for the second tree; the independent index is b_k
        r"\sum b_i a_{ij} b_k - 2 \sum b_i d_i b_j - \frac{3}{2} \sum b_i + \sum b_i b_j + 2 \sum b_i d_i - \sum b_i a_{ij} + \frac{1}{2}",
        r"a{(b[b],b)} - 2 a{(b[0],0,b)} - \frac{3}{2} a{(0,0,1,1,b)} + a{(b,b,0,0)} + 2 a{(b[1],0,0,1)} - a{(b[b],0,0)} + \frac{1}{2}a{(0,0,1,1,2,2)}",
    ),
    ConditionRow(
        3, "b[0,0],b", True,
        r"\sum b_i d_i^2 b_j - 2 \sum b_i d_i b_j - \frac{3}{2} \sum b_i + \sum b_i b_j + 2 \sum b_i d_i - \sum b_i d_i^2 + \frac{1}{2}",
        r"a{(b[0,0],b)} - 2 a{(b[0],0,b)} - \frac{3}{2} a{(0,0,1,1,b)} + a{(b,b,0,0)} + 2 a{(b[1],0,0,1)} - a{(b[1,1],0,0)} + \frac{1}{2}a{(0,0,1,1,2,2)}",
    ),
]


# ---------------------------------------------------------------------------
# parsing the LaTeX notation
# ---------------------------------------------------------------------------

_COEFF = re.compile(r"\\frac\{(\d+)\}\{(\d+)\}|(\d+)")
_FACTOR = re.compile(r"([bad])_\{?([a-z]+)\}?(?:\^\{?(\d+)\}?)?")


def _split_terms(text: str, term_re: str) -> List[Tuple[Fraction, str]]:
    text = text.replace(r"\sum_{i=1}^s", r"\sum").strip()
    out: List[Tuple[Fraction, str]] = []
    for m in re.finditer(r"([+-]?)\s*((?:\\frac\{\d+\}\{\d+\}|\d+)?)\s*(" + term_re + ")?", text):
        sign, coeff, body = m.group(1), m.group(2), m.group(3)
        if not coeff and not body:
            continue
        c = Fraction(1)
        if coeff:
            cm = _COEFF.fullmatch(coeff)
            c = Fraction(int(cm.group(1)), int(cm.group(2))) if cm.group(1) else Fraction(int(cm.group(3)))
        if sign == "-":
            c = -c
        out.append((c, body or ""))
    return out


def monomial_from_latex(body: str) -> Monomial:
    """``\\sum b_i d_i a_{ij}`` -> canonical keys of the trees it encodes."""
    roots: List[str] = []
    kids: Dict[str, List[str]] = {}
    leaves: Dict[str, int] = {}
    for sym, idx, power in _FACTOR.findall(body):
        if sym == "b":
            roots.append(idx)
        elif sym == "a":
            kids.setdefault(idx[0], []).append(idx[1])
        else:
            leaves[idx] = leaves.get(idx, 0) + int(power or 1)

    def text(i: str) -> str:
        inner = ["x"] * leaves.get(i, 0) + [text(j) for j in kids.get(i, [])]
        return "b" + (f"[{','.join(inner)}]" if inner else "")

    return tuple(sorted(parse(text(r)).key for r in roots))


def weights_from_latex(text: str) -> WeightPolynomial:
    out = WeightPolynomial()
    for c, body in _split_terms(text, r"\\sum(?:\s*[bad]_\{?[a-z]+\}?(?:\^\{?\d+\}?)?)+"):
        out.add(monomial_from_latex(body) if body else (), c)
    return out


def sources_from_latex(text: str) -> Dict[str, Fraction]:
    """``a{(b[0],0)} - ...`` -> {canonical source key: coefficient}."""
    out: Dict[str, Fraction] = {}
    for c, body in _split_terms(text, r"a\{\([^)]*(?:\)[^)]*)*?\)\}"):
        key = parse(body[3:-2]).key
        out[key] = out.get(key, Fraction(0)) + c
    return {k: v for k, v in out.items() if v}
