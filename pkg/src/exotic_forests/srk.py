"""Stochastic Runge-Kutta tableaus and their elementary weights.

For a tableau ``(b, a, d)`` with ``s`` stages the weight of an aroma-free
grafted forest is a sum over stage assignments of the black vertices:

* a black root with stage ``i`` contributes ``b_i``,
* a black vertex with stage ``j`` whose parent has stage ``i`` contributes ``a_ij``,
* a grafted leaf whose parent has stage ``i`` contributes ``d_i``,
* a grafted root contributes ``1``.

Forests with an aroma have weight 0.  Exotic forests are first sent through
``forget_lianas``.  Grafted vertices carry no stage index of their own.
"""

from __future__ import annotations

import itertools
import json
import random
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .algebra import as_fraction, format_fraction
from .forest import BLACK, GRAFTED, Forest, split_components
from .stochastic import forget_lianas
from .text import parse, to_forest


class DimensionMismatch(ValueError):
    pass


class Tableau:
    """Explicit sRK coefficients for a single noise."""

    def __init__(self, b: Sequence, a: Sequence[Sequence], d: Sequence, name: str = ""):
        self.b = [as_fraction(x) for x in b]
        self.a = [[as_fraction(x) for x in row] for row in a]
        self.d = [as_fraction(x) for x in d]
        self.name = name
        s = len(self.b)
        if s < 1:
            raise DimensionMismatch("a tableau needs at least one stage")
        if len(self.d) != s or len(self.a) != s or any(len(row) != s for row in self.a):
            raise DimensionMismatch(
                f"inconsistent stage counts: b has {s}, d has {len(self.d)}, "
                f"a is {len(self.a)}x{[len(r) for r in self.a]}"
            )

    @property
    def s(self) -> int:
        return len(self.b)

    @classmethod
    def from_json(cls, data) -> "Tableau":
        if isinstance(data, str):
            data = json.loads(data)
        t = cls(data["b"], data["a"], data["d"], name=data.get("name", ""))
        if "s" in data and int(data["s"]) != t.s:
            raise DimensionMismatch(f"declared s={data['s']} but the vectors have {t.s} stages")
        return t

    def to_json_obj(self) -> dict:
        return {
            "s": self.s,
            "b": [format_fraction(x) for x in self.b],
            "a": [[format_fraction(x) for x in row] for row in self.a],
            "d": [format_fraction(x) for x in self.d],
        }

    def __repr__(self) -> str:
        return f"Tableau({self.name or 's=%d' % self.s})"


def euler_maruyama() -> Tableau:
    return Tableau([1], [[0]], [0], name="Euler-Maruyama")


def random_tableau(s: int, rng: random.Random, denominator: int = 7) -> Tableau:
    """Tableau with random small rationals; used by the property suites."""

    def q() -> Fraction:
        return Fraction(rng.randint(-denominator, denominator), rng.randint(1, denominator))

    return Tableau([q() for _ in range(s)], [[q() for _ in range(s)] for _ in range(s)], [q() for _ in range(s)])


# ---------------------------------------------------------------------------
# numeric weights
# ---------------------------------------------------------------------------

def _grafted(forest) -> Forest:
    return forget_lianas(to_forest(forest))


def elementary_weight(forest, tab: Tableau) -> Fraction:
    """a(π) by the factorized recursion over subtrees."""
    f = _grafted(forest)
    if not f.is_aroma_free():
        return Fraction(0)
    ch = f.children

    def below(v: int, i: int) -> Fraction:
        out = Fraction(1)
        for c in ch[v]:
            if f.deco[c] == GRAFTED:
                out *= tab.d[i]
            else:
                out *= sum((tab.a[i][j] * below(c, j) for j in range(tab.s)), Fraction(0))
        return out

    total = Fraction(1)
    for r in f.roots:
        if f.deco[r] == BLACK:
            total *= sum((tab.b[i] * below(r, i) for i in range(tab.s)), Fraction(0))
    return total


def elementary_weight_bruteforce(forest, tab: Tableau) -> Fraction:
    """a(π) by the literal sum over all stage assignments of the black vertices."""
    f = _grafted(forest)
    if not f.is_aroma_free():
        return Fraction(0)
    black = [v for v, d in enumerate(f.deco) if d == BLACK]
    total = Fraction(0)
    for stages in itertools.product(range(tab.s), repeat=len(black)):
        st = dict(zip(black, stages))
        term = Fraction(1)
        for v in range(f.n):
            p = f.parent[v]
            if f.deco[v] == BLACK:
                term *= tab.b[st[v]] if p is None else tab.a[st[p]][st[v]]
            elif p is not None:
                term *= tab.d[st[p]]
        total += term
    return total


# ---------------------------------------------------------------------------
# symbolic weights
# ---------------------------------------------------------------------------

Monomial = Tuple[str, ...]


def weight_symbol(forest) -> Optional[Monomial]:
    """Canonical monomial of a(π): sorted keys of the black-rooted trees of Φ(π).

    Grafted roots contribute 1 and are dropped; ``None`` marks a forest with
    an aroma, whose weight vanishes.
    """
    f = _grafted(forest)
    if not f.is_aroma_free():
        return None
    return tuple(sorted(c.key for c in split_components(f) if c.key != GRAFTED))


class WeightPolynomial:
    """Rational combination of weight monomials (the empty monomial is the constant 1)."""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Dict[Monomial, Fraction]] = None):
        self.terms: Dict[Monomial, Fraction] = {}
        for m, c in (terms or {}).items():
            self.add(m, c)

    @classmethod
    def of_forest(cls, forest, coeff=1) -> "WeightPolynomial":
        m = weight_symbol(forest)
        return cls() if m is None else cls({m: as_fraction(coeff)})

    def add(self, m: Monomial, c) -> None:
        c = as_fraction(c)
        m = tuple(sorted(m))
        new = self.terms.get(m, Fraction(0)) + c
        if new:
            self.terms[m] = new
        else:
            self.terms.pop(m, None)

    def __add__(self, other: "WeightPolynomial") -> "WeightPolynomial":
        out = WeightPolynomial(dict(self.terms))
        for m, c in other.terms.items():
            out.add(m, c)
        return out

    def __sub__(self, other: "WeightPolynomial") -> "WeightPolynomial":
        return self + other.scale(-1)

    def scale(self, k) -> "WeightPolynomial":
        k = as_fraction(k)
        return WeightPolynomial({m: c * k for m, c in self.terms.items()})

    def __mul__(self, other: "WeightPolynomial") -> "WeightPolynomial":
        out = WeightPolynomial()
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                out.add(m1 + m2, c1 * c2)
        return out

    def __eq__(self, other: object) -> bool:
        return isinstance(other, WeightPolynomial) and self.terms == other.terms

    def __hash__(self):
        raise TypeError("WeightPolynomial is not hashable")

    def evaluate(self, tab: Tableau) -> Fraction:
        cache: Dict[str, Fraction] = {}
        total = Fraction(0)
        for m, c in self.terms.items():
            term = c
            for key in m:
                if key not in cache:
                    cache[key] = elementary_weight(parse(key), tab)
                term *= cache[key]
            total += term
        return total

    def ordered_terms(self, lead: Optional[Monomial] = None) -> List[Tuple[Monomial, Fraction]]:
        """Display order: ``lead`` first, then the constant, then by weight and key."""

        def rank(m: Monomial):
            if lead is not None and m == lead:
                return (0, 0, ())
            if not m:
                return (1, 0, ())
            return (2, sum(parse(k).units for k in m), m)

        return sorted(self.terms.items(), key=lambda t: rank(t[0]))

    def render(self, lead: Optional[Monomial] = None, latex: bool = False) -> str:
        return render_polynomial(self.ordered_terms(lead), latex)

    def __str__(self) -> str:
        return self.render()

    def __repr__(self) -> str:
        return f"WeightPolynomial({self})"


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------

INDEX_LETTERS = "ijklmnpqrtuvw"
_SUPERSCRIPT = str.maketrans("0123456789", "⁰¹²³⁴⁵⁶⁷⁸⁹")
MINUS = "−"


def monomial_factors(m: Monomial) -> List[Tuple[str, str, int]]:
    """Factors ``(symbol, indices, power)`` of a monomial in display order.

    Trees are taken in descending key order; index letters are handed out in
    depth-first order.  At each vertex its ``d`` factor comes before the
    factors of its black children.
    """
    letters = iter(INDEX_LETTERS)
    out: List[Tuple[str, str, int]] = []
    for key in sorted(m, reverse=True):
        f = parse(key)
        ch = f.children

        def visit(v: int, me: str) -> None:
            n_x = sum(1 for c in ch[v] if f.deco[c] == GRAFTED)
            if n_x:
                out.append(("d", me, n_x))
            for c in sorted((c for c in ch[v] if f.deco[c] == BLACK), key=lambda c: c):
                nxt = next(letters)
                out.append(("a", me + nxt, 1))
                visit(c, nxt)

        root = f.roots[0]
        me = next(letters)
        out.append(("b", me, 1))
        visit(root, me)
    return out


def render_monomial(m: Monomial, latex: bool = False) -> str:
    if not m:
        return "1"
    parts = []
    for sym, idx, power in monomial_factors(m):
        if latex:
            parts.append(f"{sym}_{{{idx}}}" + (f"^{{{power}}}" if power > 1 else ""))
        else:
            parts.append(f"{sym}_{idx}" + (str(power).translate(_SUPERSCRIPT) if power > 1 else ""))
    return ("\\sum " if latex else "Σ ") + " ".join(parts)


def _render_coeff(c: Fraction, latex: bool) -> str:
    if latex and c.denominator != 1:
        return f"\\frac{{{c.numerator}}}{{{c.denominator}}}"
    return format_fraction(c)


def render_polynomial(terms: Iterable[Tuple[Monomial, Fraction]], latex: bool = False) -> str:
    minus = "-" if latex else MINUS
    pieces: List[str] = []
    for m, c in terms:
        mag = abs(c)
        if not m:
            body = _render_coeff(mag, latex)
        elif mag == 1:
            body = render_monomial(m, latex)
        else:
            body = _render_coeff(mag, latex) + " " + render_monomial(m, latex)
        if not pieces:
            pieces.append((minus + " " if c < 0 else "") + body)
        else:
            pieces.append((f"{minus} " if c < 0 else "+ ") + body)
    return " ".join(pieces) if pieces else "0"
