"""Linear combinations of forests and the operations on them.

Products implemented here:

* ``graft``       the pre-Lie grafting product extended to forests,
* ``ck_coproduct`` the Connes-Kreimer coproduct,
* ``dual_ck``     its dual product,
* ``gl_product``  the Grossman-Larson product (composition of operators),
* ``a_sigma``     the diagonal map multiplying each forest by its symmetry.

All coefficients are exact :class:`fractions.Fraction` values.
"""

from __future__ import annotations

import itertools
import json
from fractions import Fraction
from typing import Callable, Dict, Iterable, Iterator, List, Mapping, Optional, Tuple, Union

from .enumeration import check_bound, enumerate_forests
from .forest import (
    BLACK,
    EMPTY,
    Forest,
    canonicalize_raw,
    disjoint_union,
    sigma,
)
from .text import parse, to_forest

Number = Union[int, Fraction]
ForestLike = Union[Forest, str]


def as_fraction(value) -> Fraction:
    """Exact rational from int, Fraction or a ``"p/q"`` string."""
    if isinstance(value, float):
        raise TypeError("floating point coefficients are not allowed")
    return Fraction(value)


def format_fraction(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


# ---------------------------------------------------------------------------
# formal sums
# ---------------------------------------------------------------------------

class FormalSum:
    """Finite linear combination of forests with rational coefficients.

    Zero coefficients are never stored.  Instances are treated as immutable
    once built; the arithmetic operators return new sums.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Optional[Iterable[Tuple[ForestLike, Number]]] = None):
        self._terms: Dict[str, Tuple[Forest, Fraction]] = {}
        for f, c in terms or ():
            self._add(to_forest(f), as_fraction(c))

    @classmethod
    def of(cls, forest: ForestLike, coeff: Number = 1) -> "FormalSum":
        return cls([(forest, coeff)])

    @classmethod
    def unit(cls) -> "FormalSum":
        return cls.of(EMPTY)

    def _add(self, f: Forest, c: Fraction) -> None:
        if not c:
            return
        old = self._terms.get(f.key)
        new = c if old is None else old[1] + c
        if new:
            self._terms[f.key] = (f, new)
        else:
            del self._terms[f.key]

    # -- access ---------------------------------------------------------------
    def coeff(self, forest: ForestLike) -> Fraction:
        f = to_forest(forest)
        t = self._terms.get(f.key)
        return t[1] if t else Fraction(0)

    def items(self) -> List[Tuple[Forest, Fraction]]:
        """Terms ordered by size then canonical key."""
        return sorted(self._terms.values(), key=lambda t: (t[0].units, t[0].key))

    def forests(self) -> List[Forest]:
        return [f for f, _ in self.items()]

    def __iter__(self) -> Iterator[Tuple[Forest, Fraction]]:
        return iter(self.items())

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def grade(self, size) -> "FormalSum":
        units = int(Fraction(size) * 2)
        return FormalSum((f, c) for f, c in self._terms.values() if f.units == units)

    def truncate(self, max_size) -> "FormalSum":
        units = Fraction(max_size) * 2
        return FormalSum((f, c) for f, c in self._terms.values() if f.units <= units)

    # -- arithmetic -----------------------------------------------------------
    def __add__(self, other: "FormalSum") -> "FormalSum":
        out = FormalSum()
        out._terms = dict(self._terms)
        for f, c in other._terms.values():
            out._add(f, c)
        return out

    def __neg__(self) -> "FormalSum":
        return self.scale(-1)

    def __sub__(self, other: "FormalSum") -> "FormalSum":
        return self + (-other)

    def scale(self, k: Number) -> "FormalSum":
        k = as_fraction(k)
        return FormalSum((f, c * k) for f, c in self._terms.values())

    def __mul__(self, k: Number) -> "FormalSum":
        return self.scale(k)

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FormalSum):
            return NotImplemented
        return {k: c for k, (_, c) in self._terms.items()} == {k: c for k, (_, c) in other._terms.items()}

    def __hash__(self):
        raise TypeError("FormalSum is not hashable")

    def map_linear(self, fn: Callable[[Forest], "FormalSum"]) -> "FormalSum":
        out = FormalSum()
        for f, c in self._terms.values():
            for g, d in fn(f)._terms.values():
                out._add(g, c * d)
        return out

    def concat(self, other: "FormalSum") -> "FormalSum":
        """Bilinear concatenation product."""
        out = FormalSum()
        for f, c in self._terms.values():
            for g, d in other._terms.values():
                out._add(f * g, c * d)
        return out

    # -- serialization -------------------------------------------------------
    def to_json_obj(self) -> List[dict]:
        return [{"forest": f.key, "coeff": format_fraction(c)} for f, c in self.items()]

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())

    @classmethod
    def from_json(cls, data) -> "FormalSum":
        if isinstance(data, str):
            data = json.loads(data)
        return cls((parse(t["forest"]), as_fraction(t["coeff"])) for t in data)

    def __repr__(self) -> str:
        return f"FormalSum({self})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for f, c in self.items():
            name = f.key or "1"
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            body = name if mag == 1 else f"{format_fraction(mag)}*({name})"
            parts.append((sign, body))
        s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            s += f" {sign} {body}"
        return s


def to_sum(obj) -> FormalSum:
    if isinstance(obj, FormalSum):
        return obj
    return FormalSum.of(to_forest(obj))


class TensorSum:
    """Linear combination of ordered pairs of forests."""

    __slots__ = ("_terms",)

    def __init__(self):
        self._terms: Dict[Tuple[str, str], Tuple[Forest, Forest, Fraction]] = {}

    def add(self, left: Forest, right: Forest, c: Number = 1) -> None:
        c = as_fraction(c)
        key = (left.key, right.key)
        old = self._terms.get(key)
        new = c if old is None else old[2] + c
        if new:
            self._terms[key] = (left, right, new)
        else:
            self._terms.pop(key, None)

    def coeff(self, left: ForestLike, right: ForestLike) -> Fraction:
        t = self._terms.get((to_forest(left).key, to_forest(right).key))
        return t[2] if t else Fraction(0)

    def items(self) -> List[Tuple[Forest, Forest, Fraction]]:
        return sorted(self._terms.values(), key=lambda t: (t[1].units, t[1].key, t[0].key))

    def __iter__(self):
        return iter(self.items())

    def __len__(self) -> int:
        return len(self._terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TensorSum):
            return NotImplemented
        return {k: t[2] for k, t in self._terms.items()} == {k: t[2] for k, t in other._terms.items()}

    def to_json_obj(self) -> List[dict]:
        return [
            {"left": l.key, "right": r.key, "coeff": format_fraction(c)} for l, r, c in self.items()
        ]

    def __str__(self) -> str:
        return " + ".join(
            f"{'' if c == 1 else format_fraction(c) + '*'}{l.key or '1'} (x) {r.key or '1'}" for l, r, c in self.items()
        )


# ---------------------------------------------------------------------------
# coefficient maps
# ---------------------------------------------------------------------------

class CoefficientMap:
    """A rational-valued function on forests, backed by a table or a rule.

    Lookups go through the canonical key, so isomorphic inputs agree.  A
    table-backed map is zero off its table.
    """

    def __init__(self, rule: Union[Callable[[Forest], Number], Mapping[ForestLike, Number]], name: str = ""):
        if callable(rule):
            self._rule = rule
            self._table = None
        else:
            self._table = {to_forest(k).key: as_fraction(v) for k, v in rule.items()}
            self._rule = None
        self.name = name
        self._cache: Dict[str, Fraction] = {}

    def __call__(self, forest: ForestLike) -> Fraction:
        f = to_forest(forest)
        if self._table is not None:
            return self._table.get(f.key, Fraction(0))
        v = self._cache.get(f.key)
        if v is None:
            v = as_fraction(self._rule(f))  # type: ignore[misc]
            self._cache[f.key] = v
        return v

    @classmethod
    def constant(cls, value: Number = 1) -> "CoefficientMap":
        return cls(lambda f: value, name=f"const({value})")

    @classmethod
    def zero(cls) -> "CoefficientMap":
        return cls(lambda f: 0, name="zero")

    @classmethod
    def counit(cls) -> "CoefficientMap":
        return cls(lambda f: 1 if f.n == 0 else 0, name="counit")

    def __repr__(self) -> str:
        return f"CoefficientMap({self.name or 'anonymous'})"


# ---------------------------------------------------------------------------
# grafting and the Grossman-Larson product
# ---------------------------------------------------------------------------

def _attachments(left: Forest, right: Forest, allow_stay: bool) -> Iterator[Forest]:
    """Forests obtained by sending each tree root of ``left`` onto a black
    vertex of ``right`` (or leaving it as a root when ``allow_stay``).

    Aromas of ``left`` are carried along by concatenation.
    """
    parent, deco, (_, off) = disjoint_union(left, right)
    roots = left.roots
    targets: List[Optional[int]] = [off + v for v, d in enumerate(right.deco) if d == BLACK]
    if allow_stay:
        targets = [None] + targets
    for choice in itertools.product(targets, repeat=len(roots)):
        p = list(parent)
        for r, t in zip(roots, choice):
            p[r] = t
        yield canonicalize_raw(p, deco)


def _graft_forests(left: Forest, right: Forest) -> FormalSum:
    if left.n == 0:
        return FormalSum.of(right)
    out = FormalSum()
    for f in _attachments(left, right, allow_stay=False):
        out._add(f, Fraction(1))
    return out


def graft(x, y) -> FormalSum:
    """Bilinear grafting ``x ↷ y``.

    Every tree of a left forest is attached to a vertex of the right operand,
    independently of the others; attachments to grafted or liana vertices
    vanish.  Aromas on the left are scalar factors and are concatenated.
    ``1 ↷ y = y`` and ``t ↷ 1 = 0``.
    """
    xs, ys = to_sum(x), to_sum(y)
    out = FormalSum()
    for f, c in xs:
        for g, d in ys:
            for h, e in _graft_forests(f, g):
                out._add(h, c * d * e)
    return out


def _gl_direct_forests(left: Forest, right: Forest) -> FormalSum:
    out = FormalSum()
    for f in _attachments(left, right, allow_stay=True):
        out._add(f, Fraction(1))
    return out


def gl_product_direct(x, y) -> FormalSum:
    """Grossman-Larson product as a labelled sum: each tree of the left forest
    either concatenates or attaches its root to any vertex of the right one."""
    xs, ys = to_sum(x), to_sum(y)
    out = FormalSum()
    for f, c in xs:
        for g, d in ys:
            for h, e in _gl_direct_forests(f, g):
                out._add(h, c * d * e)
    return out


# ---------------------------------------------------------------------------
# Connes-Kreimer coproduct and its dual
# ---------------------------------------------------------------------------

_CK_CACHE: Dict[str, TensorSum] = {}


def _admissible_cuts(forest: Forest) -> Iterator[Tuple[List[int], List[int]]]:
    n = forest.n
    parent = forest.parent
    pairs = forest.liana_pairs()
    for mask in range(1 << n):
        inside = [(mask >> v) & 1 for v in range(n)]
        if any(inside[v] and parent[v] is not None and not inside[parent[v]] for v in range(n)):
            continue
        if any(inside[a] != inside[b] for a, b in pairs):
            continue
        keep = [v for v in range(n) if inside[v]]
        rest = [v for v in range(n) if not inside[v]]
        if keep and not any(parent[v] is None for v in keep):
            continue
        if rest and not any(parent[v] is None or inside[parent[v]] for v in rest):
            continue
        yield rest, keep


def _restrict(forest: Forest, vertices: List[int]) -> Forest:
    idx = {v: i for i, v in enumerate(vertices)}
    return canonicalize_raw(
        [idx.get(forest.parent[v]) if forest.parent[v] is not None else None for v in vertices],  # type: ignore[arg-type]
        [forest.deco[v] for v in vertices],
    )


def ck_coproduct(forest: ForestLike) -> TensorSum:
    """Connes-Kreimer coproduct ``Σ (π \\ π0) ⊗ π0``.

    ``π0`` ranges over vertex subsets closed under taking parents.  Both
    factors must be empty or contain a tree root, and the two ends of a
    liana are never separated.
    """
    f = to_forest(forest)
    cached = _CK_CACHE.get(f.key)
    if cached is not None:
        return cached
    out = TensorSum()
    for rest, keep in _admissible_cuts(f):
        out.add(_restrict(f, rest), _restrict(f, keep), 1)
    _CK_CACHE[f.key] = out
    return out


def ck_coproduct_sum(x) -> TensorSum:
    out = TensorSum()
    for f, c in to_sum(x):
        for l, r, d in ck_coproduct(f):
            out.add(l, r, c * d)
    return out


def _dual_ck_forests(left: Forest, right: Forest, bound=None) -> FormalSum:
    check_bound(left.size + right.size, bound)
    # Any forest whose coproduct contains left ⊗ right arises by reattaching
    # the roots of ``left`` that were cut off ``right``.
    candidates = set(_attachments(left, right, allow_stay=True))
    out = FormalSum()
    for cand in sorted(candidates, key=lambda f: f.key):
        out._add(cand, ck_coproduct(cand).coeff(left, right))
    return out


def dual_ck(x, y, bound=None) -> FormalSum:
    """Product ``x ⊛ y`` dual to the Connes-Kreimer coproduct."""
    xs, ys = to_sum(x), to_sum(y)
    out = FormalSum()
    for f, c in xs:
        for g, d in ys:
            for h, e in _dual_ck_forests(f, g, bound):
                out._add(h, c * d * e)
    return out


def dual_ck_by_enumeration(left: ForestLike, right: ForestLike, family: str, aroma_free: bool = False) -> FormalSum:
    """Reference ``⊛`` scanning a whole enumerated family of the target size."""
    from .enumeration import forests_of_size

    l, r = to_forest(left), to_forest(right)
    out = FormalSum()
    for cand in forests_of_size(l.size + r.size, family, aroma_free):
        out._add(cand, ck_coproduct(cand).coeff(l, r))
    return out


def a_sigma(x) -> FormalSum:
    """``A_σ``: multiply every forest by its symmetry coefficient."""
    return FormalSum((f, c * sigma(f)) for f, c in to_sum(x))


def a_sigma_inv(x) -> FormalSum:
    return FormalSum((f, c / sigma(f)) for f, c in to_sum(x))


def gl_product(x, y, bound=None) -> FormalSum:
    """Grossman-Larson product ``x ⋄ y = A_σ⁻¹(A_σ x ⊛ A_σ y)``."""
    return a_sigma_inv(dual_ck(a_sigma(x), a_sigma(y), bound))


# ---------------------------------------------------------------------------
# series maps
# ---------------------------------------------------------------------------

def delta_sigma(
    a: Callable[[Forest], Number],
    max_size,
    family: str = "exotic_forests",
    aroma_free: bool = True,
    include_unit: bool = False,
    bound=None,
) -> FormalSum:
    """``δ_σ(a) = Σ a(π)/σ(π) π`` over an enumerated family up to ``max_size``."""
    check_bound(max_size, bound)
    out = FormalSum()
    if include_unit:
        out._add(EMPTY, as_fraction(a(EMPTY)))
    for f in enumerate_forests(max_size, family, aroma_free, bound):
        out._add(f, as_fraction(a(f)) / sigma(f))
    return out


def convolve(a: Callable[[Forest], Number], b: Callable[[Forest], Number]) -> CoefficientMap:
    """``a ∗ b = m ∘ (a ⊗ b) ∘ Δ_CK``."""

    def rule(f: Forest) -> Fraction:
        return sum(
            (c * as_fraction(a(l)) * as_fraction(b(r)) for l, r, c in ck_coproduct(f)),
            Fraction(0),
        )

    name = f"({getattr(a, 'name', 'a')} * {getattr(b, 'name', 'b')})"
    return CoefficientMap(rule, name=name)


# ---------------------------------------------------------------------------
# labelled forests
# ---------------------------------------------------------------------------

class LabeledForest:
    """A forest of black vertices carrying distinct integer labels.

    Stored as a frozen set of ``(label, parent_label)`` pairs; text form uses
    tokens ``t<k>``, e.g. ``t3[t1[t2],t4,t5]``.
    """

    __slots__ = ("edges",)

    def __init__(self, edges: Iterable[Tuple[int, Optional[int]]]):
        self.edges = frozenset(edges)

    @property
    def labels(self) -> frozenset:
        return frozenset(v for v, _ in self.edges)

    def parent_of(self) -> Dict[int, Optional[int]]:
        return dict(self.edges)

    @classmethod
    def parse(cls, text: str) -> "LabeledForest":
        s = "".join(text.split())
        i = 0
        edges: List[Tuple[int, Optional[int]]] = []

        def tree(par: Optional[int]) -> None:
            nonlocal i
            if not s.startswith("t", i):
                raise ValueError(f"expected 't' at position {i}")
            i += 1
            j = i
            while i < len(s) and s[i].isdigit():
                i += 1
            lab = int(s[j:i])
            edges.append((lab, par))
            if i < len(s) and s[i] == "[":
                i += 1
                tree(lab)
                while s[i] == ",":
                    i += 1
                    tree(lab)
                if s[i] != "]":
                    raise ValueError(f"expected ']' at position {i}")
                i += 1

        if s:
            tree(None)
            while i < len(s) and s[i] == ",":
                i += 1
                tree(None)
        if i != len(s):
            raise ValueError(f"trailing input at position {i}")
        labs = [v for v, _ in edges]
        if len(labs) != len(set(labs)):
            raise ValueError("labels must be distinct")
        return cls(edges)

    def __str__(self) -> str:
        par = self.parent_of()
        kids: Dict[Optional[int], List[int]] = {}
        for v, p in par.items():
            kids.setdefault(p, []).append(v)

        def tree(v: int) -> str:
            ch = sorted(kids.get(v, []))
            return f"t{v}" + ("[" + ",".join(tree(c) for c in ch) + "]" if ch else "")

        return ",".join(tree(r) for r in sorted(kids.get(None, [])))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, LabeledForest) and self.edges == other.edges

    def __hash__(self) -> int:
        return hash(self.edges)

    def __repr__(self) -> str:
        return f"LabeledForest({str(self)!r})"


LabeledSum = Dict[LabeledForest, int]


def _labeled_attachments(left: LabeledForest, right: LabeledForest) -> Iterator[LabeledForest]:
    lp = left.parent_of()
    roots = sorted(v for v, p in lp.items() if p is None)
    targets: List[Optional[int]] = [None] + sorted(right.labels)
    for choice in itertools.product(targets, repeat=len(roots)):
        new = dict(lp)
        new.update(zip(roots, choice))
        yield LabeledForest(set(new.items()) | set(right.edges))


def labeled_gl_product(left: LabeledForest, right: LabeledForest) -> LabeledSum:
    """``⋄`` on labelled forests; a repeated label lands in the ideal and gives 0."""
    if left.labels & right.labels:
        return {}
    out: LabeledSum = {}
    for f in _labeled_attachments(left, right):
        out[f] = out.get(f, 0) + 1
    return out


def labeled_ck_coproduct(forest: LabeledForest) -> Dict[Tuple[LabeledForest, LabeledForest], int]:
    par = forest.parent_of()
    labs = sorted(par)
    out: Dict[Tuple[LabeledForest, LabeledForest], int] = {}
    for mask in range(1 << len(labs)):
        keep = {labs[i] for i in range(len(labs)) if (mask >> i) & 1}
        if any(par[v] is not None and par[v] not in keep for v in keep):
            continue
        l = LabeledForest((v, par[v] if par[v] not in keep else None) for v in labs if v not in keep)
        r = LabeledForest((v, par[v]) for v in keep)
        out[(l, r)] = out.get((l, r), 0) + 1
    return out


def labeled_dual_ck(left: LabeledForest, right: LabeledForest) -> LabeledSum:
    """``⊛`` on labelled forests, read off the labelled coproduct."""
    if left.labels & right.labels:
        return {}
    out: LabeledSum = {}
    for cand in set(_labeled_attachments(left, right)):
        c = labeled_ck_coproduct(cand).get((left, right), 0)
        if c:
            out[cand] = c
    return out
