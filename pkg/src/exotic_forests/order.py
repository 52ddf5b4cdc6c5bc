"""Order conditions for invariant-measure sampling.

Exotic forests are rewritten by two integral-preserving moves until no liana
joins two different components:

* ELI (edge-liana inversion) moves one end of a liana one edge towards its
  root, transplanting the end's parent above the other end;
* IBP (integration by parts) removes a grafted root ``g`` with partner ``w``:
  ``g`` is attached under every black vertex with coefficient ``-1`` and a
  further term, where ``g`` is dropped and ``w`` turns black, gets ``-2``.

``run_algorithm1`` applies the moves recursively on a labelled working copy
and returns the linear map ``A`` together with the labelled chains.  The
conditions are ``ω(π̂) = Σ_π a(Φπ) σ(π̂)/σ(π) [π̂]A(π)`` over the targets
``π̂`` without connecting lianas.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .algebra import FormalSum, as_fraction, format_fraction
from .enumeration import check_bound, forests_of_size
from .forest import BLACK, Forest, canonicalize_raw, is_liana, liana_blocks, sigma
from .srk import DimensionMismatch, Tableau, WeightPolynomial, elementary_weight, weight_symbol
from .stochastic import forget_lianas
from .text import print_latex, to_forest

ELI_DIRECTIONS = ("shallow", "deep")


class NoConnectingLiana(ValueError):
    pass


class PreconditionViolated(ValueError):
    pass


# ---------------------------------------------------------------------------
# labelled working copies
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _Work:
    """Forest with stable vertex identities; ``rank`` is the vertex total order."""

    parent: Tuple[Optional[int], ...]
    deco: Tuple
    rank: Tuple[int, ...]

    @classmethod
    def of(cls, forest: Forest, order: Optional[Sequence[int]] = None) -> "_Work":
        order = list(range(forest.n)) if order is None else list(order)
        if sorted(order) != list(range(forest.n)):
            raise ValueError("order must be a permutation of the vertices")
        rank = [0] * forest.n
        for pos, v in enumerate(order):
            rank[v] = pos
        return cls(tuple(forest.parent), tuple(forest.deco), tuple(rank))

    def canonical(self) -> Forest:
        return canonicalize_raw(self.parent, self.deco)

    def anchor(self, v: int) -> Tuple[int, Optional[int]]:
        """(component representative, depth); depth is None inside an aroma."""
        seen = []
        u = v
        while self.parent[u] is not None:
            if u in seen:
                cyc = seen[seen.index(u):]
                return min(cyc), None
            seen.append(u)
            u = self.parent[u]  # type: ignore[assignment]
        return u, len(seen)

    def pairs(self) -> List[Tuple[int, int]]:
        ends: Dict[int, List[int]] = {}
        for v, d in enumerate(self.deco):
            if is_liana(d):
                ends.setdefault(d, []).append(v)
        return [tuple(e) for e in ends.values()]  # type: ignore[misc]

    def partner(self, v: int) -> int:
        return next(u for u, d in enumerate(self.deco) if d == self.deco[v] and u != v)


def _connecting(w: _Work) -> List[Tuple[int, int]]:
    return [(a, b) for a, b in w.pairs() if w.anchor(a)[0] != w.anchor(b)[0]]


_INF = float("inf")


def _depth(w: _Work, v: int) -> float:
    d = w.anchor(v)[1]
    return _INF if d is None else d


def _orient(w: _Work, a: int, b: int) -> Tuple[int, int]:
    """Shallow end first, ties by vertex order."""
    ka, kb = (_depth(w, a), w.rank[a]), (_depth(w, b), w.rank[b])
    return (a, b) if ka <= kb else (b, a)


def _minimal(w: _Work) -> Tuple[int, int]:
    conn = _connecting(w)
    if not conn:
        raise NoConnectingLiana("no connecting liana")
    best = min((_orient(w, a, b) for a, b in conn), key=lambda p: (_depth(w, p[0]), w.rank[p[0]], w.rank[p[1]]))
    if _depth(w, best[0]) == _INF:
        raise PreconditionViolated("both ends of every connecting liana lie in aromas")
    return best


def _eli(w: _Work, v1: int, v2: int) -> _Work:
    q = w.parent[v1]
    if q is None:
        raise PreconditionViolated(f"ELI needs a parent above vertex {v1}")
    if w.deco[v1] != w.deco[v2] or v1 == v2:
        raise PreconditionViolated("ELI needs the two ends of one liana")
    if w.anchor(v1)[0] == w.anchor(v2)[0]:
        raise PreconditionViolated("ELI needs a connecting liana")
    if w.anchor(v1)[1] is None:
        raise PreconditionViolated("ELI cannot move an end that lies in an aroma")
    p2 = w.parent[v2]
    if p2 is None:
        raise PreconditionViolated("ELI cannot transplant above a grafted root")
    parent = list(w.parent)
    parent[v1] = w.parent[q]
    parent[q] = p2
    parent[v2] = q
    return _Work(tuple(parent), w.deco, w.rank)


def _ibp(w: _Work, g: int) -> List[Tuple[str, Optional[int], Fraction, _Work]]:
    """Branches ``(kind, target, coefficient, forest)`` of an IBP on grafted root ``g``."""
    if w.parent[g] is not None or not is_liana(w.deco[g]):
        raise PreconditionViolated(f"IBP needs a grafted root, vertex {g} is not one")
    partner = w.partner(g)
    out = []
    for v in sorted(range(len(w.deco)), key=lambda u: w.rank[u]):
        if w.deco[v] == BLACK:
            parent = list(w.parent)
            parent[g] = v
            out.append(("IBP_v", v, Fraction(-1), _Work(tuple(parent), w.deco, w.rank)))
    keep = [u for u in range(len(w.deco)) if u != g]
    idx = {u: i for i, u in enumerate(keep)}
    parent2 = tuple(None if w.parent[u] is None else idx[w.parent[u]] for u in keep)  # type: ignore[index]
    deco2 = tuple(BLACK if u == partner else w.deco[u] for u in keep)
    rank2 = tuple(w.rank[u] for u in keep)
    out.append(("IBP_blacken", partner, Fraction(-2), _Work(parent2, deco2, rank2)))
    return out


# ---------------------------------------------------------------------------
# public single-step operations on canonical forests
# ---------------------------------------------------------------------------

def connecting_lianas(forest) -> List[Tuple[int, int]]:
    """Lianas whose ends lie in different components, as ordered vertex pairs."""
    w = _Work.of(to_forest(forest))
    return sorted(tuple(sorted(p)) for p in _connecting(w))  # type: ignore[misc]


def minimal_connecting_liana(forest, order: Optional[Sequence[int]] = None) -> Tuple[int, int]:
    """``(v1, v2)`` with ``v1`` the end closest to its root (ties by vertex order)."""
    return _minimal(_Work.of(to_forest(forest), order))


def eli_step(forest, liana: Tuple[int, int]) -> Forest:
    """Move end ``liana[0]`` one edge towards its root."""
    v1, v2 = liana
    return _eli(_Work.of(to_forest(forest)), v1, v2).canonical()


def ibp_step(forest, liana: Tuple[int, int]) -> FormalSum:
    """IBP on the liana whose first listed end is a grafted root."""
    f = to_forest(forest)
    g, w_ = liana
    if f.deco[g] != f.deco[w_] or g == w_:
        raise PreconditionViolated("IBP needs the two ends of one liana")
    out = FormalSum()
    for _, _, c, w in _ibp(_Work.of(f), g):
        out += FormalSum.of(w.canonical(), c)
    return out


# ---------------------------------------------------------------------------
# liana removal
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ChainStep:
    kind: str  # "ELI", "IBP_v" or "IBP_blacken"
    before: Forest
    after: Forest
    vertex: Optional[int] = None

    def to_json_obj(self) -> dict:
        d = {"kind": self.kind, "before": self.before.key, "after": self.after.key}
        if self.vertex is not None:
            d["vertex"] = self.vertex
        return d


@dataclass
class TransformationChain:
    start: Forest
    steps: List[ChainStep] = field(default_factory=list)
    coefficient: Fraction = Fraction(1)

    @property
    def final(self) -> Forest:
        return self.steps[-1].after if self.steps else self.start

    def expected_coefficient(self) -> Fraction:
        n_v = sum(1 for s in self.steps if s.kind == "IBP_v")
        n_b = sum(1 for s in self.steps if s.kind == "IBP_blacken")
        return Fraction((-1) ** n_v * (-2) ** n_b)

    def to_json_obj(self) -> dict:
        return {
            "start": self.start.key,
            "final": self.final.key,
            "coeff": format_fraction(self.coefficient),
            "steps": [s.to_json_obj() for s in self.steps],
        }


def _next_move(w: _Work, direction: str, sticky: Optional[int]) -> Tuple[str, int, int, Optional[int]]:
    """Choose ``(move, v1, v2, sticky)`` for the current working forest."""
    if direction == "deep" and sticky is not None:
        conn = [p for p in _connecting(w) if sticky in p]
        if conn:
            a, b = conn[0]
            other = b if a == sticky else a
            if w.parent[sticky] is None:
                return "IBP", sticky, other, None
            return "ELI", sticky, other, sticky
    v1, v2 = _minimal(w)
    if w.parent[v1] is None:
        return "IBP", v1, v2, None
    if direction == "deep" and _depth(w, v2) != _INF:
        deep, shallow = (v2, v1) if (_depth(w, v2), -w.rank[v2]) > (_depth(w, v1), -w.rank[v1]) else (v1, v2)
        return "ELI", deep, shallow, deep
    return "ELI", v1, v2, None


def _chains(w: _Work, direction: str, sticky: Optional[int], depth_guard: int) -> List[Tuple[Fraction, List[ChainStep], _Work]]:
    if depth_guard <= 0:
        raise RuntimeError("liana removal did not terminate")
    if not _connecting(w):
        return [(Fraction(1), [], w)]
    move, v1, v2, sticky = _next_move(w, direction, sticky)
    before = w.canonical()
    out = []
    if move == "ELI":
        nw = _eli(w, v1, v2)
        step = ChainStep("ELI", before, nw.canonical())
        for c, steps, fin in _chains(nw, direction, sticky, depth_guard - 1):
            out.append((c, [step] + steps, fin))
        return out
    for kind, target, coeff, nw in _ibp(w, v1):
        step = ChainStep(kind, before, nw.canonical(), target if kind == "IBP_v" else None)
        for c, steps, fin in _chains(nw, direction, None, depth_guard - 1):
            out.append((coeff * c, [step] + steps, fin))
    return out


_A_CACHE: Dict[Tuple[str, str], Tuple[FormalSum, List[TransformationChain]]] = {}


def run_algorithm1(
    forest, eli_direction: str = "shallow", order: Optional[Sequence[int]] = None
) -> Tuple[FormalSum, List[TransformationChain]]:
    """``A(π)`` and every labelled transformation chain starting at ``π``.

    ``order`` overrides the vertex total order (a permutation of the canonical
    vertex numbers, smallest first).
    """
    if eli_direction not in ELI_DIRECTIONS:
        raise ValueError(f"eli_direction must be one of {ELI_DIRECTIONS}")
    f = to_forest(forest)
    key = (f.key, eli_direction)
    if order is None and key in _A_CACHE:
        return _A_CACHE[key]
    w = _Work.of(f, order)
    result = FormalSum()
    chains = []
    for c, steps, fin in _chains(w, eli_direction, None, depth_guard=4 * f.n * f.n + 8):
        final = fin.canonical()
        result += FormalSum.of(final, c)
        chains.append(TransformationChain(f, steps, c))
    if order is None:
        _A_CACHE[key] = (result, chains)
    return result, chains


def apply_A(x, eli_direction: str = "shallow") -> FormalSum:
    """Linear extension of ``A`` to formal sums."""
    return FormalSum.map_linear(
        x if isinstance(x, FormalSum) else FormalSum.of(to_forest(x)),
        lambda f: run_algorithm1(f, eli_direction)[0],
    )


# ---------------------------------------------------------------------------
# order conditions
# ---------------------------------------------------------------------------

def has_connecting_liana(forest) -> bool:
    return bool(_connecting(_Work.of(to_forest(forest))))


def targets_of_size(size) -> List[Forest]:
    """Aroma-free exotic forests of one size without connecting lianas, in table order."""
    fs = [f for f in forests_of_size(size, "exotic_forests", aroma_free=True) if not has_connecting_liana(f)]
    return sorted(fs, key=lambda f: (f.n_lianas, len(f.components()), f.key))


def sources_of_size(size) -> List[Forest]:
    return list(forests_of_size(size, "exotic_forests", aroma_free=True))


@dataclass
class OrderCondition:
    target: Forest
    terms: List[Tuple[Forest, Fraction]]
    redundant: bool = False
    chains: List[TransformationChain] = field(default_factory=list)

    @property
    def size(self) -> Fraction:
        return self.target.size

    @property
    def sigma_target(self) -> int:
        return sigma(self.target)

    def symbolic(self) -> WeightPolynomial:
        out = WeightPolynomial()
        for src, c in self.terms:
            out = out + WeightPolynomial.of_forest(src, c)
        return out

    def lead(self):
        return weight_symbol(self.target)

    def render(self, latex: bool = False) -> str:
        return self.symbolic().render(self.lead(), latex)

    def value(self, a: Callable[[Forest], object]) -> Fraction:
        """ω(π̂) for a coefficient map on grafted forests, applied through Φ."""
        return sum((c * as_fraction(a(forget_lianas(src))) for src, c in self.terms), Fraction(0))

    def to_json_obj(self, with_chains: bool = False) -> dict:
        d = {
            "order": int(self.size),
            "target": self.target.key,
            "sigma_target": self.sigma_target,
            "terms": [{"source": s.key, "coeff": format_fraction(c)} for s, c in self.terms],
            "symbolic": self.render(),
            "latex": self.render(latex=True),
            "redundant": self.redundant,
        }
        if with_chains:
            d["chains"] = [ch.to_json_obj() for ch in self.chains]
        return d


def assemble_omega(order: int, eli_direction: str = "shallow", bound=None) -> List[OrderCondition]:
    """All conditions ω(π̂) for targets of size 1..order, in table order."""
    check_bound(order, bound)
    out: List[OrderCondition] = []
    for k in range(1, int(order) + 1):
        contrib: Dict[str, List[Tuple[Forest, Fraction]]] = {}
        chains: Dict[str, List[TransformationChain]] = {}
        for src in sources_of_size(k):
            image, src_chains = run_algorithm1(src, eli_direction)
            for tgt, c in image:
                contrib.setdefault(tgt.key, []).append((src, c / sigma(src)))
            for ch in src_chains:
                chains.setdefault(ch.final.key, []).append(ch)
        for tgt in targets_of_size(k):
            s = sigma(tgt)
            terms = [(src, c * s) for src, c in contrib.get(tgt.key, [])]
            terms.sort(key=lambda t: t[0].key)
            out.append(OrderCondition(tgt, terms, chains=chains.get(tgt.key, [])))
    return out


def is_splittable(forest) -> bool:
    """True when the forest is a nontrivial concatenation product."""
    return len(liana_blocks(to_forest(forest))) > 1


def reduce_by_multiplicativity(conditions: List[OrderCondition]) -> Tuple[List[OrderCondition], List[OrderCondition]]:
    """Flag conditions on concatenated targets as redundant; return (kept, redundant)."""
    kept, dropped = [], []
    for cond in conditions:
        cond.redundant = is_splittable(cond.target)
        (dropped if cond.redundant else kept).append(cond)
    return kept, dropped


def omega_eval(cond: OrderCondition, tab: Tableau) -> Fraction:
    """Exact value of a condition on a tableau."""
    if not isinstance(tab, Tableau):
        raise TypeError("expected a Tableau")
    s = tab.s
    if len(tab.d) != s or len(tab.a) != s or any(len(r) != s for r in tab.a):
        raise DimensionMismatch("tableau dimensions are inconsistent")
    return cond.value(lambda f: elementary_weight(f, tab))


def method_order(conditions: List[OrderCondition], tab: Tableau) -> Tuple[int, Optional[OrderCondition], Fraction]:
    """Largest p such that every condition of size ≤ p vanishes, with the first failure."""
    sizes = sorted({int(c.size) for c in conditions})
    reached = 0
    for k in sizes:
        for c in (c for c in conditions if int(c.size) == k):
            v = omega_eval(c, tab)
            if v != 0:
                return reached, c, v
        reached = k
    return reached, None, Fraction(0)


def report(order: int, eli_direction: str = "shallow", reduce: bool = False, with_chains: bool = False) -> dict:
    conds = assemble_omega(order, eli_direction)
    kept, _ = reduce_by_multiplicativity(conds)
    shown = kept if reduce else conds
    return {
        "order": order,
        "eli_direction": eli_direction,
        "count": len(shown),
        "conditions": [c.to_json_obj(with_chains) for c in shown],
    }


def random_order(forest: Forest, rng: random.Random) -> List[int]:
    order = list(range(forest.n))
    rng.shuffle(order)
    return order


def target_latex(cond: OrderCondition) -> str:
    return print_latex(cond.target)


# ---------------------------------------------------------------------------
# move log (for the integral-invariance checks)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Move:
    """One whole ELI or IBP application: ``before`` rewrites to the sum ``after``."""

    kind: str  # "ELI" or "IBP"
    before: Forest
    after: FormalSum

    def __hash__(self) -> int:
        return hash((self.kind, self.before.key, self.after.to_json()))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Move) and hash(self) == hash(other)


def moves(forest, eli_direction: str = "shallow") -> List[Move]:
    """Every distinct move performed by the liana removal starting at ``forest``."""
    found: Dict[int, Move] = {}

    def walk(w: _Work, sticky: Optional[int]) -> None:
        if not _connecting(w):
            return
        move, v1, v2, sticky = _next_move(w, eli_direction, sticky)
        before = w.canonical()
        if move == "ELI":
            nw = _eli(w, v1, v2)
            m = Move("ELI", before, FormalSum.of(nw.canonical()))
            found.setdefault(hash(m), m)
            walk(nw, sticky)
            return
        branches = _ibp(w, v1)
        total = FormalSum()
        for _, _, c, nw in branches:
            total += FormalSum.of(nw.canonical(), c)
        m = Move("IBP", before, total)
        found.setdefault(hash(m), m)
        for _, _, _, nw in branches:
            walk(nw, None)

    walk(_Work.of(to_forest(forest)), None)
    return list(found.values())


def all_moves(max_order: int, eli_direction: str = "shallow") -> List[Move]:
    """Distinct moves generated while assembling the conditions up to ``max_order``."""
    seen: Dict[int, Move] = {}
    for k in range(1, int(max_order) + 1):
        for src in sources_of_size(k):
            for m in moves(src, eli_direction):
                seen.setdefault(hash(m), m)
    return sorted(seen.values(), key=lambda m: (m.before.units, m.kind, m.before.key))
