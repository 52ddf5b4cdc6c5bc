"""Decorated aromatic forests: validation, canonical form, isomorphism, symmetry.

A forest is a directed graph in which every vertex has at most one outgoing
edge (towards its parent).  Components with a vertex lacking an outgoing edge
are rooted trees; the remaining components contain exactly one directed cycle
and are called aromas.  Vertices carry one of three decorations:

* ``"b"``  a black vertex (the vector field),
* ``"x"``  a grafted vertex (a noise increment), always a leaf,
* ``k``    a positive integer, one end of the liana with label ``k``.

Liana labels are only meaningful up to renaming, so the canonical key
minimises over all relabelings.  Forests are immutable and compare by key.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

Deco = Union[str, int]

BLACK = "b"
GRAFTED = "x"


class ForestError(ValueError):
    """Base class for invalid forest data."""


class TwoOutgoingEdges(ForestError):
    pass


class DecoratedVertexHasChild(ForestError):
    pass


class LianaMultiplicityNot2(ForestError):
    pass


class PureAromaForest(ForestError):
    pass


class UnknownDecoration(ForestError):
    pass


def is_liana(deco: Deco) -> bool:
    return isinstance(deco, int) and not isinstance(deco, bool)


def deco_class(deco: Deco) -> str:
    """Decoration with liana labels collapsed, used for structural comparisons."""
    return "L" if is_liana(deco) else deco


class Forest:
    """An immutable decorated aromatic forest in canonical vertex numbering.

    Vertex ``i`` is the ``i``-th vertex token of :attr:`key`, so the position
    in the canonical linearization is the vertex total order.
    """

    __slots__ = ("parent", "deco", "key", "_children")

    def __init__(self, parent: Tuple[Optional[int], ...], deco: Tuple[Deco, ...], key: str):
        # Use Forest.build / validate; this constructor trusts its input.
        self.parent = parent
        self.deco = deco
        self.key = key
        self._children: Optional[Tuple[Tuple[int, ...], ...]] = None

    # -- construction -----------------------------------------------------
    @classmethod
    def build(cls, parent: Sequence[Optional[int]], deco: Sequence[Deco]) -> "Forest":
        """Validate a parent array with decorations and return the canonical forest."""
        edges = [(v, p) for v, p in enumerate(parent) if p is not None]
        return validate(deco, edges)

    @classmethod
    def empty(cls) -> "Forest":
        return EMPTY

    # -- basic structure ---------------------------------------------------
    def __len__(self) -> int:
        return len(self.deco)

    @property
    def n(self) -> int:
        return len(self.deco)

    @property
    def children(self) -> Tuple[Tuple[int, ...], ...]:
        if self._children is None:
            ch: List[List[int]] = [[] for _ in self.deco]
            for v, p in enumerate(self.parent):
                if p is not None:
                    ch[p].append(v)
            self._children = tuple(tuple(c) for c in ch)
        return self._children

    @property
    def roots(self) -> List[int]:
        return [v for v, p in enumerate(self.parent) if p is None]

    @property
    def units(self) -> int:
        """Twice the size: black vertices weigh 2, decorated vertices weigh 1."""
        return sum(2 if d == BLACK else 1 for d in self.deco)

    @property
    def size(self) -> Fraction:
        return Fraction(self.units, 2)

    def count(self, kind: str) -> int:
        """Number of vertices of kind ``"b"``, ``"x"`` or ``"L"`` (liana ends)."""
        return sum(1 for d in self.deco if deco_class(d) == kind)

    @property
    def n_lianas(self) -> int:
        return self.count("L") // 2

    def liana_pairs(self) -> List[Tuple[int, int]]:
        ends: Dict[int, List[int]] = defaultdict(list)
        for v, d in enumerate(self.deco):
            if is_liana(d):
                ends[d].append(v)
        return sorted(tuple(sorted(e)) for e in ends.values())  # type: ignore[misc]

    def partner(self, v: int) -> int:
        d = self.deco[v]
        if not is_liana(d):
            raise ValueError(f"vertex {v} is not a liana end")
        for u, e in enumerate(self.deco):
            if e == d and u != v:
                return u
        raise ValueError(f"vertex {v} is not a liana end")

    def components(self) -> List[List[int]]:
        return _components(self.parent)

    def is_aroma_free(self) -> bool:
        return all(any(self.parent[v] is None for v in comp) for comp in self.components())

    def n_aromas(self) -> int:
        return sum(1 for comp in self.components() if all(self.parent[v] is not None for v in comp))

    def n_trees(self) -> int:
        return len(self.roots)

    def depth(self, v: int) -> Optional[int]:
        """Edges from ``v`` down to its root, or None inside an aroma."""
        seen = set()
        d = 0
        while self.parent[v] is not None:
            if v in seen:
                return None
            seen.add(v)
            v = self.parent[v]  # type: ignore[assignment]
            d += 1
        return d

    # -- value semantics ----------------------------------------------------
    def __eq__(self, other: object) -> bool:
        return isinstance(other, Forest) and other.key == self.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __lt__(self, other: "Forest") -> bool:
        return (self.units, self.key) < (other.units, other.key)

    def __repr__(self) -> str:
        return f"Forest({self.key!r})"

    def __str__(self) -> str:
        return self.key

    def __mul__(self, other: "Forest") -> "Forest":
        return concat(self, other)


EMPTY = Forest((), (), "")


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

def validate(deco: Sequence[Deco], edges: Iterable[Tuple[int, int]]) -> Forest:
    """Check raw vertex/edge data and return the canonical :class:`Forest`.

    ``edges`` are ``(child, parent)`` pairs directed towards the roots.
    """
    deco = list(deco)
    n = len(deco)
    for d in deco:
        if not (d in (BLACK, GRAFTED) or (is_liana(d) and d >= 0)):
            raise UnknownDecoration(f"unknown decoration {d!r}")
    parent: List[Optional[int]] = [None] * n
    for child, par in edges:
        if not (0 <= child < n and 0 <= par < n):
            raise ForestError(f"edge ({child}, {par}) references a missing vertex")
        if parent[child] is not None:
            raise TwoOutgoingEdges(f"vertex {child} has two outgoing edges")
        parent[child] = par
    for v, p in enumerate(parent):
        if p is not None and deco[p] != BLACK:
            raise DecoratedVertexHasChild(f"decorated vertex {p} ({deco[p]}) has child {v}")
    labels: Dict[int, int] = defaultdict(int)
    for d in deco:
        if is_liana(d):
            labels[d] += 1
    for k, m in labels.items():
        if m != 2:
            raise LianaMultiplicityNot2(f"liana label {k} occurs {m} times")
    if n and all(p is not None for p in parent):
        raise PureAromaForest("a forest needs at least one root")
    return canonicalize_raw(parent, deco)


def _components(parent: Sequence[Optional[int]]) -> List[List[int]]:
    n = len(parent)
    root = list(range(n))

    def find(a: int) -> int:
        while root[a] != a:
            root[a] = root[root[a]]
            a = root[a]
        return a

    for v, p in enumerate(parent):
        if p is not None:
            ra, rb = find(v), find(p)
            if ra != rb:
                root[ra] = rb
    groups: Dict[int, List[int]] = defaultdict(list)
    for v in range(n):
        groups[find(v)].append(v)
    return sorted(groups.values(), key=min)


def _cycle(parent: Sequence[Optional[int]], start: int) -> List[int]:
    """Cycle vertices reached from ``start``, listed along the edge direction."""
    seen: Dict[int, int] = {}
    v = start
    while v not in seen:
        seen[v] = len(seen)
        v = parent[v]  # type: ignore[assignment]
    cyc = [v]
    u = parent[v]
    while u != v:
        cyc.append(u)  # type: ignore[arg-type]
        u = parent[u]  # type: ignore[index]
    return cyc


# ---------------------------------------------------------------------------
# canonical form
# ---------------------------------------------------------------------------

def _token(d: Deco, relabel: Dict[int, int]) -> str:
    return str(relabel[d]) if is_liana(d) else d  # type: ignore[index,return-value]


def _linearize(parent, deco, children, relabel) -> Tuple[str, List[int]]:
    """Minimal string of the forest for one fixed liana labelling, with vertex order."""

    def tree(v: int, skip: Optional[int] = None) -> Tuple[str, List[int]]:
        subs = [tree(c) for c in children[v] if c != skip]
        tok = _token(deco[v], relabel)
        if not subs:
            return tok, [v]
        subs.sort(key=lambda s: s[0])
        order = [v]
        for _, o in subs:
            order.extend(o)
        return tok + "[" + ",".join(s for s, _ in subs) + "]", order

    comps: List[Tuple[str, List[int]]] = []
    for comp in _components(parent):
        roots = [v for v in comp if parent[v] is None]
        if roots:
            comps.append(tree(roots[0]))
            continue
        cyc = _cycle(parent, comp[0])
        # predecessor of cyc[i] along the cycle is cyc[i-1]
        parts = [tree(c, skip=cyc[i - 1]) for i, c in enumerate(cyc)]
        best = None
        for r in range(len(parts)):
            rot = parts[r:] + parts[:r]
            s = "(" + ",".join(p for p, _ in rot) + ")"
            if best is None or s < best[0]:
                best = (s, [v for _, o in rot for v in o])
        comps.append(best)  # type: ignore[arg-type]
    comps.sort(key=lambda c: c[0])
    return ",".join(c for c, _ in comps), [v for _, o in comps for v in o]


def canonicalize_raw(parent: Sequence[Optional[int]], deco: Sequence[Deco]) -> Forest:
    """Canonical forest of already validated raw data."""
    n = len(deco)
    if n == 0:
        return EMPTY
    children: List[List[int]] = [[] for _ in range(n)]
    for v, p in enumerate(parent):
        if p is not None:
            children[p].append(v)
    labels = sorted({d for d in deco if is_liana(d)})
    best: Optional[Tuple[str, List[int], Dict[int, int]]] = None
    for perm in itertools.permutations(range(1, len(labels) + 1)):
        relabel = dict(zip(labels, perm))
        s, order = _linearize(parent, deco, children, relabel)
        if best is None or s < best[0]:
            best = (s, order, relabel)
    key, order, relabel = best  # type: ignore[misc]
    pos = {v: i for i, v in enumerate(order)}
    new_parent = tuple(None if parent[v] is None else pos[parent[v]] for v in order)  # type: ignore[index]
    new_deco = tuple(relabel[deco[v]] if is_liana(deco[v]) else deco[v] for v in order)
    return Forest(new_parent, new_deco, key)


def canonicalize(forest: Forest) -> Forest:
    """Idempotent; provided for symmetry with raw construction."""
    return canonicalize_raw(forest.parent, forest.deco)


def vertex_order(forest: Forest) -> List[int]:
    """Total order on vertices: position in the canonical linearization."""
    return list(range(forest.n))


# ---------------------------------------------------------------------------
# products
# ---------------------------------------------------------------------------

def disjoint_union(*forests: Forest) -> Tuple[List[Optional[int]], List[Deco], List[int]]:
    """Raw disjoint union with liana labels shifted apart; also returns vertex offsets."""
    parent: List[Optional[int]] = []
    deco: List[Deco] = []
    offsets = []
    shift = 0
    for f in forests:
        off = len(parent)
        offsets.append(off)
        parent.extend(None if p is None else p + off for p in f.parent)
        deco.extend(d + shift if is_liana(d) else d for d in f.deco)
        shift += max([d for d in f.deco if is_liana(d)], default=0)
    return parent, deco, offsets


def concat(*forests: Forest) -> Forest:
    """Concatenation product (disjoint union), liana labels made disjoint."""
    parent, deco, _ = disjoint_union(*forests)
    return canonicalize_raw(parent, deco)


def split_components(forest: Forest) -> List[Forest]:
    """The connected components, each as a canonical forest (aromas attached nowhere)."""
    out = []
    for comp in forest.components():
        idx = {v: i for i, v in enumerate(comp)}
        out.append(
            canonicalize_raw(
                [None if forest.parent[v] is None else idx[forest.parent[v]] for v in comp],  # type: ignore[index]
                [forest.deco[v] for v in comp],
            )
        )
    return out


def is_connected_by_lianas(forest: Forest) -> bool:
    """True when the components cannot be split into two liana-closed groups."""
    return len(liana_blocks(forest)) <= 1


def liana_blocks(forest: Forest) -> List[List[int]]:
    """Groups of components closed under lianas: the concatenation factors of a forest."""
    comps = forest.components()
    where = {v: i for i, comp in enumerate(comps) for v in comp}
    root = list(range(len(comps)))

    def find(a: int) -> int:
        while root[a] != a:
            a = root[a]
        return a

    for a, b in forest.liana_pairs():
        ra, rb = find(where[a]), find(where[b])
        if ra != rb:
            root[ra] = rb
    groups: Dict[int, List[int]] = defaultdict(list)
    for i, comp in enumerate(comps):
        groups[find(i)].extend(comp)
    return sorted((sorted(g) for g in groups.values()), key=min)


def sub_forest(forest: Forest, vertices: Iterable[int]) -> Forest:
    """Restriction to a vertex set; edges leaving the set are cut (vertices become roots)."""
    vs = sorted(vertices)
    idx = {v: i for i, v in enumerate(vs)}
    parent = [idx.get(forest.parent[v]) if forest.parent[v] is not None else None for v in vs]  # type: ignore[arg-type]
    return canonicalize_raw(parent, [forest.deco[v] for v in vs])


# ---------------------------------------------------------------------------
# isomorphism and symmetry
# ---------------------------------------------------------------------------

def _shape_invariants(parent, colors, children) -> List[str]:
    """Per-vertex invariant: decoration class, position type and downward shape."""
    n = len(colors)
    on_cycle = [False] * n
    for comp in _components(parent):
        if all(parent[v] is not None for v in comp):
            for c in _cycle(parent, comp[0]):
                on_cycle[c] = True
    memo: Dict[int, str] = {}

    def shape(v: int) -> str:
        if v not in memo:
            subs = sorted(shape(c) for c in children[v] if not on_cycle[c])
            memo[v] = f"{colors[v]}[{','.join(subs)}]"
        return memo[v]

    kinds = ["R" if parent[v] is None else ("C" if on_cycle[v] else "N") for v in range(n)]
    return [kinds[v] + shape(v) for v in range(n)]


def _search_order(parent, n) -> List[int]:
    """Vertices sorted by distance to their root or cycle, so parents come first."""
    on_cycle = set()
    for comp in _components(parent):
        if all(parent[v] is not None for v in comp):
            on_cycle.update(_cycle(parent, comp[0]))
    dist = []
    for v in range(n):
        d, u = 0, v
        while parent[u] is not None and u not in on_cycle:
            u = parent[u]
            d += 1
        dist.append(d)
    return sorted(range(n), key=lambda v: (dist[v], v))


def morphisms(
    src_parent: Sequence[Optional[int]],
    src_colors: Sequence,
    dst_parent: Sequence[Optional[int]],
    dst_colors: Sequence,
    src_match: Optional[Dict[int, int]] = None,
    dst_match: Optional[Dict[int, int]] = None,
) -> Iterator[Dict[int, int]]:
    """Yield every isomorphism src -> dst by backtracking.

    An isomorphism is a vertex bijection commuting with the parent map and
    preserving colours; when matchings are given (liana pairs) they must be
    mapped onto each other.
    """
    n = len(src_colors)
    if n != len(dst_colors):
        return
    src_match = src_match or {}
    dst_match = dst_match or {}
    src_ch: List[List[int]] = [[] for _ in range(n)]
    dst_ch: List[List[int]] = [[] for _ in range(n)]
    for v, p in enumerate(src_parent):
        if p is not None:
            src_ch[p].append(v)
    for v, p in enumerate(dst_parent):
        if p is not None:
            dst_ch[p].append(v)
    inv_s = _shape_invariants(src_parent, list(src_colors), src_ch)
    inv_d = _shape_invariants(dst_parent, list(dst_colors), dst_ch)
    if sorted(inv_s) != sorted(inv_d):
        return
    by_inv: Dict[str, List[int]] = defaultdict(list)
    for w in range(n):
        by_inv[inv_d[w]].append(w)
    order = _search_order(src_parent, n)
    img: Dict[int, int] = {}
    used = [False] * n

    def ok(v: int, w: int) -> bool:
        p = src_parent[v]
        if (p is None) != (dst_parent[w] is None):
            return False
        if p is not None and p in img and dst_parent[w] != img[p]:
            return False
        for c in src_ch[v]:
            if c in img and dst_parent[img[c]] != w:
                return False
        if p == v and dst_parent[w] != w:
            return False
        if v in src_match:
            m = src_match[v]
            if w not in dst_match:
                return False
            if m in img and dst_match[w] != img[m]:
                return False
        elif w in dst_match:
            return False
        return True

    def rec(i: int) -> Iterator[Dict[int, int]]:
        if i == n:
            yield dict(img)
            return
        v = order[i]
        p = src_parent[v]
        if p is not None and p in img and p != v:
            cands = [w for w in dst_ch[img[p]] if inv_d[w] == inv_s[v]]
        else:
            cands = by_inv[inv_s[v]]
        for w in cands:
            if not used[w] and ok(v, w):
                used[w] = True
                img[v] = w
                yield from rec(i + 1)
                del img[v]
                used[w] = False

    yield from rec(0)


def _liana_match(forest: Forest) -> Dict[int, int]:
    m: Dict[int, int] = {}
    for a, b in forest.liana_pairs():
        m[a] = b
        m[b] = a
    return m


def _struct(forest: Forest):
    return forest.parent, [deco_class(d) for d in forest.deco], _liana_match(forest)


def isomorphisms(f1: Forest, f2: Forest) -> Iterator[Dict[int, int]]:
    """All isomorphisms ``f1 -> f2`` (lianas matched up to label renaming)."""
    p1, c1, m1 = _struct(f1)
    p2, c2, m2 = _struct(f2)
    return morphisms(p1, c1, p2, c2, m1, m2)


def find_isomorphism(f1: Forest, f2: Forest) -> Optional[Dict[int, int]]:
    """An isomorphism witness ``f1 -> f2`` or None."""
    return next(isomorphisms(f1, f2), None)


_SIGMA_CACHE: Dict[str, int] = {}


def sigma(forest: Forest) -> int:
    """Symmetry coefficient: order of the automorphism group."""
    s = _SIGMA_CACHE.get(forest.key)
    if s is None:
        s = sum(1 for _ in isomorphisms(forest, forest))
        _SIGMA_CACHE[forest.key] = s
    return s


def sigma_colored(parent: Sequence[Optional[int]], colors: Sequence, match: Optional[Dict[int, int]] = None) -> int:
    """Automorphism count for arbitrary hashable vertex colours."""
    colors = [repr(c) for c in colors]
    return sum(1 for _ in morphisms(parent, colors, parent, colors, match, match))
