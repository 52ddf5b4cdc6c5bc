import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from exotic_forests.forest import (
    EMPTY,
    DecoratedVertexHasChild,
    LianaMultiplicityNot2,
    PureAromaForest,
    TwoOutgoingEdges,
    UnknownDecoration,
    canonicalize_raw,
    concat,
    is_liana,
    isomorphisms,
    sigma,
    split_components,
    validate,
    vertex_order,
)
from exotic_forests.text import parse

from strategies import exotic, grafted


def test_valid_mixed_tree():
    f = parse("b[x,b[x]]")
    assert f.n == 4 and f.count("x") == 2 and len(f.roots) == 1


def test_validation_errors():
    with pytest.raises(DecoratedVertexHasChild):
        validate(["x", "b"], [(1, 0)])
    with pytest.raises(PureAromaForest):
        parse("(b)")
    with pytest.raises(TwoOutgoingEdges):
        validate(["b", "b", "b"], [(0, 1), (0, 2)])
    with pytest.raises(LianaMultiplicityNot2):
        parse("b[1,1,1]")
    with pytest.raises(UnknownDecoration):
        validate(["z"], [])


@pytest.mark.parametrize(
    "a, b",
    [
        ("(b[b[3],1,1]),b[b[2],b[2,3]]", "(b[b[2],3,3]),b[b[1],b[1,2]]"),
        ("b[1,2,b[2,1]]", "b[1,2,b[1,2]]"),
        ("b,b[b]", "b[b],b"),
        ("(b,b[b]),x", "x,(b[b],b)"),
    ],
)
def test_equal_keys(a, b):
    assert parse(a).key == parse(b).key


def test_single_vertex_key():
    assert parse("b").key == "b"


@pytest.mark.parametrize(
    "text, expected",
    [
        ("b[x,x,b[x,b]]", 2),
        ("b[1,1,2,2]", 8),
        ("b[x,x,x,x]", 24),
        ("1,b[1,2,b[2]]", 1),
        ("(b[1,1,2]),2", 2),
        ("b[b[b[x]]]", 1),
        ("b,b", 2),
        ("b,b,b", 6),
        ("(b,b),b", 2),
        ("1,1", 2),
        ("1,1,2,2", 8),
    ],
)
def test_sigma_values(text, expected):
    assert sigma(parse(text)) == expected


def test_sigma_brute_force_small():
    # σ counts the decoration-preserving automorphisms; compare with all vertex permutations
    for f in [parse(s) for s in ("b[1,2,b[1,2]]", "(b[x]),b[x]", "b[1],b[1]", "(b,b),x", "b[x,x],b[x,x]")]:
        count = 0
        for perm in itertools.permutations(range(f.n)):
            if any(f.deco[v] != f.deco[perm[v]] and not (isinstance(f.deco[v], int) and isinstance(f.deco[perm[v]], int)) for v in range(f.n)):
                continue
            parent_ok = all(
                (f.parent[v] is None and f.parent[perm[v]] is None)
                or (f.parent[v] is not None and perm[f.parent[v]] == f.parent[perm[v]])
                for v in range(f.n)
            )
            lianas_ok = all(
                not is_liana(f.deco[v]) or perm[f.partner(v)] == f.partner(perm[v])
                for v in range(f.n)
            )
            count += parent_ok and lianas_ok
        assert count == sigma(f), f.key


def test_concat():
    b = parse("b")
    assert concat(b, b).key == "b,b" and sigma(concat(b, b)) == 2
    assert (parse("b[1,1]") * b).key == parse("b[0,0],b").key
    assert EMPTY * parse("b[x]") == parse("b[x]")


def test_vertex_order_linearization():
    f = parse("b,b[b]")
    order = vertex_order(f)
    assert f.parent[order[0]] is None and f.parent[order[1]] is None and f.parent[order[2]] == order[1]
    assert vertex_order(parse(f.key)) == order


@given(exotic, st.randoms(use_true_random=False))
def test_canonical_form_ignores_vertex_numbering(f, rnd):
    perm = list(range(f.n))
    rnd.shuffle(perm)
    parent = [None] * f.n
    deco = [None] * f.n
    for v in range(f.n):
        parent[perm[v]] = None if f.parent[v] is None else perm[f.parent[v]]
        deco[perm[v]] = f.deco[v]
    # also rename liana labels
    labels = sorted({d for d in deco if isinstance(d, int)})
    shuffled = labels[:]
    rnd.shuffle(shuffled)
    rename = dict(zip(labels, [s + 10 for s in shuffled]))
    deco = [rename.get(d, d) if isinstance(d, int) else d for d in deco]
    assert canonicalize_raw(parent, deco) == f


@given(exotic)
def test_sigma_equals_number_of_isomorphisms(f):
    assert sigma(f) == sum(1 for _ in isomorphisms(f, f))


@given(grafted)
def test_text_round_trip(f):
    assert parse(f.key) == f


@given(exotic, exotic)
def test_concat_orders_respect_components(f, g):
    h = f * g
    assert h.size == f.size + g.size
    assert sorted(c.key for c in split_components(h)) == sorted(
        [c.key for c in split_components(f)] + [c.key for c in split_components(g)]
    )


def test_concat_is_commutative_on_random_pairs():
    rng = random.Random(7)
    from strategies import EXOTIC_3

    for _ in range(100):
        f, g = rng.choice(EXOTIC_3), rng.choice(EXOTIC_3)
        assert concat(f, g) == concat(g, f)
        assert sigma(concat(f, g)) % sigma(f) == 0
