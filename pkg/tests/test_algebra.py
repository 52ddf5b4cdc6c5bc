import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from exotic_forests.algebra import (
    CoefficientMap,
    FormalSum,
    LabeledForest,
    a_sigma,
    a_sigma_inv,
    as_fraction,
    ck_coproduct,
    convolve,
    delta_sigma,
    dual_ck,
    dual_ck_by_enumeration,
    gl_product,
    gl_product_direct,
    graft,
    labeled_dual_ck,
    labeled_gl_product,
)
from exotic_forests.enumeration import SizeBoundExceeded
from exotic_forests.forest import EMPTY, sigma
from exotic_forests.text import parse

from strategies import EXOTIC_3, GRAFTED_3, TREES_3, exotic, grafted, small

P = parse


def S(*pairs):
    out = FormalSum()
    for text, c in pairs:
        out += FormalSum.of(P(text), c)
    return out


def test_formal_sum_basics():
    x = S(("b", 1), ("b[b]", Fraction(1, 2)))
    assert x - x == FormalSum()
    assert x.scale(2) == S(("b", 2), ("b[b]", 1))
    assert FormalSum.from_json(x.to_json()) == x
    assert str(S(("b,b", 2), ("b[b]", 1))) == "2*(b,b) + b[b]"
    with pytest.raises(TypeError):
        as_fraction(0.5)


# --- grafting -------------------------------------------------------------

def test_graft_display():
    assert graft("b", "b[b]") == S(("b[b[b]]", 1), ("b[b,b]", 1))


def test_graft_unit():
    assert graft("b", EMPTY) == FormalSum()
    assert graft(EMPTY, "b[x]") == S(("b[x]", 1))


def test_graft_only_onto_black():
    assert graft("b", "b[x]") == S(("b[b,x]", 1))
    assert graft("b", "1,1") == FormalSum()


def _graft_sums(x, y):
    out = FormalSum()
    for f, c in x:
        for g, d in y:
            out += graft(f, g).scale(c * d)
    return out


def test_pre_lie_identity_on_random_triples():
    rng = random.Random(11)
    trees = [t for t in TREES_3 if t.size <= 2]
    for _ in range(50):
        f, g, h = (FormalSum.of(rng.choice(trees)) for _ in range(3))
        assoc_fg = _graft_sums(f, _graft_sums(g, h)) - _graft_sums(_graft_sums(f, g), h)
        assoc_gf = _graft_sums(g, _graft_sums(f, h)) - _graft_sums(_graft_sums(g, f), h)
        assert assoc_fg == assoc_gf


# --- Connes-Kreimer ---------------------------------------------------------

def test_ck_worked_example():
    got = {(l.key, r.key): c for l, r, c in ck_coproduct("(b[b]),b[b[x]]").items()}
    want = {
        ("", P("(b[b]),b[b[x]]").key), ("b", P("(b),b[b[x]]").key), ("x", P("(b[b]),b[b]").key),
        ("b[x]", P("(b[b]),b").key), (P("b,x").key, P("(b),b[b]").key), (P("b,b[x]").key, P("(b),b").key),
        (P("(b[b]),x").key, "b[b]"), (P("(b[b]),b[x]").key, "b"), (P("(b[b]),b[b[x]]").key, ""),
    }
    assert got == {k: 1 for k in want}


def test_ck_small():
    assert {(l.key, r.key): c for l, r, c in ck_coproduct("b").items()} == {("", "b"): 1, ("b", ""): 1}
    # the two liana ends are always cut together
    got = {(l.key, r.key) for l, r, _ in ck_coproduct("b[1,1]").items()}
    assert got == {("", "b[1,1]"), ("1,1", "b"), ("b[1,1]", "")}


def _apply_left(t):
    out = {}
    for l, r, c in t.items():
        for ll, lr, d in ck_coproduct(l).items():
            k = (ll.key, lr.key, r.key)
            out[k] = out.get(k, 0) + c * d
    return {k: v for k, v in out.items() if v}


def _apply_right(t):
    out = {}
    for l, r, c in t.items():
        for rl, rr, d in ck_coproduct(r).items():
            k = (l.key, rl.key, rr.key)
            out[k] = out.get(k, 0) + c * d
    return {k: v for k, v in out.items() if v}


@given(exotic)
def test_ck_coassociative(f):
    t = ck_coproduct(f)
    assert _apply_left(t) == _apply_right(t)


@given(grafted)
def test_ck_counit_terms(f):
    t = {(l.key, r.key): c for l, r, c in ck_coproduct(f).items()}
    assert t[("", f.key)] == 1 and t[(f.key, "")] == 1


# --- dual CK and Grossman-Larson -------------------------------------------

def test_dual_ck_small():
    assert dual_ck("b", "b") == S(("b,b", 2), ("b[b]", 1))
    assert dual_ck(EMPTY, "b[1,1]") == S(("b[1,1]", 1))


@pytest.mark.parametrize("family, pool", [("exotic_forests", EXOTIC_3), ("grafted_forests", GRAFTED_3)])
def test_dual_ck_matches_enumeration(family, pool):
    checked = 0
    for x in pool:
        for y in pool:
            if x.size + y.size <= 3:
                assert dual_ck(x, y) == dual_ck_by_enumeration(x, y, family), (x.key, y.key)
                checked += 1
    assert checked > 30


def test_gl_unit_and_small():
    for f in ("b[1,1]", "(b),x"):
        assert gl_product(EMPTY, f) == S((f, 1)) == gl_product(f, EMPTY)
    assert gl_product("b", "b") == S(("b,b", 1), ("b[b]", 1))


@given(small(EXOTIC_3, 2), small(EXOTIC_3, 1))
def test_gl_routes_agree(x, y):
    assert gl_product(x, y) == gl_product_direct(x, y)


@given(small(GRAFTED_3, 1.5), small(GRAFTED_3, 1), small(GRAFTED_3, 1))
def test_gl_associative(x, y, z):
    def gl(u, v):
        out = FormalSum()
        for f, c in u:
            for g, d in v:
                out += gl_product_direct(f, g).scale(c * d)
        return out

    X, Y, Z = FormalSum.of(x), FormalSum.of(y), FormalSum.of(z)
    assert gl(gl(X, Y), Z) == gl(X, gl(Y, Z))


def test_labeled_products():
    t12, t345 = LabeledForest.parse("t1[t2]"), LabeledForest.parse("t3[t4,t5]")
    want = {
        LabeledForest.parse(s): 1
        for s in ("t1[t2],t3[t4,t5]", "t3[t1[t2],t4,t5]", "t3[t4[t1[t2]],t5]", "t3[t4,t5[t1[t2]]]")
    }
    assert labeled_gl_product(t12, t345) == want
    assert labeled_dual_ck(t12, t345) == want
    assert labeled_gl_product(LabeledForest.parse("t1"), LabeledForest.parse("t3[t1]")) == {}
    assert labeled_dual_ck(LabeledForest.parse("t1"), LabeledForest.parse("t3[t1]")) == {}


# --- A_σ --------------------------------------------------------------------

def test_a_sigma_values():
    assert a_sigma("b,b") == S(("b,b", 2))
    assert a_sigma("b[1,1,2,2]") == S(("b[1,1,2,2]", 8))


@given(st.lists(st.tuples(exotic, st.integers(-5, 5)), max_size=4))
def test_a_sigma_inverse(terms):
    x = FormalSum()
    for f, c in terms:
        x += FormalSum.of(f, c)
    assert a_sigma_inv(a_sigma(x)) == x
    assert a_sigma(a_sigma_inv(x)) == x


@given(small(EXOTIC_3, 2), small(EXOTIC_3, 1))
def test_a_sigma_intertwines(x, y):
    assert a_sigma(gl_product_direct(x, y)) == dual_ck(a_sigma(x), a_sigma(y))


# --- series maps ------------------------------------------------------------

def test_delta_sigma():
    assert delta_sigma(CoefficientMap.constant(1), 1) == S(("b", 1), ("1,1", Fraction(1, 2)))
    assert delta_sigma(CoefficientMap.zero(), 2) == FormalSum()
    with pytest.raises(SizeBoundExceeded):
        delta_sigma(CoefficientMap.constant(1), 7)


def _random_map(seed, unit=1):
    rng = random.Random(seed)
    table = {}

    def rule(f):
        if f.n == 0:
            return unit
        if f.key not in table:
            table[f.key] = Fraction(rng.randint(-6, 6), rng.randint(1, 5))
        return table[f.key]

    return CoefficientMap(rule)


@given(grafted, st.integers(0, 10**6))
def test_convolution_counit(f, seed):
    a = _random_map(seed)
    eps = CoefficientMap.counit()
    assert convolve(a, eps)(f) == a(f) == convolve(eps, a)(f)


@given(grafted, st.integers(0, 10**6))
def test_convolution_associative(f, seed):
    a, b, c = _random_map(seed), _random_map(seed + 1), _random_map(seed + 2)
    assert convolve(convolve(a, b), c)(f) == convolve(a, convolve(b, c))(f)


def test_convolution_on_primitive():
    a, b = _random_map(1), _random_map(2)
    assert convolve(a, b)(P("b")) == a(P("b")) + b(P("b"))


def test_coefficient_map_table_defaults_to_zero():
    m = CoefficientMap({"b": 3})
    assert m(P("b")) == 3 and m(P("b[b]")) == 0
    assert sigma(P("1,1")) == 2
