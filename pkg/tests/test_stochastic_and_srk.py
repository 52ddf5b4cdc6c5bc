import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from exotic_forests.algebra import FormalSum
from exotic_forests.forest import sigma
from exotic_forests.srk import (
    DimensionMismatch,
    Tableau,
    WeightPolynomial,
    elementary_weight,
    elementary_weight_bruteforce,
    euler_maruyama,
    random_tableau,
    render_monomial,
    weight_symbol,
)
from exotic_forests.stochastic import (
    NotFiner,
    double_factorial,
    expectation,
    forget_lianas,
    pairing_count,
    pairing_count_bruteforce,
    pairing_count_colored,
    pairing_count_colored_bruteforce,
)
from exotic_forests.text import parse

from strategies import EXOTIC_3, GRAFTED_3, grafted

P = parse


def test_forget_lianas():
    assert forget_lianas("b[1,1]") == P("b[x,x]")
    assert forget_lianas("b[1,2],b[2],1") == P("b[x,x],b[x],x")
    assert forget_lianas("b[b],(b)") == P("b[b],(b)")


def test_expectation_examples():
    assert expectation("b[x,x,b[x,x]]") == FormalSum.of(P("b[1,1,b[2,2]]")) + FormalSum.of(P("b[1,2,b[1,2]]"), 2)
    assert expectation("b[x]") == FormalSum()
    assert expectation("b[x],b[x]") == FormalSum.of(P("b[1],b[1]"))
    assert expectation("x,x") == FormalSum.of(P("1,1"))


@given(grafted)
def test_expectation_total_is_number_of_pairings(f):
    n = f.count("x")
    total = sum((c for _, c in expectation(f)), Fraction(0))
    assert total == (double_factorial(n - 1) if n % 2 == 0 else 0)


@given(grafted)
def test_expectation_coefficients_are_pairing_counts(f):
    for g, c in expectation(f):
        assert forget_lianas(g) == f
        assert c == pairing_count(g, f) == pairing_count_bruteforce(g, f)


def test_pairing_count_examples():
    assert pairing_count("b[1,2,b[1,2]]", "b[x,x,b[x,x]]") == 2
    assert pairing_count("b[1,1,2,2]", "b[x,x,x,x]") == 3
    with pytest.raises(NotFiner):
        pairing_count("b[1,1]", "b[x]")


def test_pairing_count_colored():
    # a star with four leaves coloured r,r,g,g against the all-grey colouring
    parent = [None, 0, 0, 0, 0]
    fine = ["b", "r", "r", "g", "g"]
    coarse = ["b", "x", "x", "x", "x"]
    assert pairing_count_colored(parent, fine, coarse) == 6 == pairing_count_colored_bruteforce(parent, fine, coarse)
    assert pairing_count_colored(parent, fine, fine) == 1
    with pytest.raises(NotFiner):
        pairing_count_colored(parent, coarse, fine)


@given(st.sampled_from([f for f in EXOTIC_3 if f.n <= 6]))
def test_sigma_ratio_divides(f):
    g = forget_lianas(f)
    assert sigma(g) % sigma(f) == 0


# --- tableaus and weights ---------------------------------------------------

def test_weight_values():
    tab = Tableau([Fraction(1, 3), Fraction(2, 3)], [[0, 0], [Fraction(1, 2), 0]], [1, 2])
    assert elementary_weight("x", tab) == 1
    assert elementary_weight("b", tab) == 1
    assert elementary_weight("b[x]", tab) == Fraction(1, 3) + Fraction(4, 3)
    assert elementary_weight("b[b]", tab) == Fraction(1, 3)
    # Σ b_i d_i a_ij
    assert elementary_weight("b[x,b],x", tab) == Fraction(2, 3) * 2 * Fraction(1, 2)
    assert elementary_weight("(b),b", tab) == 0
    assert elementary_weight("b[1,1]", tab) == elementary_weight("b[x,x]", tab)


def test_bruteforce_agrees_on_random_forests():
    rng = random.Random(5)
    tab = random_tableau(3, rng)
    pool = [f for f in GRAFTED_3 if f.is_aroma_free()]
    for f in rng.sample(pool, 30):
        assert elementary_weight(f, tab) == elementary_weight_bruteforce(f, tab)


@given(grafted, st.integers(1, 3), st.integers(0, 10**6))
def test_bruteforce_agrees(f, s, seed):
    tab = random_tableau(s, random.Random(seed))
    assert elementary_weight(f, tab) == elementary_weight_bruteforce(f, tab)


@given(grafted, grafted, st.integers(0, 10**6))
def test_weight_multiplicative(f, g, seed):
    tab = random_tableau(2, random.Random(seed))
    assert elementary_weight(f * g, tab) == elementary_weight(f, tab) * elementary_weight(g, tab)


def test_tableau_json_and_errors():
    em = euler_maruyama()
    assert Tableau.from_json(em.to_json_obj()).to_json_obj() == em.to_json_obj()
    with pytest.raises(DimensionMismatch):
        Tableau([1, 2], [[0]], [0, 0])
    with pytest.raises(DimensionMismatch):
        Tableau.from_json({"s": 2, "b": [1], "a": [[0]], "d": [0]})


def test_symbols_and_rendering():
    assert weight_symbol("b[1,1]") == weight_symbol("b[x,x]") == ("b[x,x]",)
    assert weight_symbol("(b),b") is None
    assert weight_symbol("x,x,b") == ("b",)
    assert render_monomial(("b[x,x]",)) == "Σ b_i d_i²"
    assert render_monomial(("b[b[x]]",)) == "Σ b_i a_ij d_j"
    assert render_monomial(("b", "b[b]")) == "Σ b_i a_ij b_k"
    assert render_monomial(("b[b,x]",), latex=True) == r"\sum b_{i} d_{i} a_{ij}"
    p = WeightPolynomial({("b[b]",): 1, (): Fraction(-1, 2), ("b",): 1, ("b[x]",): -2})
    assert p.render(lead=("b[b]",)) == "Σ b_i a_ij − 1/2 + Σ b_i − 2 Σ b_i d_i"


def test_polynomial_evaluate_matches_weights():
    tab = random_tableau(3, random.Random(9))
    p = WeightPolynomial({("b", "b[x]"): 2, (): 1})
    assert p.evaluate(tab) == 2 * elementary_weight("b", tab) * elementary_weight("b[x]", tab) + 1
