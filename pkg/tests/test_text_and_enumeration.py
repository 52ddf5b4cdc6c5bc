from fractions import Fraction

import pytest

from exotic_forests import tables
from exotic_forests.enumeration import (
    SizeBoundExceeded,
    counts_by_size,
    enumerate_forests,
    forests_of_size,
)
from exotic_forests.forest import EMPTY, DecoratedVertexHasChild, sigma
from exotic_forests.text import ForestSyntaxError, parse, print_canonical, print_latex

H = Fraction(1, 2)


def test_parse_exotic_tree():
    f = parse("b[1,b[1,b[2]],2]")
    assert f.n == 7 and f.n_lianas == 2 and len(f.roots) == 1


def test_parse_aroma_and_tree():
    f = parse("(b[b]),b[b[x]]")
    assert f.n_aromas() == 1 and len(f.roots) == 1 and f.count("x") == 1


def test_parse_rejects_child_of_grafted():
    with pytest.raises(DecoratedVertexHasChild):
        parse("x[b]")


@pytest.mark.parametrize("text, pos", [("b[", 2), ("b]", 1), ("b[b,", 4), ("q", 0), ("b,,b", 2)])
def test_syntax_error_position(text, pos):
    with pytest.raises(ForestSyntaxError) as err:
        parse(text)
    assert err.value.position == pos


def test_print_empty_and_relabel():
    assert print_canonical(EMPTY) == ""
    assert parse("") == EMPTY
    assert print_canonical(parse("b[2,1,b[2,1]]")) == "b[1,2,b[1,2]]"
    assert print_latex(parse("b[b]")) == r"\forest{b[b]}"


def test_label_zero_accepted():
    assert parse("b[0,0]") == parse("b[1,1]")


@pytest.mark.parametrize("row", tables.TREES, ids=lambda r: r.grafted)
def test_tree_table_round_trip(row):
    for text in (row.grafted, row.exotic):
        if text is not None:
            f = parse(text)
            assert parse(print_canonical(f)) == f


def test_tree_counts():
    assert counts_by_size(3, "grafted_trees") == tables.GRAFTED_TREE_COUNTS
    assert counts_by_size(3, "exotic_trees") == tables.EXOTIC_TREE_COUNTS


def test_forest_counts_frozen():
    assert [n for _, n in sorted(counts_by_size(3, "grafted_forests").items())] == [1, 2, 4, 9, 19, 42]
    assert [n for _, n in sorted(counts_by_size(3, "exotic_forests").items())] == [2, 9, 44]
    assert [n for _, n in sorted(counts_by_size(4, "exotic_forests", aroma_free=True).items())] == [2, 6, 21, 85]


def test_size_one_exotic_forests():
    keys = {f.key for f in forests_of_size(1, "exotic_forests")}
    assert keys == {"b", "1,1"}
    assert {f.key for f in forests_of_size(1, "exotic_trees")} == {"b"}


def test_no_duplicates_and_sizes():
    for family in ("grafted_forests", "exotic_forests"):
        fs = enumerate_forests(3, family)
        assert len({f.key for f in fs}) == len(fs)
        assert all(f.size <= 3 for f in fs)


def test_table_sigmas():
    for row in tables.TREES:
        assert sigma(parse(row.grafted)) == row.sigma_grafted
        if row.exotic:
            assert sigma(parse(row.exotic)) == row.sigma_exotic


def test_size_bound(monkeypatch):
    with pytest.raises(SizeBoundExceeded):
        enumerate_forests(5, "exotic_forests")
    monkeypatch.setenv("EXOTIC_MAX_SIZE", "2")
    with pytest.raises(SizeBoundExceeded):
        enumerate_forests(3, "exotic_forests")
    assert len(enumerate_forests(2, "exotic_forests")) == 11
