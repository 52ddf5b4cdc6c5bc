"""Hypothesis strategies drawing from the enumerated families."""

from hypothesis import strategies as st

from exotic_forests.enumeration import enumerate_forests

EXOTIC_3 = enumerate_forests(3, "exotic_forests")
EXOTIC_AF_3 = enumerate_forests(3, "exotic_forests", aroma_free=True)
GRAFTED_3 = enumerate_forests(3, "grafted_forests")
GRAFTED_AF_3 = enumerate_forests(3, "grafted_forests", aroma_free=True)
TREES_3 = enumerate_forests(3, "grafted_trees", aroma_free=True)

exotic = st.sampled_from(EXOTIC_3)
exotic_aroma_free = st.sampled_from(EXOTIC_AF_3)
grafted = st.sampled_from(GRAFTED_3)
grafted_aroma_free = st.sampled_from(GRAFTED_AF_3)
trees = st.sampled_from(TREES_3)


def small(forests, limit):
    return st.sampled_from([f for f in forests if f.size <= limit])
