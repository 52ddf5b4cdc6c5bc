"""
Exotic forests: parsing, enumeration and symmetry
=================================================

A forest is written as comma separated trees.  ``b`` is a black vertex,
``x`` a grafted (noise) vertex, integers are liana ends that must occur in
pairs, and ``( .. )`` wraps an aroma.
"""

from exotic_forests.enumeration import counts_by_size, enumerate_forests
from exotic_forests.forest import sigma
from exotic_forests.text import parse, print_latex

f = parse("b[1,1,b[2]],b[2]")
print("canonical key:", f.key)
print("size:", f.size, " lianas:", f.n_lianas, " sigma:", sigma(f))
print("latex:", print_latex(f))

# grafted vertices count one half towards the size
for family in ("grafted_trees", "exotic_trees"):
    print(family, dict(counts_by_size(3, family)))

# the exotic trees of size 2 with their symmetry coefficients
for t in enumerate_forests(2, "exotic_trees"):
    print(f"  {t.key:<12} sigma={sigma(t)}")
