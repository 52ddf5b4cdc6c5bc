"""
Numerical cross-checks
======================

Each forest acts as a differential operator on polynomial test functions.
With ``f = -∇V`` every ELI and IBP move leaves the integral against the
density ``exp(-V)`` unchanged.  A rotational, non-gradient field breaks
ELI invariance.
"""

from exotic_forests.oracle import invariance_defect, quartic_1d, rotated_2d
from exotic_forests.order import all_moves

prob = quartic_1d()
moves = all_moves(3)
worst = max(invariance_defect(m.before, m.after, prob)[2] for m in moves)
print(f"{len(moves)} moves, worst relative defect {worst:.1e}")

control = rotated_2d()
eli = [m for m in moves if m.kind == "ELI"]
print("non-gradient ELI defect", max(invariance_defect(m.before, m.after, control)[2] for m in eli))
