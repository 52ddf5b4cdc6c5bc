"""
Order conditions for the invariant measure
==========================================

Connecting lianas are removed by ELI and IBP moves.  What remains is one
condition per exotic forest without connecting lianas.  Conditions on
forests whose liana blocks split are products of smaller ones and are
marked redundant.
"""

from exotic_forests.order import assemble_omega, reduce_by_multiplicativity, run_algorithm1

conds = assemble_omega(3)
kept, dropped = reduce_by_multiplicativity(conds)
print(f"{len(conds)} conditions, {len(dropped)} redundant")
for c in conds:
    mark = "*" if c.redundant else " "
    print(f"{mark} {c.target.key:<14} {c.render()}")

# the moves performed on one source forest
image, chains = run_algorithm1("b[1],b[1]")
print("A(b[1],b[1]) =", image)
for ch in chains:
    print("  ", " -> ".join(s.kind for s in ch.steps), "=>", ch.final.key, ch.coefficient)
