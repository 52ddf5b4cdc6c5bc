"""
Expectations and pairing counts
===============================

Averaging over the Gaussian noise pairs up the grafted vertices into
lianas.  The coefficient of each exotic forest counts the pairings that
produce it.
"""

from exotic_forests.stochastic import expectation, pairing_count, pairing_count_bruteforce

g = "b[x,x,b[x,x]]"
print(f"E[{g}] =", expectation(g))

for fine in ("b[1,1,b[2,2]]", "b[1,2,b[1,2]]"):
    print(fine, pairing_count(fine, g), pairing_count_bruteforce(fine, g))

# an odd number of grafted vertices averages out
print("E[b[x]] =", expectation("b[x]"))
