"""
Checking a stochastic Runge-Kutta method
========================================

A tableau ``(b, a, d)`` gives the elementary weights; the conditions are
polynomials in those weights.  Euler-Maruyama has order one for the
invariant measure.  A two-stage method reaches order two.
"""

from fractions import Fraction

from exotic_forests.order import assemble_omega, method_order, omega_eval
from exotic_forests.srk import Tableau, euler_maruyama

conds = assemble_omega(3)

em = euler_maruyama()
order, first, value = method_order(conds, em)
print("Euler-Maruyama: order", order, "first failing condition", first.target.key, "=", value)

half = Fraction(1, 2)
two_stage = Tableau([half, half], [[0, 0], [1, 0]], [0, 1])
order, first, value = method_order(conds, two_stage)
print("two-stage:      order", order, "first failing condition", first.target.key, "=", value)
for c in conds[:4]:
    print(f"  ω({c.target.key}) = {omega_eval(c, two_stage)}")
