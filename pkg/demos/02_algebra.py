"""
Products and coproducts
=======================

Concatenation, grafting, the Grossman-Larson product and the dual of the
Connes-Kreimer coproduct.  Results are formal sums with rational
coefficients.
"""

from exotic_forests.algebra import a_sigma, ck_coproduct, dual_ck, gl_product, graft

print("b graft b[x]     =", graft("b", "b[x]"))
print("b gl b[1,1]      =", gl_product("b", "b[1,1]"))
print("b dual-CK b      =", dual_ck("b", "b"))

# admissible cuts never split a liana
for left, right, c in ck_coproduct("b[1,1,b]").items():
    print(f"  {c} * ({left.key or '∅'}) ⊗ ({right.key or '∅'})")

# A_σ rescales by σ and turns the product ⋄ into the dual coproduct
x, y = "b", "b[1,1]"
print(a_sigma(gl_product(x, y)) == dual_ck(a_sigma(x), a_sigma(y)))
