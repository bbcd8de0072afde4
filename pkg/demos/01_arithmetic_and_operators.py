# Field arithmetic and divided-power operators over F_p(x, y).
#
# Elements of K = F_p(x, y) are exact rational functions.  Every element has
# a unique expansion over the monomials x^a y^b with a, b < p^h whose
# coefficients are p^h-th powers; `decompose` returns the roots of those
# coefficients.

# %%
from towerlab import FieldSpec, parse_expr, eval_expr, print_canonical
from towerlab.frobenius import decompose, recompose

K = FieldSpec(3, ("x", "y"))
f = eval_expr(parse_expr("(x^4*y + 1)/(x + y^3)", K), K)
print("f =", print_canonical(f))

v = decompose(f, 1)
print("root coordinates at level 1:", {k: str(c) for k, c in v.coords.items()})
assert recompose(v) == f

# %%
# Frobenius is additive in characteristic p.
g = eval_expr(parse_expr("frob(x + y, 2)", K), K)
print("(x + y)^9 =", print_canonical(g))

# %%
# The symbol (1/a!) d^a/dx^a acts on monomials through binomials mod p, so
# (1/3!) d^3/dx^3 is defined over F_3 although 3! = 0 there.
from towerlab import symbol, apply, compose, render

D3 = symbol(K, 1, 3)
print("(1/3!)d^3/dx^3 (x^4) =", apply(D3, eval_expr(parse_expr("x^4", K), K)))
print("(1/3!)d^3/dx^3 (x^3) =", apply(D3, eval_expr(parse_expr("x^3", K), K)))

# Composition of symbols multiplies by a binomial: d/dx o (1/2!)d^2/dx^2 = 3 (1/3!)d^3/dx^3 = 0.
print("d/dx o (1/2)d^2/dx^2 =", render(compose(symbol(K, 1, 1), symbol(K, 1, 2))))

# %%
# On K^3 = F_3(x^3, y^3) the symbol (1/3!)d^3/dx^3 is the derivation d/d(x^3).
from towerlab.verify import symbol_identity

print("symbol identity p=3, i=1, m=1:", symbol_identity(3, 2, 1, 1))
