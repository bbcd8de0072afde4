# The three faces of a tower: subfields, operator algebras, p-Lie algebras.
#
# From a tower we compute
#   D_n = operators on K that are W_n-linear (dimension [K : W_n] over K),
#   F_n = derivations of W_(n-1) that kill W_n (rank r with p^r = [W_(n-1) : W_n]),
# and check that each can be recovered from the others.

# %%
from towerlab import (FieldSpec, SubfieldPresentation, build_tower, tower_to_sequence,
                      sequence_to_tower, algebra_of_tower, unpack, render)

K = FieldSpec(3, ("x", "y"))
x, y = K.gens()
t = build_tower(SubfieldPresentation(K, (x * y + y,)), 2)
print("degrees", t.degrees)

seq = tower_to_sequence(t)
for i, F in enumerate(seq.algebras, start=1):
    print(f"F_{i}: rank {F.rank}, generators {[F.describe(c) for c in F.coords.rows]}")

# %%
alg = algebra_of_tower(t)
print("dim D_n:", alg.dims, " [K : W_n]:", [W.degree_in_K for W in t.levels])

# %%
# Unpacking restricts D_n to W_(n-1) and keeps the derivations; the printed
# lifts are combinations of the symbols (1/p^m!)d^(p^m)/dx_j^(p^m).
un = unpack(alg)
for i, lifts in enumerate(un.lifts, start=1):
    print(f"level {i}:", [render(D) for D in lifts] if lifts else lifts)
print("unpack == tower_to_sequence:", un.same_as(seq))

# %%
back = sequence_to_tower(seq)
print("annihilators recover the tower:", all(a.space == b.space for a, b in zip(back.levels, t.levels)))
