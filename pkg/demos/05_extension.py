# Extending a one-step foliation W_1 (with K^p inside W_1) to W_2.
#
# extend_one_foliation finds W_2 with W_2 * K^p = W_1 and [W_1 : W_2] = [K : W_1];
# the splitting check confirms that the new tangent space complements the
# kernel of d on W_1.

# %%
from towerlab import FieldSpec, SubfieldPresentation, extend_one_foliation, splitting_check

for p, make in [(2, lambda x, y: (x + y**2,)), (2, lambda x, y: (x * y,)), (3, lambda x, y: (x**2 + y,))]:
    K = FieldSpec(p, ("x", "y"))
    W1 = SubfieldPresentation(K, make(*K.gens()))
    W2, F1, F2 = extend_one_foliation(W1)
    print(f"p={p}: W1 = {W1}  ->  W2 = {W2}   splits: {splitting_check(F1, F2)}")

# %%
# Script form of the same computation.
from towerlab.dsl import parse_script
from towerlab.runner import run_script

src = """
field K = GF(2)(x, y)
subfield W1 = <x*y>
subfield W2 = extend(W1)
print W2
assert splits(W1, W2)
"""
print(run_script(parse_script(src), "inline").human())
