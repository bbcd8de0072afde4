# Power towers W_0 = K > W_1 > W_2 > ... with W_n = W * K^(p^n).
#
# A tower is stored level by level as a subspace of K over K^(p^n).  The
# degrees [W_(n-1) : W_n] never increase.

# %%
from towerlab import FieldSpec, SubfieldPresentation, build_tower, foliation_profile

K = FieldSpec(2, ("x", "y"))
x, y = K.gens()

for gens in [(), (x,), (x + y**2,), (x, y**4), (x * y, x**2 * y)]:
    t = build_tower(SubfieldPresentation(K, gens), 3)
    prof = foliation_profile(t)
    print(f"{str(SubfieldPresentation(K, gens)):18s} degrees {t.degrees}  profile {prof}")

# %%
# Explicit towers give every level its own generators; the composite law
# W_i * K^(p^j) = W_j is validated on construction.
from towerlab import build_tower_explicit
from towerlab.errors import NotAPowerTower

levels = [SubfieldPresentation(K, (x, y**2)),
          SubfieldPresentation(K, (x + y**2, y**4)),
          SubfieldPresentation(K, (x + y**2 + y**4, y**8))]
t = build_tower_explicit(levels)
print("explicit degrees:", t.degrees)

try:
    build_tower_explicit([SubfieldPresentation(K, (x,)), SubfieldPresentation(K, (y, x**4))])
except NotAPowerTower as exc:
    print("rejected:", exc)
