# The example families shipped with the command line tool.
#
# Each run builds the tower, its operator algebra and the unpacked sequence,
# and compares the level generators with a closed form.  The same reports
# are printed by `towerlab example <name>`.

# %%
from towerlab.families import run_example

print(run_example("ekedahl", p=2, depth=3, A=[1, 1]).human())
print(run_example("ekedahl", p=3, depth=2, A=[1, 2]).human())

# %%
# The non-integrable tower has constant degree 2.  The polynomial probe of
# degree <= 8 returns elements of every computed level; at finite depth
# these need not be constants (x + y^2 + y^4 lies in W_1, W_2 and W_3).
print(run_example("nonintegrable", p=2, depth=3).human())

# %%
print(run_example("transcendental", p=3, depth=2).human())
print(run_example("ppower", p=2, depth=2).human())
