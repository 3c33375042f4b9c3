# %% [markdown]
# # A character fixed by an Anosov map
#
# theta = [[2, 1], [1, 1]] fixes the figure-eight character at mu = 0.  The
# character fails the Bowditch test (infinitely many traces lie in the disc of
# radius 2) but the sum over one period of theta's axis still vanishes.

# %%
from markoff_mcshane import IntegerMatrix2, anosov_fixed_seed, check_bq, from_seed, sum_relative
from markoff_mcshane.bowditch import BQConfig, check_theta_invariance
from markoff_mcshane.farey import anosov_axis

theta = IntegerMatrix2(2, 1, 1, 1)
for s in anosov_fixed_seed(theta, 0):
    print(s, "mu =", s.mu)

seed = anosov_fixed_seed(theta, 0)[0]
m = from_seed(*seed)
print("invariant:", check_theta_invariance(m, theta))
print("BQ on the whole tree:", check_bq(m, BQConfig(max_depth=10, max_vertices=2000)).status)
print("axis:", [str(v) for v in anosov_axis(theta)])

# %%
for tol in (1e-4, 1e-8, 1e-12):
    r = sum_relative(m, theta, tol=tol, max_depth=40)
    print(f"tol={tol:.0e}  |sum|={abs(r.value):.2e}  depth={r.depth}  terms={r.terms_used}")
