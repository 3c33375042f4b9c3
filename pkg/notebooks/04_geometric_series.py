# %% [markdown]
# # Sums of 1/(y_n y_{n+1}) along a fan
#
# Around a region with trace x the neighbouring traces follow y_{n+1} = x y_n - y_{n-1},
# so y_n = A lam^n + B lam^-n.  The one- and two-sided sums have closed forms.

# %%
import numpy as np

from markoff_mcshane.appendix_series import (GeometricPair, neighbor_parameters, one_sided_closed,
                                             partial_sum_oracle, property_suite, two_sided_closed)

g = GeometricPair(2, 1, 1)
print(one_sided_closed(g), partial_sum_oracle(g, 0, 60))
print(two_sided_closed(g), partial_sum_oracle(g, -60, 60))

# %%
# the fan around 0/1 on the modular torus: traces 3, 6, 15, 39, ...
g = neighbor_parameters(3, 3, 6)
print("lam =", g.lam, " AB =", g.A * g.B)
print([round(g.y(n).real) for n in range(6)])

# %%
rep = property_suite(trials=200, rng_seed=1)
print("max deviations:", rep["max_deviation"])
errs = np.array([r["one_sided"] for r in rep["rows"]])
print("median one-sided deviation:", np.median(errs))
