# %% [markdown]
# # The modular torus
#
# Seed (3, 3, 3) gives the classical Markoff triples.  Every trace is three times
# a Markoff number, and the sum of 1/(1+e^l) over simple closed geodesics is 1/2.

# %%
from collections import Counter

from markoff_mcshane import from_seed, regions_within, sum_main
from markoff_mcshane.identities import h_mu

m = from_seed(3, 3, 3)
shell = regions_within(3) - regions_within(2)
print(sorted(Counter(int(m.trace(x).real) // 3 for x in shell).items()))

# %% [markdown]
# Terms decay like 1/|trace|^2, so the truncated sum converges quickly.

# %%
for tol in (1e-4, 1e-8, 1e-12):
    r = sum_main(m, tol=tol)
    print(f"tol={tol:.0e}  sum={r.value.real:.15f}  depth={r.depth}  terms={r.terms_used}"
          f"  residual={r.residual_estimate:.1e}")

# %%
# the largest single summands sit at the root
top = sorted(regions_within(2), key=lambda x: -abs(h_mu(m.trace(x), 0)))[:5]
for x in top:
    print(x, m.trace(x).real, h_mu(m.trace(x), 0).real)
