# %% [markdown]
# # Complex characters: main, tri-coloured and branch sums
#
# A seed near the modular torus with mu = 0.2+0.1i.  The Bowditch test certifies
# the character, after which every sum converges absolutely.

# %%
from markoff_mcshane import ROOT, Weights, check_bq, from_seed, sum_branch, sum_main, sum_tricolor
from markoff_mcshane.identities import psi_edge_value, z_branch

mu = 0.2 + 0.1j
x, y = 3.1, 2.9 + 0.05j
m = from_seed(x, y, z_branch(x, y, mu))
report = check_bq(m)
print(report.status, "sink:", [str(v) for v in report.sink_vertices])
print("regions with |trace| <= 2:", report.small_trace_regions)

# %%
print("main     ", sum_main(m, tol=1e-12).value)
for w in (Weights(0.2, 0.3, 0.5), Weights(1 + 1j, -1j, 0)):
    r = sum_tricolor(m, w, tol=1e-12)
    print("tricolor ", (w.p1, w.p2, w.p3), r.value, "by class:", [round(abs(c), 6) for c in r.components])

# %% [markdown]
# Branch sums: one side of an edge adds up to that edge's value, and the two
# directions of the same edge add up to 1.

# %%
for e in ROOT.edges():
    a, b = sum_branch(m, e, tol=1e-12).value, sum_branch(m, e.reverse(), tol=1e-12).value
    print(e, abs(a - psi_edge_value(e, m)), abs(a + b - 1))
