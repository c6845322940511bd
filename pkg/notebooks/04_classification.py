"""
Uniform, polynomial or no equivalence
=====================================

Whether the constants stay bounded as the dimension grows depends on how fast
the product weights decay.  A finite computation cannot settle convergence,
so every verdict comes with its diagnostics and a confidence flag.
"""

# %%
from anchova import classify_equivalence, tau_zero
from anchova.weights import classify_dimension_dependent, classify_finite_order

# %%
families = {
    "2**-j": lambda j: 2.0**-j,
    "1/j": lambda j: 1.0 / j,
    "j**-2": lambda j: 1.0 / j**2,
    "1": lambda j: 1.0,
}
for name, gammas in families.items():
    rep = classify_equivalence(gammas, p=2)
    print(f"{name:6s} {rep.regime:10s} bound={rep.exponent_bound}  confidence={rep.confidence}  "
          f"tail/total={rep.tail_ratio:.2e}  tau0={rep.tau0:.4f} at d={rep.tau0_argmax}")

# %% [markdown]
# ``j**-2`` is summable, but its tail shrinks only like ``1/d`` and the
# tail test at ``d_max = 1000`` cannot see that.  The verdict falls back to a
# (valid) polynomial bound and the flag says not to trust it much.  Raising
# ``d_max`` does not change the picture for such slow tails.
#
# The quantity behind the polynomial exponent is
# ``sup_d sum_{j<=d} gamma_j / log(d + 1)``.

# %%
print(tau_zero(lambda j: 1.0 / j, 1000))

# %% [markdown]
# Finite-order and dimension-dependent weights have exact answers.

# %%
print(classify_finite_order(3, 2))
print(classify_dimension_dependent(2))
