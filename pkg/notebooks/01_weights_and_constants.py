"""
Weight schedules and equivalence constants
==========================================

How much can the anchored and the ANOVA norm of the same function differ?
The answer is governed by two numbers computed from the weights alone,
``C_{d,1}`` and ``C_{d,inf}``, and their geometric interpolation ``C_{d,p}``.
"""

# %%
import math

import numpy as np

from anchova import (
    DimensionDependentWeights,
    ExplicitWeights,
    FiniteOrderWeights,
    ProductWeights,
    check_compatibility,
    constant_c1,
    constant_cdp,
    constant_cinf,
)

# %% [markdown]
# Product weights are generated by one number per coordinate.  For two
# coordinates with gamma = 1 every subset gets weight 1.

# %%
w = ProductWeights((1.0, 1.0))
print("weight table (bitmask order):", w.table())
print("C_1 =", constant_c1(w), " C_inf =", constant_cinf(w), " C_2 =", constant_cdp(w, 2))

# %% [markdown]
# The same table handed over without its product structure goes through the
# brute-force subset transforms instead of the closed forms, and lands on
# the same numbers.

# %%
explicit = ExplicitWeights(2, w.table())
print(constant_c1(explicit), constant_cinf(explicit))

# %% [markdown]
# Growth with the dimension: for gamma_j = 1 both constants explode
# geometrically, while gamma_j = j**-2 keeps them bounded.

# %%
for d in (1, 2, 4, 8, 16, 32):
    flat = ProductWeights((1.0,) * d)
    decaying = ProductWeights(tuple(1 / j**2 for j in range(1, d + 1)))
    print(f"d={d:2d}  flat C_2={constant_cdp(flat, 2):12.4g}   decaying C_2={constant_cdp(decaying, 2):.6f}")

# %% [markdown]
# Finite-order weights switch off every subset above a fixed size.  Their
# ``C_{d,1}`` stops growing once ``d`` passes the order.

# %%
for d in (2, 4, 8, 16):
    fo = FiniteOrderWeights(d, c=1.0, omega=0.5, order=2)
    print(d, constant_c1(fo), round(constant_cinf(fo), 4))

# %% [markdown]
# Dimension-dependent weights ``d**-|u|`` give constants bounded by ``e``.

# %%
print([round(constant_c1(DimensionDependentWeights(d)), 6) for d in (1, 10, 100, 1000)], "e =", math.e)

# %% [markdown]
# Compatibility: a subset with positive weight needs every one of its subsets
# to have positive weight too.  The checker names the offending pairs.

# %%
bad = ExplicitWeights(2, np.array([1.0, 0.0, 1.0, 1.0]))
for u, v in check_compatibility(bad):
    print(f"gamma_{u} > 0 but gamma_{v} = 0")
