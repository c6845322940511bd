"""
Anchored and ANOVA components of a polynomial
=============================================

Both decompositions split a function into one piece per coordinate subset.
The anchored piece on ``u`` differentiates in ``u`` and freezes the other
coordinates at 0; the ANOVA piece differentiates in ``u`` and averages the
other coordinates out.
"""

# %%
import numpy as np

from anchova import (
    ProductWeights,
    TensorFunction,
    anchored_components,
    anchored_norm,
    anchored_reconstruct,
    anova_components,
    anova_norm,
    anova_reconstruct,
)
from anchova.decomp import anova_kernel
from anchova.poly import Poly1

# %% [markdown]
# A small function of two variables, ``f = x1*x2 + x1**2 - 0.3``.

# %%
f = (TensorFunction.monomial(2, {0: 1, 1: 1}) + TensorFunction.monomial(2, {0: 2})) - 0.3

anch = anchored_components(f)
anova = anova_components(f)
x = np.array([[0.2, 0.7]])
for bits in range(4):
    print(f"subset {bits:02b}: anchored g(x) = {anch[bits](x)[0]: .4f}   ANOVA g(x) = {anova[bits](x)[0]: .4f}")

# %% [markdown]
# Each decomposition is invertible.  Rebuilding from the components returns
# the original coefficients, which is the strongest kind of agreement.

# %%
pts = np.random.default_rng(0).random((5, 2))
print(np.max(np.abs(anchored_reconstruct(anch)(pts) - f(pts))))
print(np.max(np.abs(anova_reconstruct(anova)(pts) - f(pts))))

# %% [markdown]
# In one dimension the ANOVA inverse is the identity
# ``f(x) = int f + int_0^1 (t - 1[t >= x]) f'(t) dt``.  The kernel on the
# right maps polynomials to polynomials, so it is evaluated exactly.

# %%
h = Poly1((0.5, -1.0, 0.0, 2.0))
xs = np.linspace(0, 1, 6)
print(h(xs))
print(h.integral() + anova_kernel(h.derivative())(xs))

# %% [markdown]
# Weighted norms: the weights divide each component before the ``l_p`` sum,
# so a small weight on a subset makes that subset expensive.

# %%
for gamma in (1.0, 0.1):
    w = ProductWeights((gamma, gamma))
    print(gamma, [round(anchored_norm(f, w, p), 5) for p in (1, 2, float("inf"))],
          [round(anova_norm(f, w, p), 5) for p in (1, 2, float("inf"))])
