"""Anchored and ANOVA component maps, their inverses and the weighted norms.

For ``f`` on ``[0, 1]**d`` the anchored components are
``g_u = f^(u)(x_u; 0)`` and the ANOVA components are
``g_u = int f^(u)(x_u; t) dt_{-u}``.  Both maps are inverted exactly on
tensor polynomials:

* anchored: ``f(x) = sum_u int_{[0, x_u]} g_u``;
* ANOVA: ``f(x) = sum_u prod_{j in u} K_j g_u`` where the univariate kernel
  sends ``h`` to ``x -> int_0^1 t h(t) dt - int_x^1 h(t) dt``.
"""

from __future__ import annotations

import math
from typing import Iterator, Mapping

import numpy as np

from .core import MembershipError, SubsetLike, as_mask, check_p, iter_submasks, mask_indices
from .poly import Poly1
from .tensor import Restriction, TensorFunction, TensorTerm, lp_norm_subset, mixed_derivative, restrict
from .weights import WeightSchedule

__all__ = [
    "ComponentTuple",
    "component",
    "anchored_components",
    "anova_components",
    "anchored_reconstruct",
    "anova_reconstruct",
    "anova_kernel",
    "component_norms",
    "weighted_norm",
    "anchored_norm",
    "anova_norm",
]

_IDENTITY = Poly1((0.0, 1.0))


class ComponentTuple(Mapping[int, TensorFunction]):
    """The family ``(g_u)`` indexed by bitmask, one function per subset.

    Only components that are not identically zero are stored; looking up any
    other subset returns the zero function.  Iteration is in ascending
    bitmask order.
    """

    def __init__(self, dim: int, components: Mapping[SubsetLike, TensorFunction] | None = None):
        self.dim = int(dim)
        store = {}
        for u, g in (components or {}).items():
            bits = as_mask(u, self.dim)
            if g.dim != self.dim:
                raise ValueError(f"component for {bits:#b} has dimension {g.dim}, expected {self.dim}")
            if g.support & ~bits:
                raise ValueError(f"component for {bits:#b} depends on coordinates outside its subset")
            g = g.simplify()
            if g.terms and np.any(g.dense(mask_indices(bits)) != 0):
                store[bits] = g
        self._components = dict(sorted(store.items()))

    def __getitem__(self, u: SubsetLike) -> TensorFunction:
        bits = as_mask(u, self.dim)
        if bits >> self.dim:
            raise KeyError(u)
        return self._components.get(bits, TensorFunction.zero(self.dim))

    def __iter__(self) -> Iterator[int]:
        return iter(self._components)

    def __len__(self) -> int:
        return len(self._components)

    def __repr__(self) -> str:
        return f"ComponentTuple(dim={self.dim}, nonzero={list(self._components)})"

    def max_abs_difference(self, other: "ComponentTuple") -> float:
        """Largest coefficient difference over all subsets."""
        if other.dim != self.dim:
            raise ValueError("dimension mismatch")
        worst = 0.0
        for bits in set(self) | set(other):
            diff = (self[bits] - other[bits]).simplify()
            if diff.terms:
                worst = max(worst, float(np.max(np.abs(diff.dense(mask_indices(bits))))))
        return worst


def component(f: TensorFunction, u: SubsetLike, mode: Restriction | str) -> TensorFunction:
    """A single component: differentiate in ``u``, then anchor or integrate out the rest."""
    return restrict(mixed_derivative(f, u), u, mode).simplify()


def _components(f: TensorFunction, anchored: bool) -> ComponentTuple:
    # Each term only feeds subsets of its own support: differentiating in a
    # coordinate the term does not depend on kills it.
    collected: dict[int, list[TensorTerm]] = {}
    for t in f.terms:
        derivs = [(j, h.derivative()) for j, h in t.factors]
        rests = [h.coeffs[0] if anchored else h.integral() for _, h in t.factors]
        for v in iter_submasks(t.support):
            c = t.coeff
            facs = []
            for (j, dh), r in zip(derivs, rests):
                if v >> j & 1:
                    facs.append((j, dh))
                else:
                    c *= r
            if c != 0.0:
                collected.setdefault(v, []).append(TensorTerm(c, tuple(facs)))
    return ComponentTuple(f.dim, {v: TensorFunction(f.dim, ts) for v, ts in collected.items()})


def anchored_components(f: TensorFunction) -> ComponentTuple:
    """``g_u = f^(u)(x_u; 0)`` for every ``u``; ``g_empty = f(0)``."""
    return _components(f, anchored=True)


def anova_components(f: TensorFunction) -> ComponentTuple:
    """``g_u = int f^(u)(x_u; t) dt`` over the complementary coordinates."""
    return _components(f, anchored=False)


def anova_kernel(h: Poly1) -> Poly1:
    """``x -> int_0^1 t h(t) dt - (H(1) - H(x))`` with ``H`` the antiderivative of ``h``."""
    H = h.antiderivative()
    first_moment = (_IDENTITY * h).integral()
    return H + (first_moment - H(1.0))


def _reconstruct(g: ComponentTuple, lift) -> TensorFunction:
    terms = []
    for bits, comp in g.items():
        axes = mask_indices(bits)
        lifted_one = lift(Poly1.constant(1.0))
        for t in comp.terms:
            facs = dict(t.factors)
            new = tuple((j, lift(facs[j]) if j in facs else lifted_one) for j in axes)
            terms.append(TensorTerm(t.coeff, new))
    return TensorFunction(g.dim, terms).simplify()


def anchored_reconstruct(g: ComponentTuple) -> TensorFunction:
    """``f(x) = sum_u int_{[0, x]^u} g_u``."""
    return _reconstruct(g, Poly1.antiderivative)


def anova_reconstruct(g: ComponentTuple) -> TensorFunction:
    """Inverse of :func:`anova_components`, applying :func:`anova_kernel` per coordinate."""
    return _reconstruct(g, anova_kernel)


def component_norms(g: ComponentTuple, p: float) -> dict[int, float]:
    """``L_p([0, 1]**u)`` norm of every stored component."""
    return {bits: lp_norm_subset(comp, bits, p) for bits, comp in g.items()}


def weighted_norm(g: ComponentTuple, weights: WeightSchedule, p: float) -> float:
    """``(sum_u gamma_u**-p ||g_u||_p**p)**(1/p)``, the sup over ``u`` for ``p = inf``.

    Raises
    ------
    MembershipError
        Some ``g_u`` with ``gamma_u = 0`` is not the zero function.
    """
    p = check_p(p)
    if weights.dim != g.dim:
        raise ValueError(f"weights have dimension {weights.dim}, function has {g.dim}")
    table = weights.table()
    scaled = []
    for bits, comp in g.items():
        gamma = float(table[bits])
        if gamma == 0.0:
            if not comp.is_zero():
                raise MembershipError(
                    f"component on subset {_fmt(bits)} is nonzero but its weight is 0; "
                    "the function is outside the weighted space"
                )
            continue
        scaled.append(lp_norm_subset(comp, bits, p) / gamma)
    if not scaled:
        return 0.0
    scaled = np.array(scaled)
    if math.isinf(p):
        return float(np.max(scaled))
    top = float(np.max(scaled))
    if top == 0.0:
        return 0.0
    # factor out the largest term so the p-th powers cannot overflow
    return top * float(np.sum((scaled / top) ** p)) ** (1 / p)


def anchored_norm(f: TensorFunction, weights: WeightSchedule, p: float) -> float:
    return weighted_norm(anchored_components(f), weights, p)


def anova_norm(f: TensorFunction, weights: WeightSchedule, p: float) -> float:
    return weighted_norm(anova_components(f), weights, p)


def _fmt(bits: int) -> str:
    return "{" + ",".join(str(j + 1) for j in mask_indices(bits)) + "}"
