"""Brute-force references: midpoint-rule integrals and finite-difference mixed derivatives.

These work on any point-evaluable function and share no code with the exact
polynomial pipeline, so agreement between the two is evidence rather than a
tautology.  Accuracy is oracle grade only.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Callable

import numpy as np

from .core import CapacityError, CoordSubset, SubsetLike, as_mask, mask_indices

__all__ = ["GridSpec", "GRID_MAX_POINTS", "integral_oracle", "fd_mixed_derivative"]

GRID_MAX_POINTS = 10**7
_CHUNK = 1 << 18

Evaluable = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class GridSpec:
    points_per_axis: int
    axes: CoordSubset

    def __post_init__(self):
        if self.points_per_axis < 2:
            raise ValueError("need at least 2 points per axis")

    @property
    def size(self) -> int:
        return self.points_per_axis ** len(self.axes)


def integral_oracle(
    f: Evaluable,
    u: SubsetLike,
    p: float,
    grid: GridSpec,
    dim: int | None = None,
    base: np.ndarray | None = None,
) -> float:
    """Composite midpoint estimate of ``int_{[0,1]^u} |f|**p``.

    ``f`` takes an ``(n, dim)`` array of points.  Coordinates outside ``u``
    are held at ``base`` (zeros by default).  The error is ``O(n**-2)`` per
    axis for smooth integrands.
    """
    dim = grid.axes.dim if dim is None else dim
    bits = as_mask(u, dim)
    if bits != grid.axes.bits:
        raise ValueError("grid axes must match the integration subset")
    if grid.size > GRID_MAX_POINTS:
        raise CapacityError(f"grid of {grid.size} points exceeds the cap of {GRID_MAX_POINTS}")
    axes = mask_indices(bits)
    point = np.zeros(dim) if base is None else np.asarray(base, dtype=float)
    n = grid.points_per_axis
    mid = (np.arange(n) + 0.5) / n
    if not axes:
        return float(np.abs(f(point[None, :]))[0] ** p)

    total = 0.0
    count = grid.size
    k = len(axes)
    for start in range(0, count, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, count))
        pts = np.tile(point, (idx.size, 1))
        rem = idx
        for j in reversed(axes):
            pts[:, j] = mid[rem % n]
            rem = rem // n
        total += float(np.sum(np.abs(f(pts)) ** p))
    return total / n**k


def fd_mixed_derivative(f: Evaluable, u: SubsetLike, x, h: float, dim: int | None = None) -> float:
    """Tensor central difference for ``prod_{j in u} d/dx_j f`` at ``x``.

    Sums ``f(x + h s)`` over the ``2**|u|`` sign patterns ``s`` with the sign
    ``prod s_j`` and divides by ``(2h)**|u|``.  Error ``O(h**2)``.
    """
    x = np.asarray(x, dtype=float)
    dim = x.size if dim is None else dim
    bits = as_mask(u, dim)
    if h <= 0:
        raise ValueError("step must be positive")
    axes = mask_indices(bits)
    for j in axes:
        if x[j] - h < 0 or x[j] + h > 1:
            raise ValueError(f"stencil leaves the unit cube along coordinate {j + 1}")
    if not axes:
        return float(f(x[None, :])[0])
    pts = []
    signs = []
    for pattern in product((-1.0, 1.0), repeat=len(axes)):
        y = x.copy()
        for j, s in zip(axes, pattern):
            y[j] += s * h
        pts.append(y)
        signs.append(np.prod(pattern))
    vals = f(np.array(pts))
    return float(np.dot(signs, vals) / (2 * h) ** len(axes))
