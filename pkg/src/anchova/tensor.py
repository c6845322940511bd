"""Sums of elementary tensor-product polynomials on the unit cube.

A :class:`TensorFunction` is ``sum_i c_i prod_j h_ij(x_j)`` with univariate
polynomial factors.  The class is closed under mixed partial derivatives,
anchoring a coordinate at 0 and integrating a coordinate over [0, 1], which is
all the anchored and ANOVA machinery needs, and every one of those operations
is exact on coefficients.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np
from numpy.polynomial import polynomial as P
from scipy import optimize, signal

from .core import CapacityError, QuadratureWarning, SubsetLike, as_mask, check_p, mask_indices
from .poly import Poly1, is_even_integer, lp_norm_1d
from .quadrature import adaptive_gauss_legendre, gauss_legendre_01, smoothing_map

__all__ = [
    "TensorTerm",
    "TensorFunction",
    "Restriction",
    "mixed_derivative",
    "restrict",
    "lp_norm_subset",
    "QUADRATURE_MAX_AXES",
    "SUP_MAX_AXES",
]

QUADRATURE_MAX_AXES = 8
SUP_MAX_AXES = 6
ZERO_TOL = 1e-12

_EXPANSION_MAX_SIZE = 4_000_000
_LINE_RTOL = 1e-10
_MAX_LINES = 1 << 16
_NESTED_MAX_OUTER = 2
_LINE_NODES = 24
_SUP_GRID = 33
_SUP_MAX_POINTS = 2_000_000


@dataclass(frozen=True)
class TensorTerm:
    """``coeff * prod_{(j, h) in factors} h(x_j)``.

    Factors are sorted by coordinate; constant factors are folded into the
    coefficient, so a coordinate is listed only if the term really depends on
    it.  A zero factor zeroes the whole term.
    """

    coeff: float
    factors: tuple[tuple[int, Poly1], ...] = ()

    def __post_init__(self):
        c = float(self.coeff)
        kept = {}
        for j, h in self.factors:
            if not isinstance(h, Poly1):
                h = Poly1(tuple(h))
            j = int(j)
            if j in kept:
                raise ValueError(f"coordinate {j} appears twice in one term")
            if h.is_constant:
                c *= h.coeffs[0] if h.coeffs else 0.0
            else:
                kept[j] = h
        if c == 0.0:
            kept = {}
        object.__setattr__(self, "coeff", c)
        object.__setattr__(self, "factors", tuple(sorted(kept.items())))

    @property
    def support(self) -> int:
        bits = 0
        for j, _ in self.factors:
            bits |= 1 << j
        return bits

    def factor(self, j: int) -> Poly1 | None:
        for k, h in self.factors:
            if k == j:
                return h
        return None

    def key(self) -> tuple:
        return tuple((j, h.coeffs) for j, h in self.factors)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        out = np.full(x.shape[0], self.coeff)
        for j, h in self.factors:
            out = out * h(x[:, j])
        return out

    def replace(self, j: int, h: Poly1 | None, coeff_factor: float = 1.0) -> "TensorTerm":
        """Copy with the factor on ``j`` replaced (``None`` drops it)."""
        facs = [(k, g) for k, g in self.factors if k != j]
        if h is not None:
            facs.append((j, h))
        return TensorTerm(self.coeff * coeff_factor, tuple(facs))


class TensorFunction:
    """Finite sum of :class:`TensorTerm` on ``[0, 1]**dim``.

    Coordinates are 0-based.  Instances are immutable; arithmetic returns new
    objects.  Equality of representations is not structural (``x + x`` and
    ``2x`` are different term lists); compare by evaluation or via
    :meth:`dense`.
    """

    __slots__ = ("dim", "terms")

    def __init__(self, dim: int, terms: Iterable[TensorTerm] = ()):
        if dim < 0:
            raise ValueError("dimension must be nonnegative")
        terms = tuple(t for t in terms if t.coeff != 0.0)
        for t in terms:
            if t.support >> dim:
                raise ValueError(f"term depends on a coordinate >= dim={dim}")
        object.__setattr__(self, "dim", int(dim))
        object.__setattr__(self, "terms", terms)

    def __setattr__(self, name, value):
        raise AttributeError("TensorFunction is immutable")

    # constructors

    @classmethod
    def constant(cls, c: float, dim: int) -> "TensorFunction":
        return cls(dim, [TensorTerm(c)])

    @classmethod
    def zero(cls, dim: int) -> "TensorFunction":
        return cls(dim)

    @classmethod
    def from_factors(cls, dim: int, coeff: float, factors: Mapping[int, Iterable[float] | Poly1]) -> "TensorFunction":
        """Single elementary tensor ``coeff * prod_j factors[j](x_j)``."""
        facs = tuple((j, h if isinstance(h, Poly1) else Poly1(tuple(h))) for j, h in factors.items())
        return cls(dim, [TensorTerm(coeff, facs)])

    @classmethod
    def monomial(cls, dim: int, powers: Mapping[int, int], coeff: float = 1.0) -> "TensorFunction":
        return cls.from_factors(dim, coeff, {j: Poly1.monomial(k) for j, k in powers.items()})

    # evaluation and arithmetic

    def __call__(self, x) -> np.ndarray | float:
        arr = np.asarray(x, dtype=float)
        single = arr.ndim == 1
        arr = np.atleast_2d(arr)
        if arr.shape[1] != self.dim:
            raise ValueError(f"points must have {self.dim} coordinates, got {arr.shape[1]}")
        out = np.zeros(arr.shape[0])
        for t in self.terms:
            out += t(arr)
        return float(out[0]) if single else out

    def __add__(self, other):
        if isinstance(other, (int, float)):
            other = TensorFunction.constant(other, self.dim)
        if not isinstance(other, TensorFunction):
            return NotImplemented
        if other.dim != self.dim:
            raise ValueError("dimension mismatch")
        return TensorFunction(self.dim, self.terms + other.terms)

    __radd__ = __add__

    def __neg__(self) -> "TensorFunction":
        return self * -1.0

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return TensorFunction(self.dim, (TensorTerm(t.coeff * other, t.factors) for t in self.terms))
        if not isinstance(other, TensorFunction):
            return NotImplemented
        if other.dim != self.dim:
            raise ValueError("dimension mismatch")
        out = []
        for s in self.terms:
            for t in other.terms:
                facs = dict(s.factors)
                for j, h in t.factors:
                    facs[j] = facs[j] * h if j in facs else h
                out.append(TensorTerm(s.coeff * t.coeff, tuple(facs.items())))
        return TensorFunction(self.dim, out)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"TensorFunction(dim={self.dim}, terms={len(self.terms)})"

    # structure

    @property
    def support(self) -> int:
        """Bitmask of the coordinates any term depends on."""
        bits = 0
        for t in self.terms:
            bits |= t.support
        return bits

    def simplify(self) -> "TensorFunction":
        """Merge terms with identical factor lists and drop zero terms."""
        merged: dict[tuple, list] = {}
        for t in self.terms:
            k = t.key()
            if k in merged:
                merged[k][0] += t.coeff
            else:
                merged[k] = [t.coeff, t.factors]
        return TensorFunction(self.dim, (TensorTerm(c, f) for c, f in merged.values() if c != 0.0))

    def degrees(self, axes: Iterable[int]) -> tuple[int, ...]:
        axes = tuple(axes)
        deg = dict.fromkeys(axes, 0)
        for t in self.terms:
            for j, h in t.factors:
                if j not in deg:
                    raise ValueError(f"function depends on coordinate {j} outside the requested axes")
                deg[j] = max(deg[j], h.degree)
        return tuple(deg[j] for j in axes)

    def dense(self, axes: Iterable[int] | None = None) -> np.ndarray:
        """Monomial coefficient array over ``axes`` (default: the support).

        ``out[k_0, ..., k_m]`` is the coefficient of ``prod_i x_{axes[i]}**k_i``.
        The function must not depend on coordinates outside ``axes``.
        """
        axes = mask_indices(self.support) if axes is None else tuple(axes)
        shape = tuple(k + 1 for k in self.degrees(axes))
        out = np.zeros(shape)
        for t in self.terms:
            facs = dict(t.factors)
            block = np.array(t.coeff)
            for j in axes:
                vec = np.asarray(facs[j].coeffs) if j in facs else np.ones(1)
                block = np.multiply.outer(block, vec)
            out[tuple(slice(0, s) for s in block.shape)] += block
        return out

    def is_zero(self, tol: float = ZERO_TOL) -> bool:
        """True when every combined monomial coefficient is at most ``tol`` in magnitude."""
        if not self.terms:
            return True
        return bool(np.all(np.abs(self.dense()) <= tol))

    def constant_value(self) -> float:
        """Value of a function without any coordinate dependence."""
        if self.support:
            raise ValueError("function is not constant")
        return float(sum(t.coeff for t in self.terms))

    def integrate_coordinate(self, j: int) -> "TensorFunction":
        """Integrate out coordinate ``j`` over [0, 1]."""
        out = []
        for t in self.terms:
            h = t.factor(j)
            out.append(t if h is None else t.replace(j, None, h.integral()))
        return TensorFunction(self.dim, out)

    def substitute(self, j: int, value: float) -> "TensorFunction":
        out = []
        for t in self.terms:
            h = t.factor(j)
            out.append(t if h is None else t.replace(j, None, float(h(value))))
        return TensorFunction(self.dim, out)

    def derivative(self, j: int) -> "TensorFunction":
        out = []
        for t in self.terms:
            h = t.factor(j)
            if h is not None:
                out.append(t.replace(j, h.derivative()))
        return TensorFunction(self.dim, out)

    def integral(self) -> float:
        """Integral over the whole cube."""
        total = 0.0
        for t in self.terms:
            total += t.coeff * math.prod(h.integral() for _, h in t.factors)
        return total


class Restriction(enum.Enum):
    ANCHOR = "anchor"
    INTEGRATE = "integrate"


def mixed_derivative(f: TensorFunction, u: SubsetLike) -> TensorFunction:
    """``prod_{j in u} d/dx_j f``, term by term."""
    bits = as_mask(u, f.dim)
    out = []
    for t in f.terms:
        if bits & ~t.support:
            continue  # constant in some differentiated coordinate
        facs = []
        for j, h in t.factors:
            facs.append((j, h.derivative() if bits >> j & 1 else h))
        out.append(TensorTerm(t.coeff, tuple(facs)))
    return TensorFunction(f.dim, out)


def restrict(f: TensorFunction, u: SubsetLike, mode: Restriction | str) -> TensorFunction:
    """Remove the dependence on coordinates outside ``u``.

    ``ANCHOR`` sets ``x_j = 0`` for ``j`` not in ``u``; ``INTEGRATE`` replaces
    each such factor by its integral over [0, 1].
    """
    bits = as_mask(u, f.dim)
    mode = Restriction(mode)
    out = []
    for t in f.terms:
        c = t.coeff
        facs = []
        for j, h in t.factors:
            if bits >> j & 1:
                facs.append((j, h))
            elif mode is Restriction.ANCHOR:
                c *= h.coeffs[0]
            else:
                c *= h.integral()
        out.append(TensorTerm(c, tuple(facs)))
    return TensorFunction(f.dim, out)


# L_p norms over [0, 1]^u

def lp_norm_subset(g: TensorFunction, u: SubsetLike, p: float, exact_even: bool = True) -> float:
    """``L_p([0, 1]**u)`` norm of a function that only depends on coordinates in ``u``.

    Coordinates of ``u`` that ``g`` does not depend on integrate to 1 and do
    not count towards the quadrature caps, which apply to the number of
    coordinates ``g`` actually depends on.  ``exact_even=False`` sends even
    integer ``p`` through the quadrature path, for cross-checking.

    Raises
    ------
    CapacityError
        A multi-term ``g`` depends on more than ``QUADRATURE_MAX_AXES``
        coordinates (finite non-even ``p``) or more than ``SUP_MAX_AXES``
        coordinates (``p = inf``).
    """
    p = check_p(p)
    bits = as_mask(u, g.dim)
    g = g.simplify()
    if g.support & ~bits:
        raise ValueError("function depends on coordinates outside the subset")
    if not g.terms:
        return 0.0
    if len(g.terms) == 1:
        t = g.terms[0]
        return abs(t.coeff) * math.prod(lp_norm_1d(h, p, exact_even=exact_even) for _, h in t.factors)
    axes = mask_indices(g.support)
    if not axes:
        return abs(g.constant_value())
    dense = g.dense(axes)
    if np.all(np.abs(dense) == 0):
        return 0.0
    if len(axes) == 1:
        return lp_norm_1d(Poly1(tuple(dense)), p, exact_even=exact_even)
    if math.isinf(p):
        if len(axes) > SUP_MAX_AXES:
            raise CapacityError(f"sup norm of a multi-term function is capped at {SUP_MAX_AXES} coordinates, got {len(axes)}")
        return _sup_norm_dense(dense)
    if exact_even and is_even_integer(p):
        return max(_even_power_integral(dense, int(p)), 0.0) ** (1 / p)
    if len(axes) > QUADRATURE_MAX_AXES:
        raise CapacityError(f"L_p quadrature of a multi-term function is capped at {QUADRATURE_MAX_AXES} coordinates, got {len(axes)}")
    return _abs_power_integral(dense, p) ** (1 / p)


def _contract_axis0(dense: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Evaluate the leading axis of a coefficient array at the points ``x``."""
    vander = np.vander(x, dense.shape[0], increasing=True)
    return np.tensordot(vander, dense, axes=(1, 0))


def _grid_values(dense: np.ndarray, nodes: list[np.ndarray]) -> np.ndarray:
    """Values on the tensor grid ``nodes[0] x nodes[1] x ...``."""
    vals = dense
    for x in nodes:
        # contract the current leading coefficient axis, move the node axis to the back
        vals = np.moveaxis(_contract_axis0(vals, x), 0, -1)
    return vals


def _even_power_integral(dense: np.ndarray, k: int) -> float:
    """Exact ``int g**k`` by expanding the power on coefficients."""
    shape = tuple(k * (s - 1) + 1 for s in dense.shape)
    if math.prod(shape) <= _EXPANSION_MAX_SIZE:
        power = dense
        for _ in range(k - 1):
            power = signal.convolve(power, dense, method="direct")
        out = power
        for s in shape:
            out = np.tensordot(out, 1.0 / np.arange(1, s + 1), axes=(0, 0))
        return float(out)
    # Gauss rule with enough nodes to be exact for the expanded degree
    nodes, weights = [], []
    for s in shape:
        x, w = gauss_legendre_01(max(1, (s + 1) // 2))
        nodes.append(x)
        weights.append(w)
    vals = _grid_values(dense, nodes) ** k
    for w in weights:
        vals = np.tensordot(w, vals, axes=(0, 0))
    return float(vals)


def _real_roots_batched(coeffs: np.ndarray) -> np.ndarray:
    """Real roots in (0, 1) of each row polynomial; NaN-padded to ``deg`` columns."""
    m, n = coeffs.shape
    deg = n - 1
    out = np.full((m, max(deg, 0)), np.nan)
    if deg < 1:
        return out
    scale = np.max(np.abs(coeffs), axis=1)
    scale[scale == 0] = 1.0
    c = coeffs / scale[:, None]
    eff = np.full(m, 0)
    for k in range(deg, 0, -1):
        hit = (eff == 0) & (np.abs(c[:, k]) > 1e-13)
        eff[hit] = k
    for e in range(1, deg + 1):
        rows = np.flatnonzero(eff == e)
        if not rows.size:
            continue
        monic = c[rows, :e] / c[rows, e][:, None]
        comp = np.zeros((rows.size, e, e))
        if e > 1:
            idx = np.arange(e - 1)
            comp[:, idx + 1, idx] = 1.0
        comp[:, :, -1] = -monic
        ev = np.linalg.eigvals(comp)
        real = np.abs(ev.imag) <= 1e-7 * (1 + np.abs(ev.real))
        r = np.where(real & (ev.real > 1e-12) & (ev.real < 1 - 1e-12), ev.real, np.nan)
        out[rows, :e] = r
    return out


def _line_integrals(coeffs: np.ndarray, p: float) -> np.ndarray:
    """``int_0^1 |c_i(t)|**p dt`` for every row polynomial ``c_i``.

    Each line is split at its real roots; on every sign-constant piece the
    substitution :func:`smoothing_map` removes the endpoint singularity before
    a fixed Gauss-Legendre rule is applied.
    """
    m = coeffs.shape[0]
    roots = _real_roots_batched(coeffs)
    roots = np.sort(np.where(np.isnan(roots), 1.0, roots), axis=1)
    breaks = np.concatenate([np.zeros((m, 1)), roots, np.ones((m, 1))], axis=1)
    lo, hi = breaks[:, :-1], breaks[:, 1:]
    width = hi - lo
    s, w = gauss_legendre_01(_LINE_NODES)
    phi, dphi = smoothing_map(s)
    t = lo[:, :, None] + width[:, :, None] * phi[None, None, :]
    vals = _rowwise_polyval(coeffs, t)
    integrand = np.abs(vals) ** p * dphi
    return np.einsum("mkn,n,mk->m", integrand, w, width)


def _rowwise_polyval(coeffs: np.ndarray, t: np.ndarray) -> np.ndarray:
    out = np.zeros_like(t)
    for k in range(coeffs.shape[1] - 1, -1, -1):
        out = out * t + coeffs[:, k][:, None, None]
    return out


def _abs_power_integral(dense: np.ndarray, p: float) -> float:
    """``int |g|**p`` over the cube for a coefficient array with >= 2 axes.

    The last axis is integrated exactly per line (:func:`_line_integrals`).
    The line integral is only piecewise smooth in the remaining coordinates
    (roots of the line polynomial enter and leave the interval), so with one
    or two remaining axes it is integrated by nested adaptive rules within a
    budget of ``_MAX_LINES`` lines.  With more axes, or when that budget is
    spent, a tensor Gauss-Legendre rule is doubled until two successive
    estimates agree to ``1e-10`` relative or the line budget runs out.
    """
    outer = dense.ndim - 1
    if outer <= _NESTED_MAX_OUTER:
        try:
            return _nested_integral(dense, p, [_MAX_LINES])
        except _BudgetExceeded:
            pass  # kinks along curves in the outer plane; the tensor rule below warns

    prev = None
    n = 4
    while True:
        x, w = gauss_legendre_01(n)
        lines = _grid_values(dense, [x] * outer)
        # lines has shape (deg+1, n, ..., n) -> rows of line coefficients
        rows = np.moveaxis(lines, 0, -1).reshape(-1, dense.shape[-1])
        weights = w
        for _ in range(outer - 1):
            weights = np.multiply.outer(weights, w)
        value = float(np.dot(weights.ravel(), _line_integrals(rows, p)))
        if prev is not None and abs(value - prev) <= _LINE_RTOL * abs(value):
            return value
        if (2 * n) ** outer > _MAX_LINES:
            warnings.warn(
                f"L_p quadrature stopped at {n} nodes per axis over {outer} outer axes; "
                f"last two estimates differ by {abs(value - prev) / abs(value):.1e} relative",
                QuadratureWarning,
                stacklevel=3,
            )
            return value
        prev = value
        n *= 2


class _BudgetExceeded(Exception):
    pass


def _nested_integral(dense: np.ndarray, p: float, budget: list[int]) -> float:
    """Adaptive rule over each outer axis in turn; ``budget`` counts remaining lines."""
    if dense.ndim == 2:
        def integrand(x):
            budget[0] -= len(x)
            if budget[0] < 0:
                raise _BudgetExceeded
            return _line_integrals(_contract_axis0(dense, x), p)
    else:
        def integrand(x):
            sub = _contract_axis0(dense, x)
            return np.array([_nested_integral(sub[i], p, budget) for i in range(len(x))])

    value, _ = adaptive_gauss_legendre(integrand, 0.0, 1.0, rtol=_LINE_RTOL, n=16)
    return value


def _eval_dense(dense: np.ndarray, x: np.ndarray) -> float:
    vals = dense
    for xi in x:
        vals = _contract_axis0(vals, np.array([xi]))[0]
    return float(vals)


def _sup_norm_dense(dense: np.ndarray) -> float:
    """Grid search plus bounded local refinement; a lower bound for the sup norm."""
    k = dense.ndim
    m = min(_SUP_GRID, int(_SUP_MAX_POINTS ** (1 / k)))
    grid = np.linspace(0.0, 1.0, m)
    vals = _grid_values(dense, [grid] * k)
    best = float(np.max(np.abs(vals)))
    grads = [P.polyder(dense, axis=i) if dense.shape[i] > 1 else np.zeros_like(dense) for i in range(k)]
    flat = np.abs(vals).ravel()
    top = np.argsort(flat)[::-1][:8]
    for idx in top:
        start = grid[list(np.unravel_index(idx, vals.shape))]
        sign = 1.0 if vals.flat[idx] >= 0 else -1.0

        def neg(x):
            return -sign * _eval_dense(dense, x)

        def neg_grad(x):
            return np.array([-sign * _eval_dense(gd, x) for gd in grads])

        res = optimize.minimize(neg, start, jac=neg_grad, method="L-BFGS-B", bounds=[(0.0, 1.0)] * k)
        best = max(best, abs(_eval_dense(dense, np.clip(res.x, 0, 1))))
    return best
