"""Univariate real polynomials on [0, 1]: calculus, real roots and L_p norms."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from numpy.polynomial import polynomial as P

from .core import check_p
from .quadrature import adaptive_gauss_legendre

__all__ = [
    "Poly1",
    "sturm_sequence",
    "count_roots",
    "sign_change_roots",
    "lp_norm_1d",
    "is_even_integer",
]

ROOT_TOL = 1e-14
ENDPOINT_MERGE = 1e-12
# off-centre split: dyadic points are common exact roots, where Sturm counts are unreliable
_SPLIT = 0.4860679774997897


@dataclass(frozen=True)
class Poly1:
    """Polynomial ``sum_k coeffs[k] * t**k`` with trailing zeros removed.

    The zero polynomial has ``coeffs == ()`` and degree ``-1``.
    """

    coeffs: tuple[float, ...] = ()

    def __post_init__(self):
        c = [float(x) for x in self.coeffs]
        while c and c[-1] == 0.0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def constant(cls, c: float) -> "Poly1":
        return cls((c,))

    @classmethod
    def monomial(cls, k: int, c: float = 1.0) -> "Poly1":
        return cls((0.0,) * k + (c,))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def as_array(self) -> np.ndarray:
        return np.array(self.coeffs if self.coeffs else (0.0,), dtype=float)

    def __call__(self, x):
        if not self.coeffs:
            return np.zeros_like(np.asarray(x, dtype=float)) if np.ndim(x) else 0.0
        return P.polyval(x, self.coeffs)

    def derivative(self) -> "Poly1":
        return Poly1(tuple(k * c for k, c in enumerate(self.coeffs) if k))

    def antiderivative(self) -> "Poly1":
        """Antiderivative vanishing at 0."""
        if not self.coeffs:
            return self
        return Poly1((0.0,) + tuple(c / (k + 1) for k, c in enumerate(self.coeffs)))

    def integral(self, a: float = 0.0, b: float = 1.0) -> float:
        H = self.antiderivative()
        return float(H(b) - H(a))

    def __add__(self, other):
        if isinstance(other, (int, float)):
            other = Poly1.constant(other)
        if not isinstance(other, Poly1):
            return NotImplemented
        return Poly1(tuple(P.polyadd(self.as_array(), other.as_array())))

    __radd__ = __add__

    def __neg__(self) -> "Poly1":
        return Poly1(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return Poly1(tuple(c * other for c in self.coeffs))
        if not isinstance(other, Poly1):
            return NotImplemented
        if self.is_zero or other.is_zero:
            return Poly1()
        return Poly1(tuple(np.convolve(self.coeffs, other.coeffs)))

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Poly1":
        if k < 0 or int(k) != k:
            raise ValueError("only nonnegative integer powers")
        if self.is_zero:
            return Poly1() if k else Poly1.constant(1.0)
        return Poly1(tuple(P.polypow(self.coeffs, int(k))))

    def __repr__(self) -> str:
        return f"Poly1({list(self.coeffs)})"


def _normalized(c: np.ndarray) -> np.ndarray:
    m = np.max(np.abs(c)) if c.size else 0.0
    return c / m if m > 0 else c


def _trim(c: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    c = np.where(np.abs(c) <= tol, 0.0, c)
    nz = np.flatnonzero(c)
    return c[: nz[-1] + 1] if nz.size else np.zeros(0)


def sturm_sequence(h: Poly1) -> list[np.ndarray]:
    """Sturm chain ``h, h', -rem(h, h'), ...``; each member scaled to max-abs 1.

    Positive rescaling leaves the sign pattern, and hence the root count,
    unchanged while keeping the float remainders well scaled.
    """
    p0 = _normalized(np.array(h.coeffs, dtype=float))
    p1 = _normalized(np.array(h.derivative().coeffs, dtype=float))
    seq = [p0]
    if p1.size:
        seq.append(p1)
    while len(seq) >= 2 and seq[-1].size > 1:
        _, r = P.polydiv(seq[-2], seq[-1])
        r = _trim(_normalized(-r))
        if not r.size:
            break
        seq.append(r)
    return seq


def _sign_variations(seq: Sequence[np.ndarray], x: float) -> int:
    signs = [np.sign(P.polyval(x, c)) for c in seq]
    signs = [s for s in signs if s != 0]
    return sum(1 for s0, s1 in zip(signs, signs[1:]) if s0 != s1)


def count_roots(seq: Sequence[np.ndarray], a: float, b: float) -> int:
    """Number of distinct real roots in ``(a, b]`` from a Sturm chain."""
    return _sign_variations(seq, a) - _sign_variations(seq, b)


def _bisect(h: Poly1, lo: float, hi: float) -> float:
    flo = h(lo)
    while hi - lo > ROOT_TOL:
        mid = (lo + hi) / 2
        fm = h(mid)
        if fm == 0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return (lo + hi) / 2


def sign_change_roots(h: Poly1, a: float = 0.0, b: float = 1.0) -> list[float]:
    """Roots of ``h`` strictly inside ``(a, b)`` where ``h`` changes sign.

    Distinct roots are isolated by bisecting with Sturm counts, then refined
    by bisection on ``h`` to ``1e-14``.  Roots within ``1e-12`` of ``a`` or
    ``b`` are merged into the endpoint and dropped.  Even-multiplicity roots do
    not split ``h`` into sign-constant pieces and are not reported.
    """
    if h.degree < 1:
        return []
    seq = sturm_sequence(h)
    roots = []
    stack = [(a, b, count_roots(seq, a, b))]
    while stack:
        lo, hi, n = stack.pop()
        if n <= 0:
            continue
        if hi - lo <= ROOT_TOL:
            right = hi if h(hi) != 0 else hi + (hi - lo)
            if np.sign(h(lo)) * np.sign(h(right)) < 0:
                roots.append(hi if h(hi) == 0 else (lo + hi) / 2)
            continue
        if n == 1:
            flo, fhi = h(lo), h(hi)
            if flo != 0 and fhi != 0 and (flo > 0) != (fhi > 0):
                roots.append(_bisect(h, lo, hi))
                continue
        # several roots, a root on an endpoint, or an even-multiplicity root: keep splitting
        mid = lo + _SPLIT * (hi - lo)
        left = count_roots(seq, lo, mid)
        stack.append((lo, mid, left))
        stack.append((mid, hi, n - left))
    out = []
    for r in sorted(roots):
        if r - a <= ENDPOINT_MERGE or b - r <= ENDPOINT_MERGE:
            continue
        if out and r - out[-1] <= ROOT_TOL:
            continue
        out.append(r)
    return out


def is_even_integer(p: float) -> bool:
    return math.isfinite(p) and p == int(p) and int(p) % 2 == 0


def lp_norm_1d(h: Poly1, p: float, rtol: float = 1e-12, exact_even: bool = True) -> float:
    """``L_p([0, 1])`` norm of ``h``, ``1 <= p <= inf``.

    Even integer ``p`` expands ``h**p`` and integrates exactly unless
    ``exact_even`` is false, which routes it through the quadrature below.  Other finite
    ``p`` integrate ``|h|**p`` piecewise between the sign changes of ``h``
    with adaptive Gauss-Legendre.  ``p = inf`` compares ``|h|`` at the
    endpoints and at the extrema of ``h`` inside the interval.
    """
    p = check_p(p)
    if h.is_zero:
        return 0.0
    if h.is_constant:
        return abs(h.coeffs[0])
    if math.isinf(p):
        candidates = [0.0, 1.0] + sign_change_roots(h.derivative())
        return float(max(abs(h(t)) for t in candidates))
    if exact_even and is_even_integer(p):
        return max((h ** int(p)).integral(), 0.0) ** (1 / p)

    breaks = [0.0] + sign_change_roots(h) + [1.0]
    total = 0.0
    for lo, hi in zip(breaks, breaks[1:]):
        val, _ = adaptive_gauss_legendre(lambda t: np.abs(h(t)) ** p, lo, hi, rtol=rtol)
        total += val
    return total ** (1 / p)


def poly_from_roots(roots: Iterable[float], scale: float = 1.0) -> Poly1:
    return Poly1(tuple(scale * P.polyfromroots(list(roots))))
