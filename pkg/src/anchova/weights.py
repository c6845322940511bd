"""Weight schedules and the anchored/ANOVA equivalence constants.

The constants are

    C1   = max_u  sum_{v subset u}     gamma_u / gamma_v
    Cinf = max_u  sum_{v subset u^c}   2^{-|v|} gamma_{u+v} / gamma_u

with the outer maximum over subsets of positive weight, and the bound for
general ``p`` is ``C1**(1/p) * Cinf**(1 - 1/p)``.

For ``d <= BRUTE_FORCE_MAX_DIM`` both constants are evaluated by summing over
the full subset lattice (a subset/superset zeta transform on the table of
``2**d`` weights).  Parametric families switch to closed forms above the cap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from .core import (
    CapacityError,
    CompatibilityError,
    CoordSubset,
    SubsetLike,
    as_mask,
    check_p,
    iter_submasks,
    popcount,
)

__all__ = [
    "BRUTE_FORCE_MAX_DIM",
    "WeightSchedule",
    "ExplicitWeights",
    "ProductWeights",
    "FiniteOrderWeights",
    "DimensionDependentWeights",
    "weight_of",
    "check_compatibility",
    "constant_c1",
    "constant_cinf",
    "constant_cdp",
    "closed_form_constants_product",
    "TauZero",
    "tau_zero",
    "EquivalenceRegime",
    "classify_equivalence",
    "classify_finite_order",
    "classify_dimension_dependent",
]

BRUTE_FORCE_MAX_DIM = 20
_LOG_SPACE_DIM = 30


def popcount_table(dim: int) -> np.ndarray:
    """``|u|`` for every bitmask ``u < 2**dim``."""
    pc = np.zeros(1, dtype=np.int64)
    for _ in range(dim):
        pc = np.concatenate([pc, pc + 1])
    return pc


def subset_sums(values: np.ndarray, dim: int) -> np.ndarray:
    """``out[u] = sum_{v subset u} values[v]`` (zeta transform over subsets)."""
    out = np.array(values, dtype=float, copy=True)
    for j in range(dim):
        view = out.reshape(-1, 2, 1 << j)
        view[:, 1, :] += view[:, 0, :]
    return out


def superset_sums(values: np.ndarray, dim: int) -> np.ndarray:
    """``out[u] = sum_{w superset u} values[w]``."""
    out = np.array(values, dtype=float, copy=True)
    for j in range(dim):
        view = out.reshape(-1, 2, 1 << j)
        view[:, 0, :] += view[:, 1, :]
    return out


class WeightSchedule:
    """A family of nonnegative weights ``gamma_u`` indexed by subsets of ``[d]``.

    Subclasses implement :meth:`weight` and :meth:`table`.
    """

    dim: int

    def weight(self, u: SubsetLike) -> float:
        raise NotImplementedError

    def table(self) -> np.ndarray:
        """All ``2**dim`` weights, indexed by bitmask."""
        raise NotImplementedError

    def closed_form_constants(self) -> tuple[float, float] | None:
        """``(C1, Cinf)`` from a formula, or ``None`` when no formula exists."""
        return None

    def is_compatible_by_construction(self) -> bool:
        return False

    def scaled(self, factor: float) -> "ExplicitWeights":
        return ExplicitWeights(self.dim, self.table() * factor)


@dataclass(frozen=True, eq=False)
class ExplicitWeights(WeightSchedule):
    """Weights given as a full table of ``2**dim`` values."""

    dim: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.shape != (1 << self.dim,):
            raise ValueError(f"expected {1 << self.dim} weights for dimension {self.dim}, got shape {vals.shape}")
        if not np.all(np.isfinite(vals)) or np.any(vals < 0):
            raise ValueError("weights must be finite and nonnegative")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_mapping(cls, dim: int, weights: dict) -> "ExplicitWeights":
        """Build from ``{subset: gamma}``; omitted subsets get weight 0."""
        vals = np.zeros(1 << dim)
        for u, g in weights.items():
            if isinstance(u, (tuple, list, frozenset, set)):
                u = CoordSubset.from_indices(u, dim)
            vals[as_mask(u, dim)] = g
        return cls(dim, vals)

    def weight(self, u: SubsetLike) -> float:
        return float(self.values[as_mask(u, self.dim)])

    def table(self) -> np.ndarray:
        return self.values


@dataclass(frozen=True)
class ProductWeights(WeightSchedule):
    """``gamma_u = prod_{j in u} gamma_j`` with ``gamma_empty = 1``."""

    gammas: tuple[float, ...]

    def __post_init__(self):
        g = tuple(float(x) for x in self.gammas)
        if any(not (x > 0 and math.isfinite(x)) for x in g):
            raise ValueError("product weights need positive finite gamma_j")
        object.__setattr__(self, "gammas", g)

    @property
    def dim(self) -> int:
        return len(self.gammas)

    def weight(self, u: SubsetLike) -> float:
        bits = as_mask(u, self.dim)
        return math.prod(self.gammas[j] for j in range(self.dim) if bits >> j & 1)

    def table(self) -> np.ndarray:
        t = np.ones(1)
        for g in self.gammas:
            t = np.concatenate([t, t * g])
        return t

    def closed_form_constants(self) -> tuple[float, float]:
        return closed_form_constants_product(self.gammas)

    def is_compatible_by_construction(self) -> bool:
        return True


@dataclass(frozen=True)
class FiniteOrderWeights(WeightSchedule):
    """``gamma_u = c * omega**|u|`` for ``|u| <= order``, zero above."""

    dim: int
    c: float
    omega: float
    order: int

    def __post_init__(self):
        if not (self.c > 0 and self.omega > 0):
            raise ValueError("finite-order weights need c > 0 and omega > 0")
        if self.order < 1 or self.dim < 0:
            raise ValueError("finite-order weights need order >= 1 and dim >= 0")

    def weight(self, u: SubsetLike) -> float:
        k = popcount(as_mask(u, self.dim))
        return self.c * self.omega**k if k <= self.order else 0.0

    def table(self) -> np.ndarray:
        pc = popcount_table(self.dim)
        return np.where(pc <= self.order, self.c * self.omega ** pc.astype(float), 0.0)

    def closed_form_constants(self) -> tuple[float, float]:
        # c cancels in every ratio; only |u| = k matters.
        d, q, w = self.dim, self.order, self.omega
        top = min(q, d)
        c1 = (1.0 + w) ** top
        cinf = max(
            sum(math.comb(d - k, i) * (w / 2.0) ** i for i in range(min(q - k, d - k) + 1))
            for k in range(top + 1)
        )
        return c1, cinf

    def is_compatible_by_construction(self) -> bool:
        return True


@dataclass(frozen=True)
class DimensionDependentWeights(WeightSchedule):
    """``gamma_u = d**(-|u|)``."""

    dim: int

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dimension-dependent weights need dim >= 1")

    def weight(self, u: SubsetLike) -> float:
        return float(self.dim) ** -popcount(as_mask(u, self.dim))

    def table(self) -> np.ndarray:
        return float(self.dim) ** -popcount_table(self.dim).astype(float)

    def closed_form_constants(self) -> tuple[float, float]:
        return closed_form_constants_product([1.0 / self.dim] * self.dim)

    def is_compatible_by_construction(self) -> bool:
        return True


def weight_of(schedule: WeightSchedule, u: SubsetLike) -> float:
    """``gamma_u``; a :class:`CoordSubset` of the wrong dimension is an error."""
    return schedule.weight(u)


def check_compatibility(schedule: WeightSchedule) -> list[tuple[CoordSubset, CoordSubset]]:
    """Every pair ``(u, v)`` with ``v`` a subset of ``u``, ``gamma_u > 0`` and ``gamma_v == 0``."""
    if schedule.is_compatible_by_construction():
        return []
    d = schedule.dim
    positive = schedule.table() > 0
    zero_below = subset_sums((~positive).astype(float), d)
    violations = []
    for u in np.flatnonzero(positive & (zero_below > 0)):
        u = int(u)
        for v in sorted(iter_submasks(u)):
            if not positive[v]:
                violations.append((CoordSubset(u, d), CoordSubset(v, d)))
    return violations


def _require_compatible(schedule: WeightSchedule) -> None:
    bad = check_compatibility(schedule)
    if bad:
        u, v = bad[0]
        raise CompatibilityError(
            f"gamma_{u} > 0 but gamma_{v} = 0 ({len(bad)} violating pair(s))"
        )


def _brute_force_tables(schedule: WeightSchedule) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    d = schedule.dim
    gamma = schedule.table()
    positive = gamma > 0
    safe = np.where(positive, gamma, 1.0)
    inv = np.where(positive, 1.0 / safe, 0.0)
    c1_terms = np.where(positive, gamma * subset_sums(inv, d), -np.inf)

    scale = 2.0 ** -popcount_table(d).astype(float)
    sup = superset_sums(gamma * scale, d)
    cinf_terms = np.where(positive, sup / (scale * safe), -np.inf)
    return gamma, c1_terms, cinf_terms


def _constant(schedule: WeightSchedule, which: int, return_subset: bool):
    d = schedule.dim
    if d > BRUTE_FORCE_MAX_DIM:
        closed = schedule.closed_form_constants()
        if closed is None:
            raise CapacityError(
                f"brute-force constants are capped at d <= {BRUTE_FORCE_MAX_DIM}; "
                f"got an explicit schedule with d = {d}"
            )
        if return_subset:
            raise CapacityError(f"maximizing subsets are only reported for d <= {BRUTE_FORCE_MAX_DIM}")
        return closed[which]
    _require_compatible(schedule)
    terms = _brute_force_tables(schedule)[1 + which]
    # argmax returns the first hit, i.e. the smallest bitmask among ties
    best = int(np.argmax(terms))
    value = float(terms[best])
    if return_subset:
        return value, CoordSubset(best, d)
    return value


def constant_c1(schedule: WeightSchedule, *, return_subset: bool = False):
    """``C_{d,1}``; with ``return_subset`` also the maximizing ``u``."""
    return _constant(schedule, 0, return_subset)


def constant_cinf(schedule: WeightSchedule, *, return_subset: bool = False):
    """``C_{d,inf}``; with ``return_subset`` also the maximizing ``u``."""
    return _constant(schedule, 1, return_subset)


def closed_form_constants_product(gammas: Sequence[float]) -> tuple[float, float]:
    """``(prod(1 + gamma_j), prod(1 + gamma_j / 2))`` for product weights."""
    g = np.asarray(list(gammas), dtype=float)
    if g.size == 0:
        return 1.0, 1.0
    if np.any(g <= 0):
        raise ValueError("product weights need positive gamma_j")
    if g.size > _LOG_SPACE_DIM:
        return float(np.exp(np.sum(np.log1p(g)))), float(np.exp(np.sum(np.log1p(g / 2))))
    return float(np.prod(1 + g)), float(np.prod(1 + g / 2))


def constant_cdp(schedule: WeightSchedule, p: float) -> float:
    """The interpolated bound ``C1**(1/p) * Cinf**(1 - 1/p)``."""
    p = check_p(p)
    if math.isinf(p):
        return constant_cinf(schedule)
    c1 = constant_c1(schedule)
    if p == 1:
        return c1
    return c1 ** (1 / p) * constant_cinf(schedule) ** (1 - 1 / p)


GammaSource = Union[Sequence[float], Callable[[int], float]]


def _gamma_array(gammas: GammaSource, n: int) -> np.ndarray:
    if callable(gammas):
        return np.array([gammas(j) for j in range(1, n + 1)], dtype=float)
    g = np.asarray(list(gammas), dtype=float)
    if g.size < n:
        raise ValueError(f"need at least {n} gamma values, got {g.size}")
    return g[:n]


@dataclass(frozen=True)
class TauZero:
    value: float
    argmax_d: int


def tau_zero(gammas: GammaSource, d_max: int) -> TauZero:
    """``max_{1 <= d <= d_max} sum_{j<=d} gamma_j / ln(d + 1)`` and where it is attained.

    ``gammas`` is a sequence (``gammas[0]`` is gamma_1) or a callable of the
    1-based index.  This is a lower bound for the supremum over all ``d``; a
    maximizer at ``d_max`` means the sequence has not settled.
    """
    if d_max < 1:
        raise ValueError("d_max must be >= 1")
    g = _gamma_array(gammas, d_max)
    ratios = np.cumsum(g) / np.log(np.arange(2, d_max + 2))
    k = int(np.argmax(ratios))
    return TauZero(float(ratios[k]), k + 1)


UNIFORM = "Uniform"
POLYNOMIAL = "Polynomial"
DIVERGENT = "Divergent"


@dataclass(frozen=True)
class EquivalenceRegime:
    """Outcome of a weight-family classification.

    ``exponent_bound`` is only set for the polynomial regime.  ``confidence``
    is ``"exact"`` for families with a known answer, otherwise ``"high"`` or
    ``"low"`` depending on how far the numeric diagnostics sit from their
    decision thresholds.
    """

    regime: str
    p: float
    exponent_bound: float | None
    confidence: str
    summable: bool | None = None
    tau0: float | None = None
    tau0_argmax: int | None = None
    d_max: int | None = None
    tail_ratio: float | None = None
    partial_sums: np.ndarray | None = field(default=None, repr=False, compare=False)


SUMMABLE_TAIL_RATIO = 1e-9


def classify_equivalence(gammas: GammaSource, p: float, d_max: int = 1000) -> EquivalenceRegime:
    """Classify product weights as uniformly, polynomially or not equivalent.

    Summability is declared when the tail ``sum_{j=d_max/2}^{d_max} gamma_j`` is
    below ``1e-9`` times the full partial sum; ``tau0`` is declared finite when
    its maximizer lies below ``d_max / 2``.  Neither test can prove
    convergence, so the raw diagnostics travel with the verdict.

    A polynomial verdict is flagged ``"low"`` when the dyadic tail block over
    ``(d_max/2, d_max]`` is clearly smaller than the block before it: the
    partial sums are then still converging (``gamma_j = j**-2`` is the typical
    case) and the sequence may well be summable with a slow tail.
    """
    p = check_p(p)
    if d_max < 2:
        raise ValueError("d_max must be >= 2")
    g = _gamma_array(gammas, d_max)
    partial = np.cumsum(g)
    total = float(partial[-1])
    half = d_max // 2
    tail = float(np.sum(g[half - 1:]))
    tail_ratio = tail / total if total > 0 else 0.0
    tz = tau_zero(g, d_max)
    inv_p = 0.0 if math.isinf(p) else 1.0 / p
    common = dict(p=p, tau0=tz.value, tau0_argmax=tz.argmax_d, d_max=d_max,
                  tail_ratio=tail_ratio, partial_sums=partial)

    if tail_ratio < SUMMABLE_TAIL_RATIO:
        confident = tail_ratio < 1e-3 * SUMMABLE_TAIL_RATIO
        return EquivalenceRegime(UNIFORM, exponent_bound=None, summable=True,
                                 confidence="high" if confident else "low", **common)
    if tz.argmax_d < half:
        quarter = max(d_max // 4, 1)
        prev_block = float(np.sum(g[quarter - 1:half - 1]))
        shrinking = prev_block > 0 and tail < 0.75 * prev_block
        confident = (tz.argmax_d < d_max // 4 and tail_ratio > 1e3 * SUMMABLE_TAIL_RATIO
                     and not shrinking)
        return EquivalenceRegime(POLYNOMIAL, exponent_bound=tz.value / 2 * (1 + inv_p),
                                 summable=False, confidence="high" if confident else "low", **common)
    confident = tz.argmax_d == d_max
    return EquivalenceRegime(DIVERGENT, exponent_bound=None, summable=False,
                             confidence="high" if confident else "low", **common)


def classify_finite_order(order: int, p: float) -> EquivalenceRegime:
    """Finite-order weights ``c * omega**|u|``: polynomial with exponent ``order``."""
    return EquivalenceRegime(POLYNOMIAL, p=check_p(p), exponent_bound=float(order), confidence="exact")


def classify_dimension_dependent(p: float) -> EquivalenceRegime:
    """Weights ``d**(-|u|)``: uniformly equivalent for every ``p``."""
    return EquivalenceRegime(UNIFORM, p=check_p(p), exponent_bound=None, confidence="exact")
