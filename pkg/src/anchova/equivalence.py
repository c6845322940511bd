"""Norm ratios between the anchored and ANOVA norms, and the product witness.

The identity map between the two weighted spaces has operator norm at most
``C_{d,p} = C1**(1/p) * Cinf**(1 - 1/p)`` in both directions.  Any single
function gives a lower bound for the operator norm through its norm ratio;
the witness ``f(x) = prod_j (1 + gamma_j x_j)`` does so in closed form for
product weights and attains ``Cinf`` at ``p = inf``.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import InconsistencyError, check_p, mask_indices
from .decomp import ComponentTuple, anchored_components, anova_components, weighted_norm
from .poly import Poly1
from .tensor import TensorFunction, TensorTerm
from .weights import WeightSchedule, constant_cdp

__all__ = [
    "BOUND_RTOL",
    "EquivalenceReport",
    "SweepResult",
    "WitnessLowerBound",
    "witness_function",
    "witness_norms_closed",
    "witness_lower_bound_check",
    "measure_ratio",
    "random_tensor_function",
    "random_component_tuple",
    "verify_bound_sweep",
]

BOUND_RTOL = 1e-9
_LOG_SPACE_DIM = 20


@dataclass(frozen=True)
class EquivalenceReport:
    dim: int
    p: float
    anchored_norm: float
    anova_norm: float
    ratio_a_over_anch: float
    ratio_anch_over_a: float
    bound_cdp: float
    bound_satisfied: bool

    @property
    def max_ratio(self) -> float:
        return max(self.ratio_a_over_anch, self.ratio_anch_over_a)


def witness_function(gammas: Sequence[float], expand: bool = True) -> TensorFunction:
    """``f(x) = prod_j (1 + gamma_j x_j)``.

    With ``expand`` the product is multiplied out into its ``2**d`` monomials
    ``gamma_u prod_{j in u} x_j``; otherwise it is kept as one elementary
    tensor.  Both represent the same function.
    """
    g = [float(x) for x in gammas]
    if any(x <= 0 for x in g):
        raise ValueError("witness needs positive gamma_j")
    d = len(g)
    if not expand:
        return TensorFunction(d, [TensorTerm(1.0, tuple((j, Poly1((1.0, gj))) for j, gj in enumerate(g)))])
    x = Poly1((0.0, 1.0))
    terms = []
    for bits in range(1 << d):
        axes = mask_indices(bits)
        terms.append(TensorTerm(math.prod(g[j] for j in axes), tuple((j, x) for j in axes)))
    return TensorFunction(d, terms)


def witness_norms_closed(gammas: Sequence[float], p: float) -> tuple[float, float]:
    """Closed-form ``(anchored, ANOVA)`` norms of the witness under product weights.

    Finite ``p``: ``2**(d/p)`` and ``prod_j (1 + (1 + gamma_j/2)**p) ** (1/p)``.
    ``p = inf``: every anchored component over its weight is 1, and the
    largest ANOVA one is the ``u = empty`` term ``prod_j (1 + gamma_j/2)``.
    """
    p = check_p(p)
    g = np.asarray(list(gammas), dtype=float)
    d = g.size
    if math.isinf(p):
        return 1.0, float(np.exp(np.sum(np.log1p(g / 2)))) if d > _LOG_SPACE_DIM else float(np.prod(1 + g / 2))
    anchored = 2.0 ** (d / p)
    if d > _LOG_SPACE_DIM:
        anova = float(np.exp(np.sum(np.log1p((1 + g / 2) ** p)) / p))
    else:
        anova = float(np.prod(1 + (1 + g / 2) ** p)) ** (1 / p)
    return anchored, anova


@dataclass(frozen=True)
class WitnessLowerBound:
    ratio_p: float
    product_bound: float
    holds: bool


def witness_lower_bound_check(gammas: Sequence[float], p: float) -> WitnessLowerBound:
    """``prod_j (1 + (1 + gamma_j/2)**p) / 2`` against ``prod_j (1 + gamma_j/4)``.

    The left side is the witness's ``(||f||_A / ||f||_anch)**p``; it dominates
    the right side factor by factor, with equality at ``p = 1``.
    """
    p = check_p(p)
    if math.isinf(p):
        raise ValueError("the p-th power chain needs finite p")
    g = np.asarray(list(gammas), dtype=float)
    ratio = float(np.prod((1 + (1 + g / 2) ** p) / 2))
    bound = float(np.prod(1 + g / 4))
    return WitnessLowerBound(ratio, bound, ratio >= bound * (1 - 1e-12))


def measure_ratio(
    f: TensorFunction,
    weights: WeightSchedule,
    p: float,
    bound: float | None = None,
) -> EquivalenceReport:
    """Both norms of ``f``, both ratios and the ``C_{d,p}`` bound check.

    ``bound`` may be passed to reuse a precomputed ``C_{d,p}``.

    Raises
    ------
    InconsistencyError
        Exactly one of the two norms vanishes.
    ValueError
        ``f`` is the zero function, for which no ratio exists.
    """
    p = check_p(p)
    anch = weighted_norm(anchored_components(f), weights, p)
    anova = weighted_norm(anova_components(f), weights, p)
    if anch == 0.0 and anova == 0.0:
        raise ValueError("both norms vanish; the ratio of the zero function is undefined")
    if anch == 0.0 or anova == 0.0:
        raise InconsistencyError(f"anchored norm {anch!r} and ANOVA norm {anova!r}: exactly one vanishes")
    if bound is None:
        bound = constant_cdp(weights, p)
    r1 = anova / anch
    r2 = anch / anova
    return EquivalenceReport(
        dim=f.dim,
        p=p,
        anchored_norm=anch,
        anova_norm=anova,
        ratio_a_over_anch=r1,
        ratio_anch_over_a=r2,
        bound_cdp=bound,
        bound_satisfied=max(r1, r2) <= bound * (1 + BOUND_RTOL),
    )


def random_tensor_function(
    rng: np.random.Generator,
    dim: int,
    max_terms: int = 3,
    max_axes: int = 4,
    max_degree: int = 3,
) -> TensorFunction:
    """Random sum of elementary tensors.

    The number of terms is uniform in ``1..max_terms``; each term depends on a
    uniformly chosen set of at most ``min(dim, max_axes)`` coordinates, each
    factor has a degree uniform in ``0..max_degree`` and all coefficients are
    uniform in ``[-1, 1]``.
    """
    terms = []
    for _ in range(int(rng.integers(1, max_terms + 1))):
        size = int(rng.integers(0, min(dim, max_axes) + 1))
        axes = rng.choice(dim, size=size, replace=False) if size else []
        facs = []
        for j in sorted(int(a) for a in axes):
            deg = int(rng.integers(0, max_degree + 1))
            facs.append((j, Poly1(tuple(rng.uniform(-1, 1, deg + 1)))))
        terms.append(TensorTerm(float(rng.uniform(-1, 1)), tuple(facs)))
    return TensorFunction(dim, terms)


def random_component_tuple(
    rng: np.random.Generator,
    dim: int,
    n_subsets: int = 4,
    max_terms: int = 2,
    max_degree: int = 3,
) -> ComponentTuple:
    """Random tuple supported on up to ``n_subsets`` distinct subsets.

    Each chosen ``g_u`` is a sum of ``1..max_terms`` elementary tensors whose
    factors are random polynomials in exactly the coordinates of ``u``.
    """
    comps = {}
    for bits in rng.choice(1 << dim, size=min(1 << dim, n_subsets), replace=False):
        bits = int(bits)
        terms = []
        for _ in range(int(rng.integers(1, max_terms + 1))):
            facs = []
            for j in mask_indices(bits):
                deg = int(rng.integers(0, max_degree + 1))
                facs.append((j, Poly1(tuple(rng.uniform(-1, 1, deg + 1)))))
            terms.append(TensorTerm(float(rng.uniform(-1, 1)), tuple(facs)))
        comps[bits] = TensorFunction(dim, terms)
    return ComponentTuple(dim, comps)


@dataclass
class SweepResult:
    """Reports ordered by ``p`` then sample index, plus the largest ratio seen per ``p``.

    ``max_ratio[p]`` is an empirical lower bound on the operator norm.
    """

    reports: list[EquivalenceReport]
    max_ratio: dict[float, float] = field(default_factory=dict)
    functions: list[TensorFunction] = field(default_factory=list, repr=False)

    @property
    def violations(self) -> list[EquivalenceReport]:
        return [r for r in self.reports if not r.bound_satisfied]

    def __len__(self) -> int:
        return len(self.reports)

    def __iter__(self):
        return iter(self.reports)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("ANCHOVA_THREADS", "1")))
    except ValueError:
        return 1


def verify_bound_sweep(
    weights: WeightSchedule,
    p_grid: Sequence[float],
    n_samples: int,
    seed: int,
    **random_kwargs,
) -> SweepResult:
    """Measure the norm ratios of ``n_samples`` random functions at every ``p``.

    Sample ``i`` draws from its own generator spawned from ``seed``, so the
    result does not depend on ``ANCHOVA_THREADS`` or on execution order.
    """
    if n_samples < 0:
        raise ValueError("n_samples must be nonnegative")
    ps = [check_p(p) for p in p_grid]
    bounds = {p: constant_cdp(weights, p) for p in ps}
    children = np.random.SeedSequence(seed).spawn(n_samples)
    functions = [random_tensor_function(np.random.default_rng(c), weights.dim, **random_kwargs) for c in children]

    def run(f):
        return [measure_ratio(f, weights, p, bounds[p]) for p in ps]

    threads = _threads()
    if threads > 1 and n_samples > 1:
        with ThreadPoolExecutor(threads) as pool:
            per_sample = list(pool.map(run, functions))
    else:
        per_sample = [run(f) for f in functions]

    reports = [per_sample[i][k] for k in range(len(ps)) for i in range(n_samples)]
    max_ratio = {}
    for k, p in enumerate(ps):
        vals = [per_sample[i][k].max_ratio for i in range(n_samples)]
        if vals:
            max_ratio[p] = max(vals)
    return SweepResult(reports, max_ratio, functions)
