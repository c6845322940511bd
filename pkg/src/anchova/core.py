"""Coordinate subsets, smoothness exponents and the package exceptions.

A subset ``u`` of the coordinates ``{0, ..., d-1}`` is carried around as an
integer bitmask; :class:`CoordSubset` wraps the mask together with the
dimension where the dimension matters (validation, complements, printing).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Union

__all__ = [
    "AnchovaError",
    "CapacityError",
    "CompatibilityError",
    "MembershipError",
    "InconsistencyError",
    "QuadratureWarning",
    "CoordSubset",
    "SubsetLike",
    "as_mask",
    "popcount",
    "iter_submasks",
    "mask_indices",
    "check_p",
    "parse_p",
    "format_p",
]

INF = math.inf


class AnchovaError(Exception):
    """Base class for errors raised by this package."""


class CapacityError(AnchovaError):
    """A computation exceeds one of the documented size caps."""


class CompatibilityError(AnchovaError, ValueError):
    """A weight schedule violates the subset compatibility condition."""


class MembershipError(AnchovaError, ValueError):
    """A function has a nonzero component on a zero-weight subset."""


class InconsistencyError(AnchovaError, ValueError):
    """One norm vanishes while the other does not."""


class QuadratureWarning(UserWarning):
    """A quadrature stopped at its node cap before reaching its tolerance."""


def popcount(bits: int) -> int:
    return bin(bits).count("1")


def mask_indices(bits: int) -> tuple[int, ...]:
    """0-based indices of the set bits, ascending."""
    out = []
    j = 0
    while bits:
        if bits & 1:
            out.append(j)
        bits >>= 1
        j += 1
    return tuple(out)


def iter_submasks(bits: int) -> Iterator[int]:
    """Yield every submask of ``bits`` (including 0 and ``bits``), descending."""
    v = bits
    while True:
        yield v
        if v == 0:
            return
        v = (v - 1) & bits


@dataclass(frozen=True, order=True)
class CoordSubset:
    """A subset of ``{0, ..., dim-1}`` stored as a bitmask."""

    bits: int
    dim: int

    def __post_init__(self):
        if self.dim < 0:
            raise ValueError(f"dimension must be nonnegative, got {self.dim}")
        if self.bits < 0 or self.bits >> self.dim:
            raise ValueError(f"bitmask {self.bits:#b} has bits outside dimension {self.dim}")

    @classmethod
    def from_indices(cls, indices: Iterable[int], dim: int) -> "CoordSubset":
        bits = 0
        for j in indices:
            if not 0 <= j < dim:
                raise ValueError(f"coordinate index {j} out of range for dimension {dim}")
            bits |= 1 << j
        return cls(bits, dim)

    @classmethod
    def empty(cls, dim: int) -> "CoordSubset":
        return cls(0, dim)

    @classmethod
    def full(cls, dim: int) -> "CoordSubset":
        return cls((1 << dim) - 1, dim)

    @classmethod
    def all(cls, dim: int) -> Iterator["CoordSubset"]:
        """All ``2**dim`` subsets in ascending bitmask order."""
        for bits in range(1 << dim):
            yield cls(bits, dim)

    @property
    def indices(self) -> tuple[int, ...]:
        return mask_indices(self.bits)

    def __len__(self) -> int:
        return popcount(self.bits)

    def __contains__(self, j: int) -> bool:
        return bool(self.bits >> j & 1)

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices)

    def complement(self) -> "CoordSubset":
        return CoordSubset(((1 << self.dim) - 1) & ~self.bits, self.dim)

    def issubset(self, other: "SubsetLike") -> bool:
        return self.bits & ~as_mask(other) == 0

    def __or__(self, other: "SubsetLike") -> "CoordSubset":
        return CoordSubset(self.bits | as_mask(other), self.dim)

    def __and__(self, other: "SubsetLike") -> "CoordSubset":
        return CoordSubset(self.bits & as_mask(other), self.dim)

    def subsets(self) -> Iterator["CoordSubset"]:
        for v in iter_submasks(self.bits):
            yield CoordSubset(v, self.dim)

    def __str__(self) -> str:
        return "{" + ",".join(str(j + 1) for j in self.indices) + "}"


SubsetLike = Union[CoordSubset, int, Iterable[int]]


def as_mask(u: SubsetLike, dim: int | None = None) -> int:
    """Bitmask of ``u``; checks the dimension when both sides carry one.

    ``u`` may be a :class:`CoordSubset`, an integer bitmask or a collection of
    0-based coordinate indices.
    """
    if isinstance(u, CoordSubset):
        if dim is not None and u.dim != dim:
            raise ValueError(f"subset of dimension {u.dim} used with dimension {dim}")
        return u.bits
    if isinstance(u, (set, frozenset, list, tuple)):
        bits = 0
        for j in u:
            if j < 0:
                raise ValueError(f"negative coordinate index {j}")
            bits |= 1 << int(j)
    else:
        bits = int(u)
    if bits < 0 or (dim is not None and bits >> dim):
        raise ValueError(f"bitmask {bits:#b} out of range for dimension {dim}")
    return bits


def check_p(p: float) -> float:
    """Validate an exponent ``1 <= p <= inf`` and return it as a float."""
    p = float(p)
    if math.isnan(p) or p < 1:
        raise ValueError(f"exponent p must satisfy 1 <= p <= inf, got {p}")
    return p


def parse_p(text: str | float) -> float:
    """Parse ``"2"``, ``"1.5"`` or ``"inf"`` into a checked exponent."""
    if isinstance(text, str):
        t = text.strip().lower()
        if t in ("inf", "infinity", "oo"):
            return INF
        return check_p(float(t))
    return check_p(text)


def format_p(p: float) -> str:
    if math.isinf(p):
        return "inf"
    return format_number(p)


def format_number(x: float) -> str:
    """Shortest round-trip decimal, without a trailing ``.0``."""
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    r = repr(x)
    if r.endswith(".0"):
        r = r[:-2]
    return r
