"""Finite-dimensional Banach lattice substrate.

Vectors are plain 1-D float numpy arrays ordered componentwise.  Three
norms are available: ``L1`` (an L-space norm), ``L2`` and ``SUP`` (an
M-space norm).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np


class DimensionError(ValueError):
    """Raised when two lattice vectors do not share a dimension."""


class NormKind(str, enum.Enum):
    L1 = "L1"
    L2 = "L2"
    SUP = "SUP"

    @classmethod
    def parse(cls, value: "NormKind | str") -> "NormKind":
        if isinstance(value, NormKind):
            return value
        try:
            return cls(str(value).upper())
        except ValueError:
            raise ValueError(f"unknown norm kind {value!r}") from None


def as_vector(x, dim: int | None = None) -> np.ndarray:
    """Coerce `x` to a finite 1-D float array, optionally checking its length."""
    a = np.atleast_1d(np.asarray(x, dtype=float))
    if a.ndim != 1 or a.size == 0:
        raise DimensionError(f"expected a nonempty 1-D vector, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("lattice vectors must have finite coordinates")
    if dim is not None and a.size != dim:
        raise DimensionError(f"expected dimension {dim}, got {a.size}")
    return a


def _pair(a, b) -> tuple[np.ndarray, np.ndarray]:
    a = as_vector(a)
    b = as_vector(b)
    if a.shape != b.shape:
        raise DimensionError(f"dimension mismatch: {a.size} vs {b.size}")
    return a, b


def lattice_sup(a, b) -> np.ndarray:
    """Least upper bound ``a ∨ b`` (componentwise maximum)."""
    a, b = _pair(a, b)
    return np.maximum(a, b)


def lattice_inf(a, b) -> np.ndarray:
    """Greatest lower bound ``a ∧ b`` (componentwise minimum)."""
    a, b = _pair(a, b)
    return np.minimum(a, b)


def modulus(a) -> np.ndarray:
    """Lattice modulus ``|a| = a ∨ (-a)``."""
    return np.abs(as_vector(a))


def norm(a, kind: NormKind | str = NormKind.SUP) -> float:
    kind = NormKind.parse(kind)
    a = as_vector(a)
    if kind is NormKind.L1:
        return float(np.sum(np.abs(a)))
    if kind is NormKind.L2:
        return float(np.linalg.norm(a))
    return float(np.max(np.abs(a)))


def leq(a, b) -> bool:
    """Componentwise order ``a ≤ b`` with no slack."""
    a, b = _pair(a, b)
    return bool(np.all(a <= b))


def in_order_interval(x, b) -> bool:
    """True iff ``-b ≤ x ≤ b``, i.e. ``|x| ≤ b``."""
    x, b = _pair(x, b)
    if np.any(b < 0):
        raise ValueError("order interval radius must be componentwise nonnegative")
    return bool(np.all(np.abs(x) <= b))


@dataclass(frozen=True)
class OSequence:
    """Geometric (o)-sequence ``b_n = ratio**n * base``.

    The sequence is antitone with infimum zero because every coordinate of
    `base` is strictly positive and ``0 < ratio < 1``.
    """

    base: tuple[float, ...]
    ratio: float = 0.5

    def __post_init__(self):
        base = as_vector(self.base)
        if np.any(base <= 0):
            raise ValueError("(o)-sequence base must be strictly positive")
        if not 0.0 < self.ratio < 1.0:
            raise ValueError("(o)-sequence ratio must lie in (0, 1)")
        object.__setattr__(self, "base", tuple(float(v) for v in base))

    @property
    def dim(self) -> int:
        return len(self.base)

    def at(self, n: int) -> np.ndarray:
        if n < 0:
            raise ValueError("(o)-sequence index must be nonnegative")
        return self.ratio ** n * np.asarray(self.base)

    def broadcast(self, dim: int) -> "OSequence":
        """Lift a one-coordinate sequence to `dim` coordinates (``c·𝟙``)."""
        if self.dim == dim:
            return self
        if self.dim != 1:
            raise DimensionError(f"cannot broadcast (o)-sequence of dim {self.dim} to {dim}")
        return OSequence((self.base[0],) * dim, self.ratio)


def osequence_at(s: OSequence, n: int) -> np.ndarray:
    return s.at(n)
