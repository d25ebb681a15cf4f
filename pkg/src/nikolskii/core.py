"""Shared result containers, error types and small exact helpers."""

from __future__ import annotations

import math
from dataclasses import dataclass


class NikolskiiError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(NikolskiiError, ValueError):
    """Argument outside the mathematical domain of the routine."""


class RangeError(NikolskiiError, OverflowError):
    """Result or internal scaling not representable in double precision."""


class PrecisionError(NikolskiiError, RuntimeError):
    """Requested tolerance could not be met within the iteration budget."""


class SearchError(NikolskiiError, RuntimeError):
    """Bracketing scan failed to locate a sign change."""


class ConsistencyError(NikolskiiError, RuntimeError):
    """Independent computation routes disagree beyond their error budgets."""


class VerificationError(NikolskiiError, RuntimeError):
    """A certified check exceeded its pass threshold."""


class OptimizationError(NikolskiiError, RuntimeError):
    """LP/QP solver did not converge to an optimum."""


@dataclass(frozen=True)
class EvalResult:
    """A computed value together with an absolute error estimate."""

    value: float
    est_abs_error: float

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise RangeError(f"non-finite value {self.value}")
        if self.est_abs_error < 0:
            raise ValueError("est_abs_error must be >= 0")


@dataclass(frozen=True)
class ConstantEstimate:
    """A constant with provenance: which method produced it and its error bound."""

    value: float
    method: str
    abs_error: float

    def __post_init__(self):
        if self.abs_error < 0:
            raise ValueError("abs_error must be >= 0")

    def agrees_with(self, other: "ConstantEstimate", slack: float = 1e-8) -> bool:
        return abs(self.value - other.value) <= slack + self.abs_error + other.abs_error


def dim_pi_exact(n: int, d: int) -> int:
    """Dimension of the space of spherical polynomials of degree <= n on S^d.

    Exact integer arithmetic via the sum of two binomials, which equals
    (2n+d)/(n+d) * C(n+d, n).
    """
    if n < 0 or d < 1:
        raise DomainError(f"need n >= 0 and d >= 1, got n={n}, d={d}")
    if n == 0:
        return 1
    return math.comb(n + d, n) + math.comb(n + d - 1, n - 1)
