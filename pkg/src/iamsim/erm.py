"""The guarded empirical revenue maximization price rule.

Over N samples sorted non-increasingly, the rule picks
k* = argmax_{i > c*N} i * v_i (largest index on ties) and posts price v_{k*}.
Eligibility i > c*N is an exact real comparison; products are float64 and
ties compare with exact equality, so outcomes are reproducible bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import kernels
from .errors import PreconditionC, SentinelEligible


@dataclass(frozen=True, eq=False)
class SampleVector:
    """Non-increasingly sorted non-negative values, plus ``sentinel_top``
    leading entries that stand for +inf placeholders.

    Sentinels are a count, not a float, so index products never overflow and
    eligibility violations are detectable.
    """

    finite: np.ndarray
    sentinel_top: int = 0

    def __post_init__(self):
        arr = np.asarray(self.finite, dtype=np.float64)
        if arr.ndim != 1:
            raise ValueError("samples must be one-dimensional")
        if arr.size and not np.all(np.isfinite(arr)):
            raise ValueError("finite entries must be finite; use sentinel_top for +inf")
        if arr.size and arr.min() < 0:
            raise ValueError("samples must be non-negative")
        arr = np.sort(arr)[::-1].copy()
        object.__setattr__(self, "finite", arr)
        if self.sentinel_top < 0:
            raise ValueError("sentinel_top must be >= 0")

    @property
    def n(self) -> int:
        return self.finite.shape[0] + self.sentinel_top

    def value_at(self, i: int) -> float:
        """Value at 1-based index i of the full vector (inf for sentinels)."""
        if not 1 <= i <= self.n:
            raise IndexError(i)
        if i <= self.sentinel_top:
            return math.inf
        return float(self.finite[i - self.sentinel_top - 1])

    def with_sentinels(self, m: int) -> "SampleVector":
        return SampleVector(self.finite, self.sentinel_top + m)


def as_sample_vector(values) -> SampleVector:
    if isinstance(values, SampleVector):
        return values
    return SampleVector(np.asarray(values, dtype=np.float64))


def first_eligible_index(c: float, n: int) -> int:
    """Smallest integer i with i > c*n, the product taken exactly.

    The double product fl(c)*n can round across an integer (e.g. (1/49)*49
    rounds below 1), so the comparison runs in rational arithmetic.
    """
    return math.floor(Fraction(c) * n) + 1


def guard_at_least(m: int, n: int) -> float:
    """Smallest double c whose exact product c*n is at least m.

    Use for guard levels meant to equal m/n exactly, where fl(m/n) may land
    one ulp short.
    """
    c = m / n
    if Fraction(c) * n < m:
        c = math.nextafter(c, 1.0)
    return c


@dataclass(frozen=True)
class ErmOutcome:
    price: float
    k_star: int
    threshold: float = field(repr=True)  # c*N; eligibility is i > threshold
    eligible_count: int = 0


def guarded_erm(samples, c: float) -> ErmOutcome:
    """Price and winning index of the c-guarded rule.

    Sentinel entries are permitted only when c*N >= sentinel_top, so that no
    sentinel index is eligible.
    """
    sv = as_sample_vector(samples)
    if sv.n == 0:
        raise ValueError("samples must be non-empty")
    if not 0.0 <= c < 1.0:
        raise ValueError(f"c must satisfy 0 <= c < 1, got {c}")
    i0 = first_eligible_index(c, sv.n)
    if i0 <= sv.sentinel_top:
        raise SentinelEligible(
            f"sentinel index {i0} is eligible: need c*N >= sentinel_top "
            f"(c*N={c * sv.n}, sentinel_top={sv.sentinel_top})"
        )
    k, price = kernels.erm_scan(sv.finite, i0, sv.sentinel_top)
    return ErmOutcome(price=float(price), k_star=int(k), threshold=c * sv.n, eligible_count=sv.n - i0 + 1)


def erm_with_sentinels(v_minus, m: int, c: float) -> ErmOutcome:
    """Run the rule with m +inf placeholders on top of ``v_minus``."""
    sv = as_sample_vector(v_minus)
    if sv.sentinel_top != 0:
        raise ValueError("v_minus must not already contain sentinels")
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m}")
    total = sv.n + m
    if first_eligible_index(c, total) <= m:
        raise PreconditionC(f"need c >= m/N: c={c}, m={m}, N={total}")
    return guarded_erm(sv.with_sentinels(m), c)


def small_index_event(outcome: ErmOutcome, d: float, n: int) -> bool:
    """Whether the winning index is abnormally small: k* <= d*n."""
    if not 0.0 < d < 1.0:
        raise ValueError(f"d must be in (0, 1), got {d}")
    return outcome.k_star <= d * n
