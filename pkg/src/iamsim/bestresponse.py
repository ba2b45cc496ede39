"""Exact best-response manipulation against the guarded price rule.

A manipulator controlling m of the N inputs can be assumed to submit m
identical bids b. Inside an insertion slot (between adjacent sample values)
the true-sample products are constant, so the outcome price as a function of
b is b itself above a slot threshold and a constant below it. The slot
minimum is therefore realized either at a sample value or at the threshold
b_min(i) = M(i)/(i+m), where M(i) is the best eligible product of the true
samples in slot i. Enumerating {0} | {v_j} | {b_min(i)} and evaluating each
candidate with full tie-break semantics yields the exact infimum, attained.
In double arithmetic the product (i+m)*b flips from losing to winning within
one ulp of the quotient b_min(i), so both ulp neighbours of each threshold
enter the candidate set; the result is the exact minimum over all
representable bids.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels
from .erm import SampleVector, as_sample_vector, guarded_erm
from .errors import DegeneratePrice, PreconditionC, PreconditionM


@dataclass(frozen=True)
class ManipulationResult:
    """Minimum achievable price and the relative drop delta = 1 - min/baseline.

    ``best_bid`` is None when no deviation beats the baseline (any bid is
    optimal); otherwise re-running the price rule on (m copies of best_bid)
    merged with the true samples reproduces ``min_price`` exactly.
    """

    min_price: float
    best_bid: Optional[float]
    baseline_price: float
    delta: float
    m: int
    c: float


def _check_inputs(v_minus, m: int, c: float) -> SampleVector:
    sv = as_sample_vector(v_minus)
    if sv.sentinel_top != 0:
        raise ValueError("v_minus must be finite")
    if sv.n == 0:
        raise ValueError("v_minus must be non-empty")
    if m < 1:
        raise PreconditionM(f"need m >= 1, got {m}")
    if not 0.0 <= c < 1.0:
        raise ValueError(f"c must satisfy 0 <= c < 1, got {c}")
    return sv


def _merged(w: np.ndarray, m: int, b: float) -> np.ndarray:
    return np.sort(np.concatenate([w, np.full(m, b)]))[::-1]


def _candidate_bids_simple(w: np.ndarray, m: int, cn: float) -> np.ndarray:
    """Candidate set built slot by slot, O(N^2); validation twin of the kernel."""
    n = w.shape[0]
    i0 = kernels.first_eligible_index(cn)
    j = np.arange(1, n + 1, dtype=np.float64)
    pre = np.where(np.arange(1, n + 1) >= i0, j * w, -1.0)
    suf = np.where(np.arange(1 + m, n + m + 1) >= i0, (j + m) * w, -1.0)
    thr = []
    for i in range(n + 1):
        if i + m < i0:
            continue
        parts = [pre[:i], suf[i:]]
        big = max((float(p.max()) for p in parts if p.size), default=-1.0)
        if big > 0.0:
            thr.append(big / (i + m))
    thr_arr = np.asarray(thr)
    thr_arr = np.concatenate([thr_arr, np.nextafter(thr_arr, np.inf), np.nextafter(thr_arr, 0.0)])
    return np.unique(np.concatenate([np.zeros(1), w, thr_arr]))


def min_manipulated_price(v_minus, m: int, c: float, method: str = "fast") -> tuple[float, float]:
    """Exact min over b >= 0 of the price after replacing m inputs by bid b.

    ``method='fast'`` uses the prefix/suffix-maxima kernel; ``'simple'``
    evaluates the same candidates with a full price-rule pass each. Both
    return identical results bit for bit.
    """
    sv = _check_inputs(v_minus, m, c)
    w = sv.finite
    cn = c * (sv.n + m)
    if method == "fast":
        price, bid = kernels.best_response_min(w, m, cn)
        return float(price), float(bid)
    if method != "simple":
        raise ValueError(f"unknown method {method!r}")
    cands = _candidate_bids_simple(w, m, cn)
    best_price = np.inf
    best_bid = 0.0
    for b in cands:
        outcome = guarded_erm(SampleVector(_merged(w, m, float(b))), c)
        if outcome.price < best_price:
            best_price = outcome.price
            best_bid = float(b)
    return float(best_price), best_bid


def min_manipulated_price_bruteforce(v_minus, m: int, c: float, grid) -> float:
    """Minimum over an explicit bid grid; testing oracle only."""
    sv = _check_inputs(v_minus, m, c)
    grid = np.asarray(grid, dtype=np.float64)
    if grid.size == 0:
        raise ValueError("grid must be non-empty")
    best = np.inf
    for b in grid:
        outcome = guarded_erm(SampleVector(_merged(sv.finite, m, float(b))), c)
        best = min(best, outcome.price)
    return float(best)


def incentive_awareness(v_I, v_minus, c: float, method: str = "fast") -> ManipulationResult:
    """delta = 1 - inf_b P(b..b, v_minus) / P(v_I, v_minus)."""
    v_I = np.asarray(v_I, dtype=np.float64)
    m = int(v_I.size)
    sv = _check_inputs(v_minus, m, c)
    baseline = guarded_erm(SampleVector(np.concatenate([v_I, sv.finite])), c).price
    if baseline <= 0.0:
        raise DegeneratePrice("baseline price is zero; delta undefined")
    min_price, bid = min_manipulated_price(sv, m, c, method=method)
    delta = 1.0 - min_price / baseline
    return ManipulationResult(
        min_price=min_price,
        best_bid=None if delta == 0.0 else bid,
        baseline_price=baseline,
        delta=delta,
        m=m,
        c=c,
    )


def worst_case_delta(v_minus, m: int, c: float, method: str = "fast") -> ManipulationResult:
    """Worst case over the manipulator's own values: v_I = m copies of max(v_minus).

    Requires c >= m/N so the rule ignores the top m entries; then the
    baseline equals the supremum over all v_I.
    """
    sv = _check_inputs(v_minus, m, c)
    total = sv.n + m
    if c * total < m:
        raise PreconditionC(f"need c >= m/N: c={c}, m={m}, N={total}")
    v_bar = np.full(m, float(sv.finite[0]))
    return incentive_awareness(v_bar, sv, c, method=method)
