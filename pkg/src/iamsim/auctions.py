"""Auction applications: two-phase repeated auctions, multi-unit Vickrey,
uniform-price group deviations, and the optimal-reserve revenue benchmark.

Allocation convention: a bid (or value, in the uniform-price auction) wins
when it is at or above the reserve; a winner's utility (v - payment) is zero
at the boundary, matching the strict indicator in the interim-utility form.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import integrate

from .bestresponse import min_manipulated_price
from .distributions import Distribution
from .erm import guarded_erm
from .errors import NoAttainedReserve, ReversedPrices
from .montecarlo import EstimateReport, _summary, run_replications
from .rng import RandomStream, derive_seed, stream_for


def interim_utility(
    dist: Distribution,
    K: int,
    v: float,
    p: float,
    mode: str = "quad",
    reps: int = 100_000,
    seed: int = 0,
) -> float:
    """Expected utility of a value-v bidder facing reserve p and K-1 i.i.d. rivals.

    E[(v - max(p, X_2..X_K)) * 1[v > max(p, X_2..X_K)]], which reduces to the
    integral of F(y)^(K-1) over [p, v]; zero when v <= p.
    """
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    if v < 0 or p < 0:
        raise ValueError("v and p must be non-negative")
    if v <= p:
        return 0.0
    if K == 1:
        return v - p
    if mode == "quad":
        lo, hi = p, v
        pts = [x for x in (dist.support[0], dist.support[1]) if math.isfinite(x) and lo < x < hi]
        val, _ = integrate.quad(lambda y: dist.cdf(y) ** (K - 1), lo, hi, points=pts or None, limit=200)
        return float(val)
    if mode == "mc":
        stream = stream_for(seed)
        rivals = dist.sample(stream, reps * (K - 1)).reshape(reps, K - 1)
        top = np.maximum(rivals.max(axis=1), p)
        return float(np.mean((v - top) * (v > top)))
    raise ValueError(f"unknown mode {mode!r}")


def lipschitz_gain_bound(p2: float, p1: float) -> float:
    """Per-auction cap on the utility gain from a price drop p1 -> p2."""
    if p2 > p1:
        raise ReversedPrices(f"need p2 <= p1, got p2={p2}, p1={p1}")
    return p1 - p2


def allocation_quantile_form(K: int, k: int, q: float) -> float:
    """Win probability of a quantile-q bidder in a k-unit, K-bidder Vickrey
    auction with no reserve: sum_{i<k} C(K-1,i) q^i (1-q)^(K-1-i)."""
    return float(sum(math.comb(K - 1, i) * q**i * (1.0 - q) ** (K - 1 - i) for i in range(min(k, K))))


def _vickrey_rounds(values: np.ndarray, reserve: float, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Winner counts and per-winner payment for rows of bids.

    Winners are the top-k bids at or above the reserve; every winner pays
    max(reserve, (k+1)-th largest bid).
    """
    rows, K = values.shape
    svals = np.sort(values, axis=1)[:, ::-1]
    winners = np.minimum((svals >= reserve).sum(axis=1), k)
    if k < K:
        pay = np.maximum(reserve, svals[:, k])
    else:
        pay = np.full(rows, float(reserve))
    return winners, pay


# -- optimal-reserve benchmark ------------------------------------------------


def _attained_reserve(dist: Distribution) -> float:
    opt = dist.optimal_reserve()
    if not opt.attained:
        raise NoAttainedReserve(f"{dist.spec_string()} has no attained optimal reserve")
    return opt.v_star


def myerson_revenue(
    dist: Distribution, K: int, units_k: int = 1, reps: int = 100_000, seed: int = 0
) -> EstimateReport:
    """Monte Carlo expected revenue of the K-bidder, units_k-unit Vickrey
    auction with the distribution's optimal reserve. Report fields: n=K,
    m=units_k, c=reserve."""
    if K < 1 or not 1 <= units_k <= K:
        raise ValueError(f"need K >= 1 and 1 <= units_k <= K, got K={K}, units_k={units_k}")
    reserve = _attained_reserve(dist)
    stream = stream_for(seed)
    values = dist.sample(stream, reps * K).reshape(reps, K)
    winners, pay = _vickrey_rounds(values, reserve, units_k)
    rev = winners * pay
    return _summary(rev.tolist(), seed, n=K, m=units_k, c=reserve)


@functools.lru_cache(maxsize=128)
def _myerson_mean_cached(dist: Distribution, K: int, units_k: int, reps: int, seed: int) -> float:
    return myerson_revenue(dist, K, units_k, reps, seed).mean


@dataclass(frozen=True)
class RevenueRatioResult:
    ratio_single: EstimateReport
    ratio_multi: EstimateReport
    reserve: float
    r_star: float


def revenue_ratio_check(
    dist: Distribution, p: float, K: int, units_k: int = 1, reps: int = 100_000, seed: int = 0
) -> RevenueRatioResult:
    """Revenue ratios of posting reserve p instead of the optimal one.

    ratio_single: one-bidder posted price p against R*. ratio_multi: K-bidder
    units_k-unit Vickrey with reserve p against the same auction at the
    optimal reserve, on paired draws (ratio-estimator stderr).
    """
    if p <= 0:
        raise ValueError(f"p must be positive, got {p}")
    opt = dist.optimal_reserve()
    if not opt.attained:
        raise NoAttainedReserve(f"{dist.spec_string()} has no attained optimal reserve")
    reserve = opt.v_star

    stream = stream_for(seed)
    single = dist.sample(stream, reps)
    rev_single = np.where(single >= p, p, 0.0)
    mean_s = float(np.mean(rev_single)) / opt.r_star
    se_s = float(np.std(rev_single, ddof=1)) / math.sqrt(reps) / opt.r_star
    single_report = EstimateReport(
        mean=mean_s, stderr=se_s, ci95_lo=mean_s - 1.96 * se_s, ci95_hi=mean_s + 1.96 * se_s,
        reps=reps, seed=seed, n=1, m=1, c=p,
    )

    values = dist.sample(stream, reps * K).reshape(reps, K)
    win_p, pay_p = _vickrey_rounds(values, p, units_k)
    win_o, pay_o = _vickrey_rounds(values, reserve, units_k)
    a = win_p * pay_p
    b = win_o * pay_o
    abar, bbar = float(np.mean(a)), float(np.mean(b))
    ratio = abar / bbar
    cov = np.cov(a, b, ddof=1)
    var_ratio = (cov[0, 0] - 2.0 * ratio * cov[0, 1] + ratio * ratio * cov[1, 1]) / (bbar * bbar * reps)
    se_m = math.sqrt(max(var_ratio, 0.0))
    multi_report = EstimateReport(
        mean=ratio, stderr=se_m, ci95_lo=ratio - 1.96 * se_m, ci95_hi=ratio + 1.96 * se_m,
        reps=reps, seed=seed, n=K, m=units_k, c=p,
    )
    return RevenueRatioResult(single_report, multi_report, reserve=reserve, r_star=opt.r_star)


# -- two-phase repeated auctions ----------------------------------------------


@dataclass(frozen=True)
class TwoPhaseConfig:
    dist: Distribution
    t1: int
    t2: int
    k1: int
    k2: int
    m1: int
    m2: int
    c: float
    units_k: int = 1

    def __post_init__(self):
        if min(self.t1, self.t2, self.k1, self.k2) < 1:
            raise ValueError("t1, t2, k1, k2 must be >= 1")
        if not 0 <= self.m1 <= self.t1:
            raise ValueError(f"need 0 <= m1 <= t1, got m1={self.m1}, t1={self.t1}")
        if not 0 <= self.m2 <= self.t2:
            raise ValueError(f"need 0 <= m2 <= t2, got m2={self.m2}, t2={self.t2}")
        if not 1 <= self.units_k <= self.k2:
            raise ValueError(f"need 1 <= units_k <= k2, got {self.units_k}")
        if self.c * self.t1 * self.k1 < self.m1:
            raise ValueError(f"need c >= m1/(t1*k1): c={self.c}, m1={self.m1}, t1*k1={self.t1 * self.k1}")
        if not 0.0 <= self.c < 1.0:
            raise ValueError(f"c must satisfy 0 <= c < 1, got {self.c}")


@dataclass(frozen=True)
class TwoPhaseOutcome:
    reserve_truthful: float
    reserve_deviated: float
    price_drop: float
    deviation_gain_realized: float
    deviation_gain_bound: float
    revenue_phase1: float
    revenue_phase2: float
    myerson_benchmark: float
    dev_utility_phase1: float
    dev_utility_phase2: float


@dataclass(frozen=True)
class _World:
    """One realization of all values and participation slots."""

    dev_values: np.ndarray  # m1 + m2 entries
    phase1: np.ndarray  # (t1, k1); deviator occupies slot 0 of dev_auctions1
    phase2: np.ndarray  # (t2, k2); deviator occupies slot 0 of dev_auctions2
    dev_auctions1: np.ndarray
    dev_auctions2: np.ndarray


def _draw_world(config: TwoPhaseConfig, stream: RandomStream) -> _World:
    cfg = config
    dev_values = cfg.dist.sample(stream, cfg.m1 + cfg.m2)
    others1 = cfg.dist.sample(stream, cfg.t1 * cfg.k1 - cfg.m1)
    others2 = cfg.dist.sample(stream, cfg.t2 * cfg.k2 - cfg.m2)
    dev_auctions1 = np.sort(stream.choice(cfg.t1, size=cfg.m1, replace=False))
    dev_auctions2 = np.sort(stream.choice(cfg.t2, size=cfg.m2, replace=False))

    phase1 = np.empty((cfg.t1, cfg.k1))
    mask1 = np.zeros((cfg.t1, cfg.k1), dtype=bool)
    mask1[dev_auctions1, 0] = True
    phase1[~mask1] = others1
    phase1[mask1] = dev_values[: cfg.m1]

    phase2 = np.empty((cfg.t2, cfg.k2))
    mask2 = np.zeros((cfg.t2, cfg.k2), dtype=bool)
    mask2[dev_auctions2, 0] = True
    phase2[~mask2] = others2
    phase2[mask2] = dev_values[cfg.m1 : cfg.m1 + cfg.m2]
    return _World(dev_values, phase1, phase2, dev_auctions1, dev_auctions2)


def _phase1_run(config: TwoPhaseConfig, world: _World, dev_bid: Optional[float]):
    """Second-price auctions with no reserve; returns (reserve, dev utility, revenue)."""
    cfg = config
    bids = world.phase1.copy()
    if dev_bid is not None and cfg.m1 > 0:
        bids[world.dev_auctions1, 0] = dev_bid
    winners, pay = _vickrey_rounds(bids, 0.0, 1)
    revenue = float(np.sum(winners * pay))

    dev_utility = 0.0
    for slot, t in enumerate(world.dev_auctions1):
        row = bids[t]
        if row[0] == row.max():  # deviator wins top ties (deterministic slot order)
            second = np.partition(row, -2)[-2] if cfg.k1 > 1 else 0.0
            dev_utility += world.dev_values[slot] - second
    reserve = guarded_erm(bids.ravel(), cfg.c).price
    return reserve, dev_utility, revenue


def _phase2_run(config: TwoPhaseConfig, world: _World, reserve: float):
    """Reserve-price auctions: posted price when k2 == 1, otherwise
    units_k-unit Vickrey. Returns (dev utility, revenue)."""
    cfg = config
    vals = world.phase2
    winners, pay = _vickrey_rounds(vals, reserve, cfg.units_k)
    revenue = float(np.sum(winners * pay))

    dev_utility = 0.0
    for slot, t in enumerate(world.dev_auctions2):
        v = world.dev_values[cfg.m1 + slot]
        row = vals[t]
        if v < reserve:
            continue
        if cfg.k2 == 1:
            dev_utility += v - reserve
            continue
        rank = int(np.sum(row > v))  # deviator loses unit ties, conservative for her
        if rank < cfg.units_k:
            dev_utility += v - pay[t]
    return dev_utility, revenue


def run_two_phase(
    config: TwoPhaseConfig, deviate: bool, seed: int, benchmark_reps: int = 20_000
) -> TwoPhaseOutcome:
    """Simulate one paired world; report the branch selected by ``deviate``.

    The reserve is learned from all first-phase bids; when deviating, the
    designated bidder replaces her m1 first-phase bids with the identical
    best-response bid minimizing the learned reserve and stays truthful in
    phase 2.
    """
    world = _draw_world(config, stream_for(seed))
    return _run_world(config, world, deviate, benchmark_reps)


def _run_world(config: TwoPhaseConfig, world: _World, deviate: bool, benchmark_reps: int) -> TwoPhaseOutcome:
    cfg = config
    reserve_t, dev_u1_t, rev1_t = _phase1_run(cfg, world, None)
    dev_u2_t, rev2_t = _phase2_run(cfg, world, reserve_t)

    if cfg.m1 > 0:
        mask1 = np.zeros((cfg.t1, cfg.k1), dtype=bool)
        mask1[world.dev_auctions1, 0] = True
        v_minus = world.phase1[~mask1].ravel()
        _, best_bid = min_manipulated_price(v_minus, cfg.m1, cfg.c)
        reserve_d, dev_u1_d, rev1_d = _phase1_run(cfg, world, best_bid)
    else:
        reserve_d, dev_u1_d, rev1_d = reserve_t, dev_u1_t, rev1_t
    dev_u2_d, rev2_d = _phase2_run(cfg, world, reserve_d)

    realized = (dev_u1_d + dev_u2_d) - (dev_u1_t + dev_u2_t)
    bound = cfg.m2 * (reserve_t - reserve_d)

    benchmark = math.nan
    if benchmark_reps > 0:
        try:
            mye1 = _myerson_mean_cached(cfg.dist, cfg.k1, 1, benchmark_reps, derive_seed(0xB, cfg.k1, 1))
            mye2 = _myerson_mean_cached(cfg.dist, cfg.k2, cfg.units_k, benchmark_reps, derive_seed(0xB, cfg.k2, cfg.units_k))
            benchmark = cfg.t1 * mye1 + cfg.t2 * mye2
        except NoAttainedReserve:
            benchmark = math.nan

    if deviate:
        rev1, rev2, du1, du2 = rev1_d, rev2_d, dev_u1_d, dev_u2_d
    else:
        rev1, rev2, du1, du2 = rev1_t, rev2_t, dev_u1_t, dev_u2_t
    return TwoPhaseOutcome(
        reserve_truthful=reserve_t,
        reserve_deviated=reserve_d,
        price_drop=reserve_t - reserve_d,
        deviation_gain_realized=realized,
        deviation_gain_bound=bound,
        revenue_phase1=rev1,
        revenue_phase2=rev2,
        myerson_benchmark=benchmark,
        dev_utility_phase1=du1,
        dev_utility_phase2=du2,
    )


@dataclass(frozen=True)
class TwoPhaseGainJob:
    config: TwoPhaseConfig

    def replicate(self, stream: RandomStream) -> np.ndarray:
        world = _draw_world(self.config, stream)
        out = _run_world(self.config, world, deviate=True, benchmark_reps=0)
        return np.asarray([out.deviation_gain_realized, out.deviation_gain_bound])


def estimate_deviation_gain(
    config: TwoPhaseConfig, reps: int, seed: int, workers: Optional[int] = None
) -> tuple[EstimateReport, EstimateReport]:
    """Paired (deviate vs truthful, same world) estimates of the realized
    deviation gain and the price-drop bound m2*(p_truthful - p_deviated)."""
    rows = run_replications(TwoPhaseGainJob(config), reps, seed, workers)
    n = config.t1 * config.k1
    realized = _summary(rows[:, 0].tolist(), seed, n=n, m=config.m1, c=config.c)
    bound = _summary(rows[:, 1].tolist(), seed, n=n, m=config.m1, c=config.c)
    return realized, bound


# -- uniform-price auction -----------------------------------------------------


@dataclass(frozen=True)
class GroupDeviationOutcome:
    n: int
    m_group: int
    gain: EstimateReport  # mean per-member utility gain
    price_truthful_mean: float
    price_deviated_mean: float
    bound_violations: int  # replications with per-member gain > price drop
    c_used: float
    c_substituted: bool


@dataclass(frozen=True)
class UniformPriceJob:
    dist: Distribution
    n: int
    m_group: int
    c: float

    def replicate(self, stream: RandomStream) -> np.ndarray:
        values = np.sort(self.dist.sample(stream, self.n))[::-1]
        p1 = guarded_erm(values, self.c).price
        coalition = values[: self.m_group]
        v_minus = values[self.m_group :]
        p2, _ = min_manipulated_price(v_minus, self.m_group, self.c)
        u1 = np.where(coalition >= p1, coalition - p1, 0.0)
        u2 = np.where(coalition >= p2, coalition - p2, 0.0)
        gains = u2 - u1
        tol = 1e-9 * max(1.0, p1)
        violated = 1.0 if np.any(gains > (p1 - p2) + tol) else 0.0
        return np.asarray([float(np.mean(gains)), p1, p2, violated])


def run_uniform_price(
    dist: Distribution, n: int, m_group: int, reps: int, seed: int, workers: Optional[int] = None
) -> GroupDeviationOutcome:
    """N-copy uniform-price auction at the learned price, with the top-value
    m_group coalition submitting the best-response identical bid.

    The price rule runs at c = 1/n; coalitions larger than one need
    c >= m_group/n for the worst-case reduction, so c = m_group/n is
    substituted and reported.
    """
    if not 1 <= m_group <= n - 1:
        raise ValueError(f"need 1 <= m_group < n, got m_group={m_group}, n={n}")
    c_used = max(1.0 / n, m_group / n)
    rows = run_replications(UniformPriceJob(dist, n, m_group, c_used), reps, seed, workers)
    gain = _summary(rows[:, 0].tolist(), seed, n=n, m=m_group, c=c_used)
    return GroupDeviationOutcome(
        n=n,
        m_group=m_group,
        gain=gain,
        price_truthful_mean=float(np.mean(rows[:, 1])),
        price_deviated_mean=float(np.mean(rows[:, 2])),
        bound_violations=int(np.sum(rows[:, 3])),
        c_used=c_used,
        c_substituted=m_group > 1,
    )
