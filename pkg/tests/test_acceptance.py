"""Acceptance suite: one test per criterion, each printing a PASS line with
its measurements (run with -s to see them inline). Budgets are asserted with
wall-clock checks where the criterion states one."""

import itertools
import math
import time

import numpy as np
import pytest
from scipy.optimize import brentq

from conftest import random_sorted_values
from iamsim.auctions import TwoPhaseConfig, TwoPhaseGainJob, revenue_ratio_check
from iamsim.bestresponse import (
    _candidate_bids_simple,
    min_manipulated_price,
    min_manipulated_price_bruteforce,
    worst_case_delta,
)
from iamsim.cli import main
from iamsim.distributions import (
    AlphaStrongPareto,
    BoundedUniform,
    EqualRevenue,
    Exponential,
    Triangular,
    TwoPoint,
)
from iamsim.erm import guarded_erm
from iamsim.montecarlo import CSchedule, estimate_delta_worst, estimate_event_prob, run_replications, sweep
from iamsim.rng import stream_for

FAMILIES = [
    TwoPoint(2.0),
    BoundedUniform(1.0, 2.0),
    Exponential(1.0),
    EqualRevenue(),
    Triangular(),
    AlphaStrongPareto(0.5),
]


def _report(num, name, detail):
    print(f"ACCEPTANCE {num:>2} {name}: PASS ({detail})")


def test_criterion_01_oracle_equivalence():
    start = time.monotonic()
    rng = np.random.default_rng(101)
    checked = 0
    for trial in range(2000):
        dist = FAMILIES[trial % len(FAMILIES)]
        m = int(rng.integers(1, 6))
        n_minus = int(rng.integers(1, 51 - m))
        w = np.sort(dist.sample(stream_for(5000 + trial), n_minus))[::-1]
        total = n_minus + m
        c = float(rng.uniform(0.0, 0.45))
        exact = min_manipulated_price(w, m, c)
        cands = _candidate_bids_simple(w, m, c * total)
        grid = np.unique(np.concatenate([cands, np.linspace(0.0, float(w.max()) * 1.2, 257)]))
        bf = min_manipulated_price_bruteforce(w, m, c, grid)
        assert bf == exact[0], (w.tolist(), m, c, bf, exact)
        checked += 1
    elapsed = time.monotonic() - start
    assert elapsed < 60.0
    _report(1, "oracle equivalence", f"{checked} instances, {elapsed:.1f}s")


def test_criterion_02_tie_break_unit_tests():
    start = time.monotonic()
    out = guarded_erm([2.0, 1.0], 0.0)
    assert (out.k_star, out.price) == (2, 1.0)
    out = guarded_erm([10.0, 6.0, 4.0, 1.0], 0.25)
    assert (out.k_star, out.price) == (3, 4.0)
    out = guarded_erm([5.0], 0.0)
    assert (out.k_star, out.price) == (1, 5.0)
    elapsed = time.monotonic() - start
    assert elapsed < 1.0
    _report(2, "tie-break unit tests", f"{elapsed * 1000:.0f}ms")


def test_criterion_03_bounded_support_guard():
    start = time.monotonic()
    n, reps = 100, 1000  # 1e5 draws per family
    for dist in (BoundedUniform(1.0, 2.0), TwoPoint(2.0)):
        report = estimate_event_prob(dist, n, 1, 0.25, bound=0.5, reps=reps, seed=303, strict=False)
        assert report.mean == 0.0, dist.spec_string()
    elapsed = time.monotonic() - start
    assert elapsed < 30.0
    _report(3, "bounded-support guard", f"2x{n * reps} draws, zero events, {elapsed:.1f}s")


def test_criterion_04_c_invariance_bounded():
    start = time.monotonic()
    rng = np.random.default_rng(404)
    families = [TwoPoint(2.0), BoundedUniform(1.0, 2.0)]
    for trial in range(1000):
        dist = families[trial % 2]
        m = int(rng.integers(1, 3))
        n_minus = int(rng.integers(8, 60))
        total = n_minus + m
        if m / total > 0.25:
            continue
        w = np.sort(dist.sample(stream_for(7000 + trial), n_minus))[::-1]
        ref = worst_case_delta(w, m, m / total).delta
        for c in np.linspace(m / total, 0.25, 5):
            assert worst_case_delta(w, m, float(c)).delta == ref
    elapsed = time.monotonic() - start
    assert elapsed < 60.0
    _report(4, "c-invariance on bounded support", f"1000 instances x 5 guards, exact, {elapsed:.1f}s")


def test_criterion_05_small_index_event_reproduction():
    start = time.monotonic()
    rows = sweep(
        Triangular(), [500, 1000, 2000], 1, CSchedule("cuberoot-log", kappa=0.2),
        reps=10_000, seed=505, metric="event_prob", bound="2c", strict=True,
    )
    means = [row.report.mean for row in rows]
    assert all(mean >= 0.75 for mean in means), means
    elapsed = time.monotonic() - start
    assert elapsed < 300.0
    _report(5, "heavy-tail small-index event", f"probs={[round(m, 3) for m in means]}, {elapsed:.0f}s")


def test_criterion_06_equal_revenue_nonconvergence():
    start = time.monotonic()
    rows = sweep(EqualRevenue(), [1000, 10_000], 1, CSchedule("one-over-n"), reps=5000, seed=606)
    for row in rows:
        assert row.report.ci95_lo >= 0.01, row
    elapsed = time.monotonic() - start
    assert elapsed < 600.0
    detail = ", ".join(f"n={r.report.n}: {r.report.mean:.3f}" for r in rows)
    _report(6, "equal-revenue floor at c=1/N", f"{detail}, {elapsed:.0f}s")


def test_criterion_07_equal_revenue_convergence_trend():
    start = time.monotonic()
    rows = sweep(EqualRevenue(), [100, 400, 1600, 6400], 1, CSchedule("cuberoot-log", kappa=0.2), reps=5000, seed=707)
    means = [row.report.mean for row in rows]
    assert all(later < earlier for earlier, later in zip(means, means[1:])), means
    assert means[-1] < means[0] / 2.0, means
    elapsed = time.monotonic() - start
    assert elapsed < 600.0
    _report(7, "guarded schedule convergence trend", f"deltas={[round(m, 4) for m in means]}, {elapsed:.0f}s")


def test_criterion_08_lower_bound_scaling():
    start = time.monotonic()
    rows = sweep(TwoPoint(2.0), [100, 400, 1600], 1, CSchedule("constant", c=0.25), reps=20_000, seed=808)
    scaled = [row.report.mean * math.sqrt(row.report.n) for row in rows]
    for s in scaled[1:]:
        assert scaled[0] / 3.0 <= s <= 3.0 * scaled[0], scaled
        assert s >= 0.3 * scaled[0], scaled
    elapsed = time.monotonic() - start
    assert elapsed < 600.0
    _report(8, "two-point 1/sqrt(N) scaling", f"delta*sqrt(N)={[round(s, 3) for s in scaled]}, {elapsed:.0f}s")


def test_criterion_09_exhaustive_expectation_agreement():
    start = time.monotonic()
    n, m, c, D = 8, 1, 0.25, 2.0
    exact = 0.0
    for bits in itertools.product([0, 1], repeat=n - m):
        w = np.sort(np.where(np.asarray(bits) == 1, D, 1.0))[::-1]
        baseline = guarded_erm(np.concatenate([[w[0]], w]), c).price
        cands = _candidate_bids_simple(w, m, c * n)
        grid = np.concatenate([cands, np.linspace(0.0, D, 101)])
        min_price = min_manipulated_price_bruteforce(w, m, c, grid)
        exact += (1.0 - min_price / baseline) / 2 ** (n - m)
    report = estimate_delta_worst(TwoPoint(D), n, m, c, reps=100_000, seed=909)
    assert abs(report.mean - exact) <= 4.0 * report.stderr
    elapsed = time.monotonic() - start
    assert elapsed < 120.0
    _report(9, "exhaustive expectation agreement", f"exact={exact:.5f}, mc={report.mean:.5f}+-{report.stderr:.5f}, {elapsed:.0f}s")


def test_criterion_10_two_phase_epsilon_consistency():
    start = time.monotonic()
    cfg = TwoPhaseConfig(dist=TwoPoint(2.0), t1=32, t2=8, k1=2, k2=2, m1=1, m2=1, c=0.125)
    rows = run_replications(TwoPhaseGainJob(cfg), reps=10_000, seed=1010)
    realized, bound = rows[:, 0], rows[:, 1]
    assert np.all(realized <= bound + 1e-12)
    delta = estimate_delta_worst(TwoPoint(2.0), 64, 1, 0.125, reps=10_000, seed=1011)
    cap = cfg.m2 * 2.0 * delta.mean
    se_r = float(np.std(realized, ddof=1) / math.sqrt(realized.size))
    slack = 3.0 * math.hypot(se_r, cfg.m2 * 2.0 * delta.stderr)
    mean_r = float(np.mean(realized))
    assert mean_r <= cap + slack
    elapsed = time.monotonic() - start
    assert elapsed < 300.0
    _report(10, "two-phase epsilon consistency", f"gain={mean_r:.4f} <= cap={cap:.4f}+{slack:.4f}, {elapsed:.0f}s")


def test_criterion_11_one_to_many_revenue_transfer():
    start = time.monotonic()
    # pick p > v* with single-bidder ratio ~ 0.95: p e^{-p} = 0.95 / e
    p = float(brentq(lambda x: x * math.exp(-x) - 0.95 / math.e, 1.0, 4.0))
    results = {}
    for K, k in [(2, 1), (2, 2), (3, 1), (3, 2)]:
        res = revenue_ratio_check(Exponential(1.0), p, K, k, reps=1_000_000, seed=1100 + K * 10 + k)
        slack = 3.0 * math.hypot(res.ratio_single.stderr, res.ratio_multi.stderr)
        assert res.ratio_multi.mean >= res.ratio_single.mean - slack, (K, k, res)
        results[(K, k)] = (res.ratio_single.mean, res.ratio_multi.mean)
    elapsed = time.monotonic() - start
    assert elapsed < 600.0
    detail = "; ".join(f"K={K},k={k}: {s:.4f}->{m:.4f}" for (K, k), (s, m) in results.items())
    _report(11, "one-to-many revenue transfer", f"p={p:.3f}, {detail}, {elapsed:.0f}s")


def test_criterion_12_quantile_concentration():
    start = time.monotonic()
    n, m, delta, trials = 2000, 3, 0.05, 2000
    dist = Exponential(1.0)
    log_term = math.log(2.0 * (n - m) / delta)
    bound = math.sqrt(2.0 * log_term / (n - m)) + log_term / (n - m) + m / n
    ranks = np.arange(m + 1, n + 1) / n
    failures = 0
    for trial in range(trials):
        draws = np.sort(dist.sample(stream_for(1200, trial), n - m))[::-1]
        quantiles = np.exp(-draws)  # survival of the unit-rate exponential
        if np.any(np.abs(quantiles - ranks) > bound):
            failures += 1
    rate = failures / trials
    sigma = math.sqrt(delta * (1.0 - delta) / trials)
    assert rate <= delta + 3.0 * sigma
    elapsed = time.monotonic() - start
    assert elapsed < 120.0
    _report(12, "quantile concentration", f"failure rate {rate:.4f} <= {delta + 3 * sigma:.4f}, {elapsed:.0f}s")


def test_criterion_13_worker_determinism(tmp_path, monkeypatch):
    start = time.monotonic()
    outputs = []
    for workers in (1, 2, 8):
        monkeypatch.setenv("IAM_WORKERS", str(workers))
        out = tmp_path / f"w{workers}.csv"
        status = main(
            f"sweep --dist equal-revenue --n 100,200 --m 1 --c-schedule one-over-n --reps 64 --seed 13 --out {out}".split()
        )
        assert status == 0
        outputs.append(out.read_bytes())
    monkeypatch.delenv("IAM_WORKERS")
    assert outputs[0] == outputs[1] == outputs[2]
    elapsed = time.monotonic() - start
    assert elapsed < 120.0
    _report(13, "worker-count determinism", f"IAM_WORKERS 1/2/8 byte-identical, {elapsed:.0f}s")
