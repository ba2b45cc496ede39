"""Reproducible Monte Carlo estimation of manipulation measures.

Replication r of a job draws from a stream keyed by (seed, r) only, and the
per-replication results are reduced in ascending index order with compensated
summation, so estimates are bit-identical for any worker count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .bestresponse import worst_case_delta
from .distributions import Distribution
from .erm import erm_with_sentinels
from .errors import IamsimError, PreconditionC
from .rng import RandomStream, derive_seed, stream_for

WORKERS_ENV = "IAM_WORKERS"


def resolve_workers(workers: Optional[int] = None) -> int:
    if workers is not None:
        return max(1, int(workers))
    raw = os.environ.get(WORKERS_ENV, "").strip()
    if raw:
        count = int(raw)
        if count < 1:
            raise ValueError(f"{WORKERS_ENV} must be a positive integer, got {raw!r}")
        return count
    return 1


@dataclass(frozen=True)
class CSchedule:
    """Guard-level schedule c(N).

    kinds: constant (fixed c), one-over-n, m-over-n, and cuberoot-log with
    c(N) = kappa * (ln N / N)^(1/3); kappa defaults to 1/5.
    """

    kind: str
    c: Optional[float] = None
    kappa: Optional[float] = None

    KINDS = ("constant", "one-over-n", "m-over-n", "cuberoot-log")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown schedule kind {self.kind!r}; known: {self.KINDS}")
        if self.kind == "constant" and self.c is None:
            raise ValueError("constant schedule requires c")
        if self.kind == "cuberoot-log" and self.kappa is None:
            object.__setattr__(self, "kappa", 0.2)

    def value(self, n: int, m: int = 1) -> float:
        if self.kind == "constant":
            c = float(self.c)
        elif self.kind == "one-over-n":
            c = 1.0 / n
        elif self.kind == "m-over-n":
            c = m / n
        else:
            c = self.kappa * (math.log(n) / n) ** (1.0 / 3.0)
        if not 0.0 < c < 1.0:
            raise ValueError(f"schedule {self.label()} gives c={c} outside (0, 1) at n={n}")
        return c

    def label(self) -> str:
        if self.kind == "constant":
            return f"constant:c={self.c!r}"
        if self.kind == "cuberoot-log":
            return f"cuberoot-log:kappa={self.kappa!r}"
        return self.kind


@dataclass(frozen=True)
class EstimateReport:
    mean: float
    stderr: float
    ci95_lo: float
    ci95_hi: float
    reps: int
    seed: int
    n: int
    m: int
    c: float


def _summary(values: Sequence[float], seed: int, n: int, m: int, c: float, binomial: bool = False) -> EstimateReport:
    reps = len(values)
    mean = math.fsum(values) / reps
    if binomial:
        stderr = math.sqrt(max(mean * (1.0 - mean), 0.0) / reps)
    elif reps > 1:
        var = math.fsum((v - mean) ** 2 for v in values) / (reps - 1)
        stderr = math.sqrt(var / reps)
    else:
        stderr = 0.0
    return EstimateReport(
        mean=mean, stderr=stderr, ci95_lo=mean - 1.96 * stderr, ci95_hi=mean + 1.96 * stderr,
        reps=reps, seed=seed, n=n, m=m, c=c,
    )


# -- replication jobs --------------------------------------------------------


@dataclass(frozen=True)
class DeltaWorstJob:
    dist: Distribution
    n: int
    m: int
    c: float

    def replicate(self, stream: RandomStream) -> float:
        draws = self.dist.sample(stream, self.n - self.m)
        return worst_case_delta(draws, self.m, self.c).delta


@dataclass(frozen=True)
class EventProbJob:
    dist: Distribution
    n: int
    m: int
    c: float
    bound: float
    strict: bool

    def replicate(self, stream: RandomStream) -> float:
        draws = self.dist.sample(stream, self.n - self.m)
        k = erm_with_sentinels(draws, self.m, self.c).k_star
        t = self.bound * self.n
        hit = k < t if self.strict else k <= t
        return 1.0 if hit else 0.0


def _run_chunk(args) -> np.ndarray:
    job, seed, start, stop = args
    return np.asarray([job.replicate(stream_for(seed, r)) for r in range(start, stop)], dtype=np.float64)


def run_replications(job, reps: int, seed: int, workers: Optional[int] = None) -> np.ndarray:
    """Per-replication results in replication order, any worker count."""
    if reps < 1:
        raise ValueError(f"reps must be >= 1, got {reps}")
    count = resolve_workers(workers)
    if count <= 1 or reps < 2 * count:
        return _run_chunk((job, seed, 0, reps))
    edges = np.linspace(0, reps, count + 1, dtype=int)
    tasks = [(job, seed, int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]
    with ProcessPoolExecutor(max_workers=count) as pool:
        parts = list(pool.map(_run_chunk, tasks))
    return np.concatenate(parts)


# -- estimators --------------------------------------------------------------


def estimate_delta_worst(
    dist: Distribution, n: int, m: int, c: float, reps: int, seed: int, workers: Optional[int] = None
) -> EstimateReport:
    """Mean worst-case manipulation measure over i.i.d. sample draws."""
    if c * n < m:
        raise PreconditionC(f"need c >= m/n: c={c}, m={m}, n={n}")
    values = run_replications(DeltaWorstJob(dist, n, m, c), reps, seed, workers)
    return _summary(values.tolist(), seed, n, m, c)


def estimate_event_prob(
    dist: Distribution,
    n: int,
    m: int,
    c: float,
    bound: float,
    reps: int,
    seed: int,
    strict: bool = True,
    workers: Optional[int] = None,
) -> EstimateReport:
    """Probability that the winning index falls below bound*n (with m
    sentinel-top placeholders); strict=False uses k* <= bound*n instead."""
    if c * n < m:
        raise PreconditionC(f"need c >= m/n: c={c}, m={m}, n={n}")
    values = run_replications(EventProbJob(dist, n, m, c, bound, strict), reps, seed, workers)
    return _summary(values.tolist(), seed, n, m, c, binomial=True)


# -- sweeps and CSV emission -------------------------------------------------

CSV_HEADER = "distribution,n,m,c,schedule,reps,seed,metric,mean,stderr,ci95_lo,ci95_hi,error"

BoundSpec = Union[float, str, None]


@dataclass(frozen=True)
class SweepRow:
    distribution: str
    schedule: str
    metric: str
    report: Optional[EstimateReport]
    n: int
    m: int
    error: str = ""


def _resolve_bound(bound: BoundSpec, c: float) -> float:
    if isinstance(bound, str):
        text = bound.strip().lower()
        if text == "2c":
            return 2.0 * c
        raise ValueError(f"unknown symbolic bound {bound!r} (supported: '2c')")
    if bound is None:
        raise ValueError("event metric requires a bound")
    return float(bound)


def sweep(
    dist: Distribution,
    n_list: Sequence[int],
    m: int,
    schedule: CSchedule,
    reps: int,
    seed: int,
    metric: str = "delta_worst",
    bound: BoundSpec = None,
    strict: bool = True,
    workers: Optional[int] = None,
) -> list[SweepRow]:
    """One estimate per N; per-row failures are recorded, not raised."""
    if not n_list:
        raise ValueError("n_list must be non-empty")
    if list(n_list) != sorted(n_list):
        raise ValueError("n_list must be ascending")
    rows = []
    for n in n_list:
        row_seed = derive_seed(seed, n)
        try:
            c = schedule.value(n, m)
            if metric == "delta_worst":
                report = estimate_delta_worst(dist, n, m, c, reps, row_seed, workers)
            elif metric == "event_prob":
                report = estimate_event_prob(
                    dist, n, m, c, _resolve_bound(bound, c), reps, row_seed, strict, workers
                )
            else:
                raise ValueError(f"unknown metric {metric!r}")
            rows.append(SweepRow(dist.spec_string(), schedule.label(), metric, report, n, m))
        except (IamsimError, ValueError) as exc:
            rows.append(
                SweepRow(dist.spec_string(), schedule.label(), metric, None, n, m, error=f"{type(exc).__name__}: {exc}")
            )
    return rows


def _g17(x: float) -> str:
    return format(float(x), ".17g")


def rows_to_csv(rows: Sequence[SweepRow]) -> str:
    lines = [CSV_HEADER]
    for row in rows:
        r = row.report
        if r is None:
            cells = [row.distribution, str(row.n), str(row.m), "", row.schedule, "", "", row.metric,
                     "", "", "", "", row.error]
        else:
            cells = [row.distribution, str(r.n), str(r.m), _g17(r.c), row.schedule, str(r.reps), str(r.seed),
                     row.metric, _g17(r.mean), _g17(r.stderr), _g17(r.ci95_lo), _g17(r.ci95_hi), ""]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"
