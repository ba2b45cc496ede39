"""Value-distribution families with exact CDF, quantile, and revenue-curve math.

Conventions (quantile space): q(v) = 1 - F(v) is the survival probability,
v(q) its generalized inverse, and R(q) = q * v(q) the revenue curve of
posting price v(q) to a single buyer. At atoms, v(q) is the upper inverse
inf{v : 1 - F(v) < q}, which makes inverse-transform sampling exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import UnboundedQuantile
from .rng import RandomStream

# Smallest admissible quantile: clamps u=0 uniform variates and anchors
# geometric grids for heavy-tailed families.
_Q_FLOOR = 1e-300


@dataclass(frozen=True)
class RevenueCurvePoint:
    q: float
    value: float
    revenue: float


@dataclass(frozen=True)
class OptimalReserve:
    """Optimal posted price data: v* = v(q*), r_star = R(q*) = max_q R(q).

    ``attained`` is False when the supremum of R is not attained (constant or
    open-supremum revenue curves); then q_star and v_star are NaN and r_star
    holds the supremum.
    """

    v_star: float
    q_star: float
    r_star: float
    attained: bool


@dataclass(frozen=True)
class ClassReport:
    """Numerical distribution-class check on a grid.

    ``mhr``/``alpha_hat`` are None for families with atoms (density-based
    checks not applicable). ``alpha_hat`` is the minimum virtual-value slope
    observed on the grid; ``alpha_strong`` compares it against the requested
    alpha when one is given.
    """

    bounded: bool
    support_lo: float
    support_hi: float
    mhr: Optional[bool]
    mhr_violation: Optional[float]
    alpha_hat: Optional[float]
    alpha_strong: Optional[bool]


@dataclass(frozen=True)
class Distribution:
    """Base class: immutable, freely shareable across threads."""

    #: (lo, hi) support endpoints; hi may be math.inf
    support = (0.0, math.inf)
    has_atoms = False

    def spec_string(self) -> str:
        raise NotImplementedError

    def cdf_array(self, v: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def quantile_array(self, q: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def pdf_array(self, v: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def optimal_reserve(self) -> OptimalReserve:
        raise NotImplementedError

    # -- shared helpers ----------------------------------------------------

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.support[1])

    def cdf(self, v: float) -> float:
        if v < 0:
            raise ValueError(f"cdf requires v >= 0, got {v}")
        return float(self.cdf_array(np.asarray([v], dtype=np.float64))[0])

    def quantile_value(self, q: float) -> float:
        if q == 0.0:
            if not self.bounded:
                raise UnboundedQuantile(f"{self.spec_string()}: v(q) diverges as q -> 0")
            return float(self.support[1])
        if not 0.0 < q <= 1.0:
            raise ValueError(f"quantile requires q in (0, 1], got {q}")
        return float(self.quantile_array(np.asarray([q], dtype=np.float64))[0])

    def revenue(self, q: float) -> RevenueCurvePoint:
        v = self.quantile_value(q)
        return RevenueCurvePoint(q=q, value=v, revenue=q * v)

    def sample(self, stream: RandomStream, count: int) -> np.ndarray:
        """i.i.d. draws by inverse transform: value = v(q) at q = u ~ U[0,1)."""
        if count < 0:
            raise ValueError(f"count must be >= 0, got {count}")
        if count == 0:
            return np.empty(0, dtype=np.float64)
        u = stream.random(count)
        np.clip(u, _Q_FLOOR, None, out=u)
        return self.quantile_array(u)


@dataclass(frozen=True)
class TwoPoint(Distribution):
    """Mass 1 - 1/D at value 1 and mass 1/D at value D, D > 1."""

    D: float

    def __post_init__(self):
        if not self.D > 1:
            raise ValueError(f"two-point requires D > 1, got {self.D}")

    has_atoms = True

    @property
    def support(self):
        return (1.0, self.D)

    def spec_string(self) -> str:
        return f"two-point:D={_fmt(self.D)}"

    def cdf_array(self, v):
        return np.where(v < 1.0, 0.0, np.where(v < self.D, 1.0 - 1.0 / self.D, 1.0))

    def quantile_array(self, q):
        # upper inverse: the atom at D covers q in (0, 1/D]
        return np.where(q <= 1.0 / self.D, self.D, 1.0)

    def pdf_array(self, v):
        raise ValueError("two-point has atoms; no density")

    def optimal_reserve(self) -> OptimalReserve:
        # R(1/D) = R(1) = 1; ties resolve to the larger quantile.
        return OptimalReserve(v_star=1.0, q_star=1.0, r_star=1.0, attained=True)


@dataclass(frozen=True)
class BoundedUniform(Distribution):
    """Uniform on [lo, hi] with lo >= 1."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (self.lo >= 1 and self.hi > self.lo):
            raise ValueError(f"uniform requires 1 <= lo < hi, got lo={self.lo}, hi={self.hi}")

    @property
    def support(self):
        return (self.lo, self.hi)

    def spec_string(self) -> str:
        return f"uniform:lo={_fmt(self.lo)},hi={_fmt(self.hi)}"

    def cdf_array(self, v):
        return np.clip((v - self.lo) / (self.hi - self.lo), 0.0, 1.0)

    def quantile_array(self, q):
        return self.hi - q * (self.hi - self.lo)

    def pdf_array(self, v):
        inside = (v >= self.lo) & (v <= self.hi)
        return np.where(inside, 1.0 / (self.hi - self.lo), 0.0)

    def optimal_reserve(self) -> OptimalReserve:
        # R(q) = q*(hi - q*(hi - lo)): vertex at q = hi / (2*(hi - lo)).
        q0 = self.hi / (2.0 * (self.hi - self.lo))
        if q0 >= 1.0:
            return OptimalReserve(v_star=self.lo, q_star=1.0, r_star=self.lo, attained=True)
        v0 = self.hi / 2.0
        return OptimalReserve(v_star=v0, q_star=q0, r_star=q0 * v0, attained=True)


@dataclass(frozen=True)
class Exponential(Distribution):
    """F(v) = 1 - exp(-rate * v) on [0, inf)."""

    rate: float

    def __post_init__(self):
        if not self.rate > 0:
            raise ValueError(f"exp requires rate > 0, got {self.rate}")

    def spec_string(self) -> str:
        return f"exp:rate={_fmt(self.rate)}"

    def cdf_array(self, v):
        return -np.expm1(-self.rate * v)

    def quantile_array(self, q):
        return -np.log(q) / self.rate

    def pdf_array(self, v):
        return self.rate * np.exp(-self.rate * v)

    def optimal_reserve(self) -> OptimalReserve:
        # maximize v * exp(-rate*v): v* = 1/rate, q* = 1/e
        return OptimalReserve(
            v_star=1.0 / self.rate, q_star=1.0 / math.e, r_star=1.0 / (math.e * self.rate), attained=True
        )


@dataclass(frozen=True)
class EqualRevenue(Distribution):
    """F(v) = 1 - 1/v on [1, inf); every posted price earns revenue 1."""

    @property
    def support(self):
        return (1.0, math.inf)

    def spec_string(self) -> str:
        return "equal-revenue"

    def cdf_array(self, v):
        return np.where(v < 1.0, 0.0, 1.0 - 1.0 / np.maximum(v, 1.0))

    def quantile_array(self, q):
        return 1.0 / q

    def pdf_array(self, v):
        return np.where(v < 1.0, 0.0, 1.0 / np.maximum(v, 1.0) ** 2)

    def optimal_reserve(self) -> OptimalReserve:
        # R(q) = 1 everywhere: no canonical maximizer.
        return OptimalReserve(v_star=math.nan, q_star=math.nan, r_star=1.0, attained=False)


@dataclass(frozen=True)
class Triangular(Distribution):
    """F(v) = 1 - 1/(v+1) on [0, inf); R(q) = 1 - q with open supremum 1."""

    def spec_string(self) -> str:
        return "triangular"

    def cdf_array(self, v):
        return np.where(v < 0.0, 0.0, 1.0 - 1.0 / (np.maximum(v, 0.0) + 1.0))

    def quantile_array(self, q):
        return 1.0 / q - 1.0

    def pdf_array(self, v):
        return np.where(v < 0.0, 0.0, 1.0 / (np.maximum(v, 0.0) + 1.0) ** 2)

    def optimal_reserve(self) -> OptimalReserve:
        return OptimalReserve(v_star=math.nan, q_star=math.nan, r_star=1.0, attained=False)


@dataclass(frozen=True)
class AlphaStrongPareto(Distribution):
    """F(x) = 1 - (1 + (1-alpha)x)^(-1/(1-alpha)) on [0, inf), alpha in (0, 1].

    Virtual value is alpha*x - 1, so the virtual-value slope equals alpha
    everywhere; the alpha -> 1 limit is Exponential(1).
    """

    alpha: float

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha-pareto requires alpha in (0, 1], got {self.alpha}")

    def spec_string(self) -> str:
        return f"alpha-pareto:alpha={_fmt(self.alpha)}"

    def cdf_array(self, v):
        if self.alpha == 1.0:
            return -np.expm1(-v)
        b = 1.0 - self.alpha
        return 1.0 - (1.0 + b * v) ** (-1.0 / b)

    def quantile_array(self, q):
        if self.alpha == 1.0:
            return -np.log(q)
        b = 1.0 - self.alpha
        return (q ** (-b) - 1.0) / b

    def pdf_array(self, v):
        if self.alpha == 1.0:
            return np.exp(-v)
        b = 1.0 - self.alpha
        return (1.0 + b * v) ** (-(2.0 - self.alpha) / b)

    def optimal_reserve(self) -> OptimalReserve:
        a = self.alpha
        if a == 1.0:
            return OptimalReserve(v_star=1.0, q_star=1.0 / math.e, r_star=1.0 / math.e, attained=True)
        q_star = a ** (1.0 / (1.0 - a))
        return OptimalReserve(v_star=1.0 / a, q_star=q_star, r_star=a ** (a / (1.0 - a)), attained=True)


DistributionSpec = Distribution  # public alias used in signatures


# -- module-level operation surface -----------------------------------------


def cdf(dist: Distribution, v: float) -> float:
    return dist.cdf(v)


def quantile_value(dist: Distribution, q: float) -> float:
    return dist.quantile_value(q)


def sample(dist: Distribution, stream: RandomStream, count: int) -> np.ndarray:
    return dist.sample(stream, count)


def optimal_reserve(dist: Distribution) -> OptimalReserve:
    return dist.optimal_reserve()


def quantile_grid(lo: float = 1e-6, hi: float = 1.0, size: int = 10_000) -> np.ndarray:
    """Geometric grid in quantile space; heavy tails concentrate revenue at small q."""
    return np.geomspace(lo, hi, size)


def numeric_optimal_reserve(dist: Distribution, grid_size: int = 10_000) -> OptimalReserve:
    """Grid argmax of R(q) refined by golden-section to relative tolerance 1e-9.

    Independent of the analytic per-family formulas; used to cross-check them.
    """
    qs = quantile_grid(size=grid_size)
    rs = qs * dist.quantile_array(qs)
    i = int(np.argmax(rs))
    lo = qs[max(i - 1, 0)]
    hi = qs[min(i + 1, len(qs) - 1)]

    def neg_r(q: float) -> float:
        return -q * dist.quantile_value(q)

    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c1 = b - invphi * (b - a)
    c2 = a + invphi * (b - a)
    f1, f2 = neg_r(c1), neg_r(c2)
    while (b - a) > 1e-9 * max(abs(a), abs(b)):
        if f1 < f2:
            b, c2, f2 = c2, c1, f1
            c1 = b - invphi * (b - a)
            f1 = neg_r(c1)
        else:
            a, c1, f1 = c1, c2, f2
            c2 = a + invphi * (b - a)
            f2 = neg_r(c2)
    q_star = (a + b) / 2.0
    v_star = dist.quantile_value(q_star)
    return OptimalReserve(v_star=v_star, q_star=q_star, r_star=q_star * v_star, attained=True)


def verify_class(dist: Distribution, grid_size: int = 1000, alpha: Optional[float] = None) -> ClassReport:
    """Grid check of boundedness, hazard monotonicity (MHR), and virtual-value slope.

    Families with atoms skip the density-based checks (mhr/alpha_hat = None).
    """
    if grid_size < 100:
        raise ValueError(f"grid_size must be >= 100, got {grid_size}")
    lo, hi = dist.support
    bounded = math.isfinite(hi) and lo >= 1.0
    if dist.has_atoms:
        return ClassReport(
            bounded=bounded, support_lo=lo, support_hi=hi,
            mhr=None, mhr_violation=None, alpha_hat=None, alpha_strong=None,
        )

    # Evaluate on a quantile grid so 1 - F(v(q)) = q exactly for continuous F.
    qs = quantile_grid(size=grid_size)[::-1]  # descending q => ascending v
    vs = dist.quantile_array(qs)
    keep = np.isfinite(vs)
    qs, vs = qs[keep], vs[keep]
    dens = dist.pdf_array(vs)

    hazard = dens / qs
    rel = 1e-9 * np.maximum(np.abs(hazard[:-1]), np.abs(hazard[1:]))
    drops = hazard[1:] < hazard[:-1] - rel
    mhr = not bool(drops.any())
    mhr_violation = float(vs[1:][drops][0]) if not mhr else None

    virtual = vs - qs / dens
    dv = np.diff(vs)
    ok = dv > 0
    slopes = np.diff(virtual)[ok] / dv[ok]
    alpha_hat = float(np.min(slopes)) if slopes.size else math.nan
    alpha_strong = None if alpha is None else bool(alpha_hat >= alpha - 1e-6)
    return ClassReport(
        bounded=bounded, support_lo=lo, support_hi=hi,
        mhr=mhr, mhr_violation=mhr_violation, alpha_hat=alpha_hat, alpha_strong=alpha_strong,
    )


# -- string grammar ----------------------------------------------------------

_FAMILIES = {
    "two-point": (TwoPoint, ("D",)),
    "uniform": (BoundedUniform, ("lo", "hi")),
    "exp": (Exponential, ("rate",)),
    "equal-revenue": (EqualRevenue, ()),
    "triangular": (Triangular, ()),
    "alpha-pareto": (AlphaStrongPareto, ("alpha",)),
}


def _fmt(x: float) -> str:
    return format(x, ".17g").rstrip("0").rstrip(".") if "." in format(x, ".17g") else format(x, ".17g")


def parse_distribution(text: str) -> Distribution:
    """Parse the canonical grammar, e.g. 'two-point:D=2' or 'uniform:lo=1,hi=2'."""
    name, _, argpart = text.strip().partition(":")
    if name not in _FAMILIES:
        raise ValueError(f"unknown distribution family {name!r}; known: {sorted(_FAMILIES)}")
    cls, fields = _FAMILIES[name]
    kwargs = {}
    if argpart:
        for item in argpart.split(","):
            key, sep, val = item.partition("=")
            if not sep:
                raise ValueError(f"malformed parameter {item!r} in {text!r}")
            key = key.strip()
            if key not in fields:
                raise ValueError(f"unknown parameter {key!r} for family {name!r}")
            kwargs[key] = float(val)
    missing = [f for f in fields if f not in kwargs]
    if missing:
        raise ValueError(f"family {name!r} requires parameters {missing}")
    return cls(**kwargs)
