"""Guarded empirical revenue maximization and incentive-awareness measures.

Core surface: distribution families (``distributions``), the guarded price
rule (``erm``), exact best-response manipulation (``bestresponse``), Monte
Carlo estimators (``montecarlo``), the auction applications (``auctions``),
and a batch CLI (``cli``). ``kernels.BACKEND`` names the active kernel
implementation (compiled or numpy).
"""

from .bestresponse import (
    ManipulationResult,
    incentive_awareness,
    min_manipulated_price,
    min_manipulated_price_bruteforce,
    worst_case_delta,
)
from .distributions import (
    AlphaStrongPareto,
    BoundedUniform,
    Distribution,
    EqualRevenue,
    Exponential,
    OptimalReserve,
    Triangular,
    TwoPoint,
    parse_distribution,
)
from .erm import ErmOutcome, SampleVector, erm_with_sentinels, guarded_erm, small_index_event
from .kernels import BACKEND
from .montecarlo import (
    CSchedule,
    EstimateReport,
    estimate_delta_worst,
    estimate_event_prob,
    sweep,
)

__all__ = [
    "AlphaStrongPareto",
    "BACKEND",
    "BoundedUniform",
    "CSchedule",
    "Distribution",
    "EqualRevenue",
    "ErmOutcome",
    "EstimateReport",
    "Exponential",
    "ManipulationResult",
    "OptimalReserve",
    "SampleVector",
    "Triangular",
    "TwoPoint",
    "erm_with_sentinels",
    "estimate_delta_worst",
    "estimate_event_prob",
    "guarded_erm",
    "incentive_awareness",
    "min_manipulated_price",
    "min_manipulated_price_bruteforce",
    "parse_distribution",
    "small_index_event",
    "sweep",
    "worst_case_delta",
]

__version__ = "0.1.0"
