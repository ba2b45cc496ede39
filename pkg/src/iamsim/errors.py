"""Error vocabulary shared by all modules.

Each class corresponds to one contract violation; the CLI reports the class
name on failure, so names are part of the interface.
"""


class IamsimError(Exception):
    """Base class for all library errors."""


class UnboundedQuantile(IamsimError):
    """quantile_value(0) requested for a family with unbounded support."""


class SentinelEligible(IamsimError):
    """A sentinel-top entry fell inside the ERM eligibility range (c*N < sentinels)."""


class PreconditionC(IamsimError):
    """An operation requiring c >= m/N was called with c < m/N."""


class PreconditionM(IamsimError):
    """Manipulation size m is incompatible with the guard level for worst-case use."""


class DegeneratePrice(IamsimError):
    """Baseline price is zero, so the relative price drop is undefined."""


class ReversedPrices(IamsimError):
    """A price pair (p2, p1) with p2 > p1 was passed where p2 <= p1 is required."""


class NoAttainedReserve(IamsimError):
    """The distribution has no attained optimal reserve (constant or open-supremum revenue curve)."""


class UsageError(IamsimError):
    """Malformed CLI input; message names the offending flag."""
