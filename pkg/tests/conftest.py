import numpy as np
import pytest

from iamsim.distributions import (
    AlphaStrongPareto,
    BoundedUniform,
    Distribution,
    EqualRevenue,
    Exponential,
    Triangular,
    TwoPoint,
)

ALL_FAMILIES = [
    TwoPoint(2.0),
    BoundedUniform(1.0, 2.0),
    Exponential(1.0),
    EqualRevenue(),
    Triangular(),
    AlphaStrongPareto(0.5),
]


class FixedStream:
    """Duck-typed stream feeding predetermined uniform variates."""

    def __init__(self, values):
        self._values = list(values)

    def random(self, count):
        out = np.asarray(self._values[:count], dtype=np.float64)
        self._values = self._values[count:]
        return out


class FixedValues(Distribution):
    """Test double: sample() returns a preset vector, ignoring the stream."""

    def __init__(self, values):
        object.__setattr__(self, "_values", np.asarray(values, dtype=np.float64))

    def spec_string(self):
        return "fixed"

    def sample(self, stream, count):
        assert count == self._values.size
        return self._values.copy()

    def __reduce__(self):
        return (FixedValues, (self._values.tolist(),))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_sorted_values(rng, n, kind):
    """Value vectors with controlled tie density, sorted non-increasingly."""
    if kind == 0:
        w = rng.choice([1.0, 2.0], size=n)
    elif kind == 1:
        w = rng.choice([1.0, 4.0], size=n)
    elif kind == 2:
        w = np.round(rng.uniform(0.1, 5.0, size=n), 1)
    else:
        w = rng.exponential(1.0, size=n) + 0.01
    return np.sort(w)[::-1].copy()
