"""Deterministic random-stream derivation.

Streams are counter-based (Philox) and keyed by tuples of integers through
``numpy.random.SeedSequence``, so replication r of a job depends only on
(master seed, r), never on scheduling or worker count.
"""

from __future__ import annotations

import numpy as np

RandomStream = np.random.Generator


def stream_for(seed: int, *path: int) -> RandomStream:
    """Stream keyed by a master seed and an integer derivation path."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence((int(seed),) + tuple(int(p) for p in path))))


def derive_seed(seed: int, *path: int) -> int:
    """A 64-bit sub-seed for (seed, path), usable as a new master seed."""
    ss = np.random.SeedSequence((int(seed),) + tuple(int(p) for p in path))
    return int(ss.generate_state(1, np.uint64)[0])
