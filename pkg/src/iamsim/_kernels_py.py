"""Numpy implementations of the hot kernels.

Same contracts (and identical float64 arithmetic) as the compiled versions in
``_kernels.pyx``; ``iamsim.kernels`` picks whichever is available.

Conventions: value arrays are float64 and sorted non-increasingly; indices
into the conceptual full vector are 1-based; ``i0`` is the first eligible
index (resolved by the caller from the guard level via exact arithmetic);
ties in i*v_i resolve to the larger i.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def erm_scan(values: np.ndarray, i0: int, offset: int) -> tuple[int, float]:
    """Winning index and price over finite entries below ``offset`` sentinels.

    ``values`` holds the finite entries; entry t (0-based) sits at full-vector
    index t + 1 + offset. Caller guarantees no sentinel is eligible.
    """
    n = values.shape[0]
    total = n + offset
    start = max(i0, offset + 1)
    idx = np.arange(start, total + 1, dtype=np.float64)
    prods = idx * values[start - offset - 1 :]
    j = prods.shape[0] - 1 - int(np.argmax(prods[::-1]))
    k = start + j
    return k, float(values[k - offset - 1])


def _prefix_best(prods: np.ndarray, eligible: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Running (max product, 0-based argmax) preferring the LATER position on ties."""
    masked = np.where(eligible, prods, -1.0)
    run = np.maximum.accumulate(masked)
    pos = np.arange(masked.shape[0])
    arg = np.maximum.accumulate(np.where(masked >= run, pos, -1))
    return run, arg


def _suffix_best(prods: np.ndarray, eligible: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Reverse running (max product, 0-based argmax) preferring the EARLIER
    position on ties, i.e. the larger original index."""
    masked = np.where(eligible, prods, -1.0)[::-1]
    run = np.maximum.accumulate(masked)
    imp = np.empty(masked.shape[0], dtype=bool)
    imp[0] = masked[0] > -0.5
    imp[1:] = run[1:] > run[:-1]
    pos = np.arange(masked.shape[0])
    arg = np.maximum.accumulate(np.where(imp, pos, -1))
    n = masked.shape[0]
    return run[::-1].copy(), np.where(arg[::-1] >= 0, n - 1 - arg[::-1], -1)


def best_response_min(w: np.ndarray, m: int, i0: int) -> tuple[float, float]:
    """Minimum price achievable by inserting m identical bids into ``w``.

    Exact candidate enumeration: {0} | sample values | per-slot thresholds
    M(i)/(i+m) with their ulp neighbours, each evaluated with full tie-break
    semantics via prefix and suffix maxima. Returns (min price, smallest
    achieving bid).
    """
    n = w.shape[0]
    j = np.arange(1, n + 1, dtype=np.float64)

    pre_run, pre_arg = _prefix_best(j * w, np.arange(1, n + 1) >= i0)
    suf_run, suf_arg = _suffix_best((j + m) * w, np.arange(1 + m, n + m + 1) >= i0)

    # non-block tables per slot i = 0..n: prefix uses j <= i, suffix uses j > i
    pre_p = np.concatenate([[-1.0], pre_run])
    suf_p = np.concatenate([suf_run, [-1.0]])
    take_suf = suf_p >= pre_p  # ties to the larger index, always in the suffix
    suf_j0 = np.concatenate([suf_arg, [-1]])
    pre_j0 = np.concatenate([[-1], pre_arg])
    nb_p = np.where(take_suf, suf_p, pre_p)
    arg_j0 = np.where(take_suf, suf_j0, pre_j0)
    has_nb = nb_p >= -0.5
    nb_idx = np.where(take_suf, suf_j0 + 1 + m, pre_j0 + 1)
    nb_val = np.where(arg_j0 >= 0, w[np.maximum(arg_j0, 0)], 0.0)

    slots_all = np.arange(n + 1)
    block_idx_all = slots_all + m
    block_ok_all = block_idx_all >= i0
    with np.errstate(invalid="ignore"):
        thr = nb_p / block_idx_all
    thr = thr[block_ok_all & has_nb & (nb_p > 0)]
    # (i+m)*(M/(i+m)) may round past M either way; the minimal winning double
    # is within one ulp of the quotient, so evaluate both neighbours too
    thr = np.concatenate([thr, np.nextafter(thr, np.inf), np.nextafter(thr, 0.0)])

    cands = np.unique(np.concatenate([np.zeros(1), w, thr]))
    slots = np.searchsorted(-w, -cands, side="left")

    bi = slots + m
    bp = bi.astype(np.float64) * cands
    cp = nb_p[slots]
    block_ok = bi >= i0
    block_wins = block_ok & ((~has_nb[slots]) | (bp > cp) | ((bp == cp) & (bi > nb_idx[slots])))
    prices = np.where(block_wins, cands, nb_val[slots])

    best = int(np.argmin(prices))
    return float(prices[best]), float(cands[best])
