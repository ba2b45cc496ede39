# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled versions of the hot kernels.

Must stay bit-for-bit interchangeable with ``_kernels_py``: identical float64
products, identical tie handling (i*v_i ties resolve to the larger index).
"""

import numpy as np

from libc.math cimport floor

BACKEND = "cython"


def first_eligible_index(double cn):
    """Smallest integer i with i > cn."""
    return <long>floor(cn) + 1


def erm_scan(double[::1] values, double cn, long offset):
    cdef long n = values.shape[0]
    cdef long total = n + offset
    cdef long i0 = <long>floor(cn) + 1
    cdef long start = i0 if i0 > offset + 1 else offset + 1
    cdef long i, k = start
    cdef double p, best = -1.0
    for i in range(start, total + 1):
        p = (<double>i) * values[i - offset - 1]
        if p >= best:
            best = p
            k = i
    return k, values[k - offset - 1]


def best_response_min(double[::1] w, long m, double cn):
    cdef long n = w.shape[0]
    cdef long i0 = <long>floor(cn) + 1
    cdef long i

    # per-slot non-block tables, i = 0..n
    nb_p_arr = np.empty(n + 1)
    nb_idx_arr = np.empty(n + 1, dtype=np.int64)
    nb_val_arr = np.empty(n + 1)
    cdef double[::1] nb_p = nb_p_arr
    cdef long[::1] nb_idx = nb_idx_arr
    cdef double[::1] nb_val = nb_val_arr

    # suffix sweep: at slot i the suffix holds samples j = i+1..n at merged
    # index j+m; ties keep the larger index (seen earlier in this scan)
    cdef double best = -1.0
    cdef long bidx = -1
    cdef double bval = 0.0
    cdef double p
    for i in range(n, -1, -1):
        nb_p[i] = best
        nb_idx[i] = bidx
        nb_val[i] = bval
        if i >= 1 and i + m >= i0:
            p = (<double>(i + m)) * w[i - 1]
            if p > best:
                best = p
                bidx = i + m
                bval = w[i - 1]

    # prefix sweep: samples j = 1..i at merged index j; ties take the later
    # index; on prefix/suffix ties the suffix index is larger, so suffix wins
    cdef double pre_best = -1.0
    cdef long pre_idx = -1
    cdef double pre_val = 0.0
    for i in range(0, n + 1):
        if i >= 1 and i >= i0:
            p = (<double>i) * w[i - 1]
            if p >= pre_best:
                pre_best = p
                pre_idx = i
                pre_val = w[i - 1]
        if pre_best > nb_p[i]:
            nb_p[i] = pre_best
            nb_idx[i] = pre_idx
            nb_val[i] = pre_val

    # candidate bids: 0, sample values, per-slot thresholds M(i)/(i+m);
    # (i+m)*(M/(i+m)) may round past M either way, so the minimal winning
    # double is within one ulp of the quotient: evaluate both neighbours too
    thr_list = []
    for i in range(0, n + 1):
        if i + m >= i0 and nb_p[i] > 0.0:
            thr_list.append(nb_p[i] / (<double>(i + m)))
    thr_arr = np.asarray(thr_list)
    thr_arr = np.concatenate([thr_arr, np.nextafter(thr_arr, np.inf), np.nextafter(thr_arr, 0.0)])
    cands_arr = np.unique(np.concatenate([np.zeros(1), np.asarray(w), thr_arr]))
    slots_arr = np.searchsorted(-np.asarray(w), -cands_arr, side="left").astype(np.int64)
    cdef double[::1] cands = cands_arr
    cdef long[::1] slots = slots_arr

    cdef long t, si, bi
    cdef double b, bp, price
    cdef double min_price = -1.0
    cdef double best_bid = 0.0
    cdef bint block_wins
    for t in range(cands_arr.shape[0]):
        b = cands[t]
        si = slots[t]
        bi = si + m
        block_wins = False
        if bi >= i0:
            bp = (<double>bi) * b
            if nb_p[si] < -0.5:
                block_wins = True
            elif bp > nb_p[si]:
                block_wins = True
            elif bp == nb_p[si] and bi > nb_idx[si]:
                block_wins = True
        price = b if block_wins else nb_val[si]
        if min_price < -0.5 or price < min_price:
            min_price = price
            best_bid = b
    return min_price, best_bid
