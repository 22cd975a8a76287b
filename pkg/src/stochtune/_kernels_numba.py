"""Numba-compiled simulation loops.

Scalar per-trajectory walks; one SplitMix64 stream per cycle or run
keeps every trajectory a pure function of ``(seed, stream index)``.
Signatures and draw consumption mirror ``_kernels_numpy`` exactly.

All kernels return a status: -1 on success, else the first cycle/run
index whose walk exceeded the step cap (the caller raises).
"""

import numpy as np
from numba import njit

from . import _rng

BACKEND_NAME = "numba"

_GOLDEN = _rng.GOLDEN_GAMMA
_SHIFT = _rng.SHIFT_TO_53
_UNIT = _rng.UNIT_SCALE

_mix64 = njit(cache=True)(_rng.mix64)


def apply_thread_cap(cap):
    """Forward a positive thread cap to numba, clamped to what exists."""
    import numba

    numba.set_num_threads(max(1, min(int(cap), numba.config.NUMBA_NUM_THREADS)))


@njit(cache=True)
def _stream_origin(seed, index):
    return _mix64(seed + np.uint64(index + 1) * _GOLDEN)


@njit(cache=True)
def _next_uniform(state):
    state = state + _GOLDEN
    word = _mix64(state)
    return state, (word >> _SHIFT) * _UNIT


@njit(cache=True)
def _pick(cdf, u):
    # first index whose cumulative weight exceeds u; cdf[-1] == 1.0 > u
    i = 0
    while u >= cdf[i]:
        i += 1
    return i


@njit(cache=True)
def simulate_cycles(
    trans_cdf,
    alpha0_cdf,
    alpha1_cdf,
    entry_reward0,
    entry_reward1,
    entry_time0,
    entry_time1,
    income,
    hold_mean,
    exponential_holding,
    seed,
    n_cycles,
    max_steps,
):
    """Per-cycle accrued reward, duration, and visit count.

    One cycle: re-enter from the current boundary (entry state drawn via
    the matching reinsertion cdf), accrue the entry cost and entry time,
    then walk the embedded chain accruing income and holding time per
    visit until absorption sets the next boundary.  The very first cycle
    starts at boundary 0.
    """
    n = income.shape[0]
    reward = np.zeros(n_cycles, np.float64)
    duration = np.zeros(n_cycles, np.float64)
    visits = np.zeros(n_cycles, np.int64)
    boundary = 0
    for c in range(n_cycles):
        state64 = _stream_origin(seed, c)
        state64, u = _next_uniform(state64)
        if boundary == 0:
            j = _pick(alpha0_cdf, u)
            acc_reward = entry_reward0[j]
            acc_time = entry_time0[j]
        else:
            j = _pick(alpha1_cdf, u)
            acc_reward = entry_reward1[j]
            acc_time = entry_time1[j]
        steps = 0
        while True:
            steps += 1
            if steps > max_steps:
                return reward, duration, visits, np.int64(c)
            acc_reward = acc_reward + income[j]
            if exponential_holding:
                state64, u = _next_uniform(state64)
                acc_time = acc_time + hold_mean[j] * -np.log1p(-u)
            else:
                acc_time = acc_time + hold_mean[j]
            state64, u = _next_uniform(state64)
            nxt = _pick(trans_cdf[j], u)
            if nxt >= n:
                boundary = nxt - n
                break
            j = nxt
        reward[c] = acc_reward
        duration[c] = acc_time
        visits[c] = steps
    return reward, duration, visits, np.int64(-1)


@njit(cache=True)
def run_absorptions(trans_cdf, start, n_runs, seed, max_steps):
    """Count runs from ``start`` absorbed at boundary 0."""
    n = trans_cdf.shape[0]
    n_zero = 0
    for r in range(n_runs):
        state64 = _stream_origin(seed, r)
        j = start
        steps = 0
        while True:
            steps += 1
            if steps > max_steps:
                return np.int64(n_zero), np.int64(r)
            state64, u = _next_uniform(state64)
            nxt = _pick(trans_cdf[j], u)
            if nxt >= n:
                if nxt == n:
                    n_zero += 1
                break
            j = nxt
    return np.int64(n_zero), np.int64(-1)


@njit(cache=True)
def run_visit_totals(trans_cdf, start, n_runs, seed, max_steps):
    """Total visits per internal state over runs from ``start``."""
    n = trans_cdf.shape[0]
    totals = np.zeros(n, np.int64)
    for r in range(n_runs):
        state64 = _stream_origin(seed, r)
        j = start
        steps = 0
        while True:
            steps += 1
            if steps > max_steps:
                return totals, np.int64(r)
            totals[j] += 1
            state64, u = _next_uniform(state64)
            nxt = _pick(trans_cdf[j], u)
            if nxt >= n:
                break
            j = nxt
    return totals, np.int64(-1)
