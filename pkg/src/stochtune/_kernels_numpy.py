"""Pure-numpy simulation kernels (fallback backend).

Lockstep vectorized walks: every trajectory advances one visit per
iteration, absorbed walkers are compacted away, and each walker keeps
its own SplitMix64 stream so draws match the numba backend bit for bit.

Because the boundary a cycle starts from is only known once the previous
cycle has finished, ``simulate_cycles`` walks *both* candidate branches
of every cycle (entry from boundary 0 and from boundary 1, sharing the
cycle's stream) and a cheap sequential stitch afterwards selects the
realized branch per cycle.  The realized branch consumes draws exactly
as the sequential kernel does, so the selected outputs are identical.
"""

import numpy as np

from . import _rng

BACKEND_NAME = "numpy"


def _pick_vec(cdf, u):
    """Vector inverse-cdf pick: first index whose cumulative weight
    exceeds each ``u`` (one shared cdf row)."""
    return (u[:, None] >= cdf[None, :]).sum(axis=1)


def _pick_rows(cdf_rows, states, u):
    """Row-wise inverse-cdf pick against per-walker cdf rows."""
    return (u[:, None] >= cdf_rows[states]).sum(axis=1)


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
    """Per-cycle accrued reward, duration, and visit count; see the
    numba twin for the cycle semantics."""
    n = income.shape[0]
    n_walkers = 2 * n_cycles

    streams = _rng.stream_origins(seed, 0, n_cycles)
    streams, entry_u = _rng.next_uniforms(streams)
    k0 = _pick_vec(alpha0_cdf, entry_u)
    k1 = _pick_vec(alpha1_cdf, entry_u)

    # walker w = 2 * cycle + branch, branch = boundary the cycle would
    # start from; both branches continue the cycle's stream post-entry
    state = np.empty(n_walkers, dtype=np.int64)
    state[0::2] = k0
    state[1::2] = k1
    acc_reward = np.empty(n_walkers)
    acc_reward[0::2] = entry_reward0[k0]
    acc_reward[1::2] = entry_reward1[k1]
    acc_time = np.empty(n_walkers)
    acc_time[0::2] = entry_time0[k0]
    acc_time[1::2] = entry_time1[k1]
    stream = np.repeat(streams, 2)

    out_reward = np.zeros(n_walkers)
    out_time = np.zeros(n_walkers)
    out_visits = np.zeros(n_walkers, dtype=np.int64)
    out_boundary = np.zeros(n_walkers, dtype=np.int64)
    overflow = np.zeros(n_walkers, dtype=bool)

    ids = np.arange(n_walkers, dtype=np.int64)
    t = 0
    while ids.size:
        t += 1
        if t > max_steps:
            overflow[ids] = True
            break
        acc_reward += income[state]
        if exponential_holding:
            stream, u = _rng.next_uniforms(stream)
            acc_time += hold_mean[state] * -np.log1p(-u)
        else:
            acc_time += hold_mean[state]
        stream, u = _rng.next_uniforms(stream)
        nxt = _pick_rows(trans_cdf, state, u)
        done = nxt >= n
        if done.any():
            done_ids = ids[done]
            out_boundary[done_ids] = nxt[done] - n
            out_reward[done_ids] = acc_reward[done]
            out_time[done_ids] = acc_time[done]
            out_visits[done_ids] = t
            keep = ~done
            ids = ids[keep]
            state = nxt[keep]
            stream = stream[keep]
            acc_reward = acc_reward[keep]
            acc_time = acc_time[keep]
        else:
            state = nxt

    # stitch: realized branch per cycle follows the boundary sequence
    reward = np.zeros(n_cycles)
    duration = np.zeros(n_cycles)
    visits = np.zeros(n_cycles, dtype=np.int64)
    boundary = 0
    for c in range(n_cycles):
        w = 2 * c + boundary
        if overflow[w]:
            return reward, duration, visits, np.int64(c)
        reward[c] = out_reward[w]
        duration[c] = out_time[w]
        visits[c] = out_visits[w]
        boundary = int(out_boundary[w])
    return reward, duration, visits, np.int64(-1)


def run_absorptions(trans_cdf, start, n_runs, seed, max_steps):
    """Count runs from ``start`` absorbed at boundary 0."""
    n = trans_cdf.shape[0]
    stream = _rng.stream_origins(seed, 0, n_runs)
    state = np.full(n_runs, start, dtype=np.int64)
    ids = np.arange(n_runs, dtype=np.int64)
    n_zero = 0
    t = 0
    while ids.size:
        t += 1
        if t > max_steps:
            return np.int64(n_zero), np.int64(ids.min())
        stream, u = _rng.next_uniforms(stream)
        nxt = _pick_rows(trans_cdf, state, u)
        done = nxt >= n
        if done.any():
            n_zero += int(np.count_nonzero(nxt[done] == n))
            keep = ~done
            ids = ids[keep]
            state = nxt[keep]
            stream = stream[keep]
        else:
            state = nxt
    return np.int64(n_zero), np.int64(-1)


def run_visit_totals(trans_cdf, start, n_runs, seed, max_steps):
    """Total visits per internal state over runs from ``start``."""
    n = trans_cdf.shape[0]
    stream = _rng.stream_origins(seed, 0, n_runs)
    state = np.full(n_runs, start, dtype=np.int64)
    ids = np.arange(n_runs, dtype=np.int64)
    totals = np.zeros(n, dtype=np.int64)
    t = 0
    while ids.size:
        t += 1
        if t > max_steps:
            return totals, np.int64(ids.min())
        totals += np.bincount(state, minlength=n)
        stream, u = _rng.next_uniforms(stream)
        nxt = _pick_rows(trans_cdf, state, u)
        done = nxt >= n
        if done.any():
            keep = ~done
            ids = ids[keep]
            state = nxt[keep]
            stream = stream[keep]
        else:
            state = nxt
    return totals, np.int64(-1)
