"""Monte Carlo verification of the analytic index and chain quantities.

The simulator replays the controlled process: re-enter from the current
boundary according to the policy, accrue the reinsertion cost and time,
walk the embedded chain accruing income and sojourn time per visit
until absorption, repeat.  Cycles regenerate, so the long-run index is
estimated by the ratio of accumulated reward to accumulated time
(continuous) or the mean per-cycle reward (discrete), with standard
errors from batch means over 30 equal batches of cycles.

Per-visit income is accrued at its mean: every analytic formula consumes
means only, so deterministic accrual tightens the check without moving
the limit.  Sojourn times are either the means themselves or exponential
draws with those means; the limit does not depend on the choice, which
is itself a property worth checking.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import _rng, backends
from .errors import DimensionMismatch, NonconvergentCycle
from .functional import _as_distribution, _require_stable
from .model import TimeModel

#: batch count for batch-means standard errors
N_BATCHES = 30
#: default per-cycle embedded-step cap
DEFAULT_MAX_STEPS = 10_000_000


class HoldingTimeLaw(Enum):
    DETERMINISTIC_MEAN = "det"
    EXPONENTIAL_MEAN = "exp"


@dataclass(frozen=True)
class SimulationConfig:
    """How many regeneration cycles to run and how.

    ``holding_time_law`` only matters for continuous-time models; the
    step cap guards against numerically non-absorbing chains.
    """

    n_cycles: int
    seed: int
    holding_time_law: HoldingTimeLaw = HoldingTimeLaw.DETERMINISTIC_MEAN
    max_steps_per_cycle: int = DEFAULT_MAX_STEPS

    def __post_init__(self):
        if self.n_cycles < 1:
            raise ValueError("n_cycles must be at least 1")
        if self.max_steps_per_cycle < 1:
            raise ValueError("max_steps_per_cycle must be at least 1")


@dataclass(frozen=True)
class SimulationEstimate:
    """Point estimate with batch-means standard error.

    ``total_time`` is accrued model time for continuous models and the
    cycle count for discrete ones.  ``insufficient_batches`` flags runs
    with fewer cycles than batches, where the standard error is reported
    as 0.  For discrete models ``reward_per_step`` additionally reports
    reward per unit of model time, counting one unit per embedded visit
    and one per control transfer.
    """

    point_estimate: float
    standard_error: float
    n_cycles: int
    total_reward: float
    total_time: float
    insufficient_batches: bool = False
    reward_per_step: float | None = None


def transition_cdf(chain):
    """Per-state cumulative transition weights over the outcomes
    ``internal 0..n-1, boundary 0, boundary 1``.

    The last cumulative entry is pinned to 1.0 so a uniform in [0, 1)
    always lands; this shifts at most the row-sum tolerance onto the
    final outcome.
    """
    rows = np.hstack([chain.p00, chain.p01])
    cdf = np.cumsum(rows, axis=1)
    cdf[:, -1] = 1.0
    return np.ascontiguousarray(cdf)


def _distribution_cdf(vec):
    cdf = np.cumsum(vec)
    cdf[-1] = 1.0
    return np.ascontiguousarray(cdf)


def _batch_bounds(n_cycles):
    return [n_cycles * b // N_BATCHES for b in range(N_BATCHES + 1)]


def _batch_standard_error(values, weights):
    """Batch-means standard error of the ratio sum(values)/sum(weights)."""
    bounds = _batch_bounds(values.shape[0])
    ratios = np.empty(N_BATCHES)
    for b in range(N_BATCHES):
        lo, hi = bounds[b], bounds[b + 1]
        ratios[b] = values[lo:hi].sum() / weights[lo:hi].sum()
    return float(ratios.std(ddof=1) / np.sqrt(N_BATCHES))


def simulate_index(model, policy, config, allow_unstable=False, backend=None):
    """Estimate the stationary index by renewal-reward averaging.

    The first cycle starts at boundary 0; under stability the boundary
    chain is irreducible, so the long-run estimate does not depend on
    that choice.  Identical ``(model, policy, config)`` always produce
    bit-identical estimates.
    """
    _require_stable(model, allow_unstable)
    n = model.n_internal
    alpha0 = _as_distribution(policy.alpha0, "alpha0", size=n)
    alpha1 = _as_distribution(policy.alpha1, "alpha1", size=n)
    kernels = backends.get_backend(backend)

    params = model.params
    continuous = model.time_model is TimeModel.CONTINUOUS
    if continuous:
        entry_time0 = params.mu0
        entry_time1 = params.mu1
        hold_mean = params.tau
        exponential = config.holding_time_law is HoldingTimeLaw.EXPONENTIAL_MEAN
    else:
        entry_time0 = np.zeros(n)
        entry_time1 = np.zeros(n)
        hold_mean = np.ones(n)
        exponential = False

    reward, duration, visits, status = kernels.simulate_cycles(
        transition_cdf(model.chain),
        _distribution_cdf(alpha0),
        _distribution_cdf(alpha1),
        params.d0,
        params.d1,
        entry_time0,
        entry_time1,
        params.c,
        hold_mean,
        exponential,
        _rng.seed_to_uint64(config.seed),
        config.n_cycles,
        config.max_steps_per_cycle,
    )
    if status >= 0:
        raise NonconvergentCycle(int(status), config.max_steps_per_cycle)

    total_reward = float(reward.sum())
    insufficient = config.n_cycles < N_BATCHES
    if continuous:
        total_time = float(duration.sum())
        point = total_reward / total_time
        weights = duration
        per_step = None
    else:
        total_time = float(config.n_cycles)
        point = total_reward / config.n_cycles
        weights = np.ones(config.n_cycles)
        per_step = total_reward / (float(visits.sum()) + config.n_cycles)
    se = 0.0 if insufficient else _batch_standard_error(reward, weights)
    return SimulationEstimate(
        point_estimate=float(point),
        standard_error=se,
        n_cycles=config.n_cycles,
        total_reward=total_reward,
        total_time=total_time,
        insufficient_batches=insufficient,
        reward_per_step=per_step,
    )


def estimate_absorption(
    chain, start, n_runs, seed, max_steps=DEFAULT_MAX_STEPS, backend=None
):
    """Empirical absorption split from ``start`` over independent runs.

    Returns ``(b0, b1)`` with ``b1 = 1 - b0`` so the pair sums to one
    exactly.
    """
    if not 0 <= start < chain.n_internal:
        raise DimensionMismatch(
            f"start state {start} outside 0..{chain.n_internal - 1}"
        )
    if n_runs < 1:
        raise ValueError("n_runs must be at least 1")
    kernels = backends.get_backend(backend)
    n_zero, status = kernels.run_absorptions(
        transition_cdf(chain), start, n_runs, _rng.seed_to_uint64(seed), max_steps
    )
    if status >= 0:
        raise NonconvergentCycle(int(status), max_steps)
    b0 = float(n_zero) / n_runs
    return b0, 1.0 - b0


def estimate_visits(
    chain, start, n_runs, seed, max_steps=DEFAULT_MAX_STEPS, backend=None
):
    """Empirical mean visit counts per internal state from ``start``;
    compares against the matching fundamental-matrix row."""
    if not 0 <= start < chain.n_internal:
        raise DimensionMismatch(
            f"start state {start} outside 0..{chain.n_internal - 1}"
        )
    if n_runs < 1:
        raise ValueError("n_runs must be at least 1")
    kernels = backends.get_backend(backend)
    totals, status = kernels.run_visit_totals(
        transition_cdf(chain), start, n_runs, _rng.seed_to_uint64(seed), max_steps
    )
    if status >= 0:
        raise NonconvergentCycle(int(status), max_steps)
    return totals.astype(np.float64) / n_runs
