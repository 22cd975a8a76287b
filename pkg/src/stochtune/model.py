"""Model container: cost/time characteristics plus derived expectations.

A :class:`TuningModel` couples a validated absorbing chain with the
per-state economics of one of two time versions:

* continuous time -- a semi-Markov process parameterized by mean sojourn
  times ``tau``, mean incomes ``c`` per stay, reinsertion costs ``d0`` /
  ``d1`` and mean reinsertion durations ``mu0`` / ``mu1``;
* discrete time -- a unit-step chain where only incomes ``c`` and costs
  ``d0`` / ``d1`` remain (every stay and every control transfer takes
  exactly one step).

Only means enter any downstream formula, so means are all the model
stores.  The derived quantities (fundamental matrix, absorption split,
expected time and reward to absorption, stability verdict) are computed
once at construction and cached immutably.
"""

import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .chain import (
    ROW_SUM_TOL,
    absorption_probabilities,
    check_stability,
    fundamental_matrix,
)
from .errors import DimensionMismatch


class TimeModel(Enum):
    CONTINUOUS = "continuous"
    DISCRETE = "discrete"


def _as_vector(raw, name):
    arr = np.asarray(raw, dtype=np.float64)
    if arr.ndim != 1:
        raise DimensionMismatch(f"{name} must be a 1-d vector, got ndim {arr.ndim}")
    out = arr.copy()
    out.setflags(write=False)
    return out


def _check_cost_signs(vectors, strict):
    """Reinsertion entries are costs and should not be positive; enforce
    or warn depending on ``strict``."""
    for name, vec in vectors:
        if np.any(vec > 0.0):
            k = int(np.nonzero(vec > 0.0)[0][0])
            msg = f"{name}[{k}] = {vec[k]} is positive; control transfers are costs"
            if strict:
                raise ValueError(msg)
            warnings.warn(msg, stacklevel=3)


@dataclass(frozen=True)
class ContinuousParameters:
    """Per-state characteristics of the continuous-time version."""

    tau: np.ndarray
    c: np.ndarray
    d0: np.ndarray
    d1: np.ndarray
    mu0: np.ndarray
    mu1: np.ndarray

    def __post_init__(self):
        for name in ("tau", "c", "d0", "d1", "mu0", "mu1"):
            object.__setattr__(self, name, _as_vector(getattr(self, name), name))
        n = self.tau.shape[0]
        for name in ("c", "d0", "d1", "mu0", "mu1"):
            if getattr(self, name).shape[0] != n:
                raise DimensionMismatch(f"{name} must have length {n}")
        if np.any(self.tau <= 0.0):
            raise ValueError("tau entries must be strictly positive")
        if np.any(self.mu0 < 0.0) or np.any(self.mu1 < 0.0):
            raise ValueError("mu0/mu1 entries must be nonnegative")


@dataclass(frozen=True)
class DiscreteParameters:
    """Per-state characteristics of the discrete-time version."""

    c: np.ndarray
    d0: np.ndarray
    d1: np.ndarray

    def __post_init__(self):
        for name in ("c", "d0", "d1"):
            object.__setattr__(self, name, _as_vector(getattr(self, name), name))
        n = self.c.shape[0]
        for name in ("d0", "d1"):
            if getattr(self, name).shape[0] != n:
                raise DimensionMismatch(f"{name} must have length {n}")


def expected_time_to_absorption(fundamental, tau):
    """Expected time to absorption per start state: ``m_i = sum_j M[i,j] tau_j``."""
    tau = np.asarray(tau, dtype=np.float64)
    if tau.shape != (fundamental.n_internal,):
        raise DimensionMismatch(
            f"tau must have length {fundamental.n_internal}, got {tau.shape}"
        )
    return fundamental.m @ tau


def expected_time_discrete(fundamental):
    """Expected steps to absorption: row sums of the fundamental matrix.

    Computed as the matrix-vector product with the all-ones vector so it
    coincides exactly with :func:`expected_time_to_absorption` at unit
    sojourn times.
    """
    return fundamental.m @ np.ones(fundamental.n_internal)


def expected_reward_to_absorption(fundamental, c):
    """Expected accumulated income to absorption: ``r_i = sum_j M[i,j] c_j``."""
    c = np.asarray(c, dtype=np.float64)
    if c.shape != (fundamental.n_internal,):
        raise DimensionMismatch(
            f"c must have length {fundamental.n_internal}, got {c.shape}"
        )
    return fundamental.m @ c


class TuningModel:
    """Chain plus economics, with all derived quantities precomputed.

    Parameters
    ----------
    chain : BlockTransitionMatrix
        Validated transition blocks.
    params : ContinuousParameters or DiscreteParameters
        Per-state characteristics; the time version is inferred from the
        parameter type.
    strict_cost_signs : bool
        When true (default) a positive reinsertion cost entry is an
        error; when false it only warns.
    name : str or None
        Optional display name carried through to reports.
    """

    def __init__(self, chain, params, strict_cost_signs=True, name=None):
        if isinstance(params, ContinuousParameters):
            time_model = TimeModel.CONTINUOUS
        elif isinstance(params, DiscreteParameters):
            time_model = TimeModel.DISCRETE
        else:
            raise TypeError(
                "params must be ContinuousParameters or DiscreteParameters"
            )
        n = chain.n_internal
        if params.c.shape[0] != n:
            raise DimensionMismatch(
                f"parameter vectors have length {params.c.shape[0]}, "
                f"chain has {n} internal states"
            )
        _check_cost_signs([("d0", params.d0), ("d1", params.d1)], strict_cost_signs)

        self.chain = chain
        self.params = params
        self.time_model = time_model
        self.strict_cost_signs = bool(strict_cost_signs)
        self.name = name

        self.fundamental = fundamental_matrix(chain)
        self.absorption = absorption_probabilities(chain, self.fundamental)
        # keep a single representation of the second column: it must agree
        # with 1 - first column within the row-sum tolerance
        drift = np.abs(
            self.absorption.b[:, 1] - (1.0 - self.absorption.b[:, 0])
        ).max()
        if drift > ROW_SUM_TOL:
            raise DimensionMismatch(
                f"absorption columns disagree with their complement by {drift:.3e}"
            )
        if time_model is TimeModel.CONTINUOUS:
            self.time_to_absorption = expected_time_to_absorption(
                self.fundamental, params.tau
            )
        else:
            self.time_to_absorption = expected_time_discrete(self.fundamental)
        self.reward_to_absorption = expected_reward_to_absorption(
            self.fundamental, params.c
        )
        self.time_to_absorption.setflags(write=False)
        self.reward_to_absorption.setflags(write=False)
        self.stability = check_stability(self.absorption)

    @property
    def n_internal(self):
        return self.chain.n_internal

    @property
    def is_continuous(self):
        return self.time_model is TimeModel.CONTINUOUS

    def __repr__(self):
        return (
            f"TuningModel(n_internal={self.n_internal}, "
            f"time_model={self.time_model.value!r}, "
            f"stable={self.stability.stable})"
        )
