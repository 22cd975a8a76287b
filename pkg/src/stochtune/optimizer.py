"""Exhaustive optimization of the test function over the action grid.

The index attains its extremum over all policy pairs at a degenerate
(deterministic) policy, so the search reduces exactly to scanning the
finite grid of the test function.  Ties within a relative tolerance are
broken lexicographically to keep results reproducible bit for bit.
A seeded audit samples random interior policies and confirms none beats
the scanned optimum.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import functional
from .chain import state_label
from .errors import EmptyActionSet
from .functional import ControlPolicy, evaluate_index

#: relative tie tolerance on test-function values
TIE_TOLERANCE = 1e-12
#: absolute slack allowed when auditing sampled policies against the optimum
AUDIT_TOLERANCE = 1e-12


class Sense(Enum):
    MAXIMIZE = "max"
    MINIMIZE = "min"


@dataclass(frozen=True)
class OptimizationResult:
    """Optimal deterministic control found by the grid scan.

    ``best_point`` uses internal 0-based indices; ``best_labels`` carries
    the original-chain labels (index + 2) when the grid is a model action
    grid, else None.  ``ties`` lists every grid point within the tie
    tolerance of the optimum, lexicographically sorted, so
    ``best_point == ties[0]``.
    """

    sense: Sense
    best_point: tuple
    best_labels: tuple | None
    best_value: float
    policy: ControlPolicy | None
    ties: tuple

    def to_dict(self):
        return {
            "sense": self.sense.value,
            "best_point": list(self.best_point),
            "best_labels": None if self.best_labels is None else list(self.best_labels),
            "best_value": self.best_value,
            "ties": [list(t) for t in self.ties],
        }


@dataclass(frozen=True)
class AuditReport:
    """Outcome of sampling random policies against the scanned optimum."""

    n_samples: int
    best_maximum: float
    best_minimum: float
    sampled_maximum: float
    sampled_minimum: float
    n_above_maximum: int
    n_below_minimum: int
    tolerance: float


def optimize_lfif(coeffs, sense=Sense.MAXIMIZE):
    """Scan ``a[point] / b[point]`` over the whole product grid.

    Returns the grid optimum for the requested sense with lexicographic
    tie-breaking; ``policy`` is filled for 2-factor grids (degenerate at
    the best point) and ``best_labels`` is left None.
    """
    sense = Sense(sense)
    ratio = coeffs.a / coeffs.b
    if ratio.size == 0:
        raise EmptyActionSet("coefficient grid is empty")
    if sense is Sense.MAXIMIZE:
        extreme = float(ratio.max())
        tol = TIE_TOLERANCE * max(1.0, abs(extreme))
        tied = np.argwhere(ratio >= extreme - tol)
    else:
        extreme = float(ratio.min())
        tol = TIE_TOLERANCE * max(1.0, abs(extreme))
        tied = np.argwhere(ratio <= extreme + tol)
    ties = tuple(tuple(int(k) for k in row) for row in tied)
    best_point = ties[0]
    policy = None
    if coeffs.n_factors == 2:
        n0, n1 = coeffs.factor_sizes
        a0 = np.zeros(n0)
        a0[best_point[0]] = 1.0
        a1 = np.zeros(n1)
        a1[best_point[1]] = 1.0
        policy = ControlPolicy(alpha0=a0, alpha1=a1)
    return OptimizationResult(
        sense=sense,
        best_point=best_point,
        best_labels=None,
        best_value=float(ratio[best_point]),
        policy=policy,
        ties=ties,
    )


def optimize(model, sense=Sense.MAXIMIZE, allow_unstable=False):
    """Optimal deterministic policy of a model, via the coefficient grid."""
    if model.n_internal < 1:
        raise EmptyActionSet("model has no internal states")
    coeffs = functional.coefficients(model, allow_unstable=allow_unstable)
    result = optimize_lfif(coeffs, sense)
    labels = tuple(state_label(k) for k in result.best_point)
    return OptimizationResult(
        sense=result.sense,
        best_point=result.best_point,
        best_labels=labels,
        best_value=result.best_value,
        policy=result.policy,
        ties=result.ties,
    )


def sample_simplex(rng, size):
    """Uniform point on the probability simplex via normalized
    exponential spacings."""
    u = rng.random(size)
    spacings = -np.log1p(-u)
    return spacings / spacings.sum()


def dominance_audit(model, n_samples, seed, allow_unstable=False):
    """Sample random policies and count violations of the scanned optima.

    Each policy draws both reinsertion distributions uniformly from the
    simplex.  The counts of samples above the optimized maximum or below
    the optimized minimum (beyond ``AUDIT_TOLERANCE``) must be zero.
    """
    if n_samples < 0:
        raise ValueError("n_samples must be nonnegative")
    best_max = optimize(model, Sense.MAXIMIZE, allow_unstable=allow_unstable)
    best_min = optimize(model, Sense.MINIMIZE, allow_unstable=allow_unstable)
    rng = np.random.default_rng(seed)
    n = model.n_internal
    values = np.empty(n_samples)
    for i in range(n_samples):
        policy = ControlPolicy(
            alpha0=sample_simplex(rng, n), alpha1=sample_simplex(rng, n)
        )
        values[i] = evaluate_index(model, policy, allow_unstable=allow_unstable).value
    if n_samples:
        sampled_max = float(values.max())
        sampled_min = float(values.min())
        above = int(np.count_nonzero(values > best_max.best_value + AUDIT_TOLERANCE))
        below = int(np.count_nonzero(values < best_min.best_value - AUDIT_TOLERANCE))
    else:
        sampled_max = float("nan")
        sampled_min = float("nan")
        above = 0
        below = 0
    return AuditReport(
        n_samples=n_samples,
        best_maximum=best_max.best_value,
        best_minimum=best_min.best_value,
        sampled_maximum=sampled_max,
        sampled_minimum=sampled_min,
        n_above_maximum=above,
        n_below_minimum=below,
        tolerance=AUDIT_TOLERANCE,
    )
