"""Stationary index evaluation and its ratio-of-multilinear-forms shape.

The stationary mean specific profit of a model under a pair of
reinsertion distributions ``(alpha0, alpha1)`` is a ratio of two
bilinear forms in those distributions.  This module evaluates the index
directly from the model quantities, builds the coefficient tensors of
the equivalent ratio form, and evaluates the generic N-factor version
(a ratio of multilinear forms over a product of finite action sets).
The pointwise ratio of the two coefficient tensors -- the test function
-- is what the optimizer scans: its grid extremum locates the optimal
deterministic control.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    IndexOutOfRange,
    NonPositiveDenominatorCoefficient,
    UnstableModel,
    ZeroDenominator,
)
from .model import TimeModel

#: tolerance on |sum - 1| for any probability-distribution argument
DISTRIBUTION_TOL = 1e-9


def _as_distribution(raw, name, size=None):
    vec = np.asarray(raw, dtype=np.float64)
    if vec.ndim != 1:
        raise DimensionMismatch(f"{name} must be a 1-d vector, got ndim {vec.ndim}")
    if size is not None and vec.shape[0] != size:
        raise DimensionMismatch(f"{name} must have length {size}, got {vec.shape[0]}")
    if np.any(vec < 0.0):
        raise ValueError(f"{name} has a negative entry")
    total = float(vec.sum())
    if abs(total - 1.0) > DISTRIBUTION_TOL:
        raise ValueError(f"{name} sums to {total}, expected 1")
    out = vec.copy()
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class ControlPolicy:
    """Pair of reinsertion distributions over the internal states.

    ``alpha0`` governs where the process re-enters after absorption at
    boundary 0, ``alpha1`` after absorption at boundary 1.
    """

    alpha0: np.ndarray
    alpha1: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "alpha0", _as_distribution(self.alpha0, "alpha0"))
        object.__setattr__(self, "alpha1", _as_distribution(self.alpha1, "alpha1"))

    @classmethod
    def degenerate(cls, n_internal, l0, l1):
        """Deterministic policy: always re-enter at ``l0`` from boundary 0
        and at ``l1`` from boundary 1."""
        if not (0 <= l0 < n_internal and 0 <= l1 < n_internal):
            raise IndexOutOfRange(f"({l0}, {l1}) outside 0..{n_internal - 1}")
        a0 = np.zeros(n_internal)
        a0[l0] = 1.0
        a1 = np.zeros(n_internal)
        a1[l1] = 1.0
        return cls(alpha0=a0, alpha1=a1)


@dataclass(frozen=True)
class LfifCoefficients:
    """Coefficient tensors of a ratio of multilinear forms.

    ``a`` and ``b`` share one shape (the factor sizes); ``b`` must be
    strictly of one sign so the denominator can never vanish on the
    probability simplex product.
    """

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=np.float64)
        b = np.asarray(self.b, dtype=np.float64)
        if a.shape != b.shape:
            raise DimensionMismatch(
                f"coefficient tensors differ in shape: {a.shape} vs {b.shape}"
            )
        if a.ndim < 1:
            raise DimensionMismatch("coefficient tensors must have at least 1 factor")
        if not (np.all(b > 0.0) or np.all(b < 0.0)):
            raise NonPositiveDenominatorCoefficient(
                "denominator tensor must be strictly positive or strictly negative"
            )
        a = a.copy()
        b = b.copy()
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def factor_sizes(self):
        return self.a.shape

    @property
    def n_factors(self):
        return self.a.ndim


@dataclass(frozen=True)
class IndexValue:
    """Index value with its numerator and denominator exposed for
    diagnosis of near-zero denominators."""

    value: float
    numerator: float
    denominator: float


def _require_stable(model, allow_unstable):
    if allow_unstable or model.stability.stable:
        return
    raise UnstableModel(
        f"states {sorted({i for i, _ in model.stability.violations})} miss a "
        "boundary; pass allow_unstable=True to proceed anyway"
    )


def coefficients_continuous(model, allow_unstable=False):
    """Coefficient tensors of the continuous-time index.

    ``A[l0, l1]`` pairs the reinsertion cost plus accumulated income of
    each action with the partner action's absorption weight;
    ``B[l0, l1]`` does the same with reinsertion duration plus expected
    time to absorption.  ``B`` is strictly positive for stable models.
    """
    if model.time_model is not TimeModel.CONTINUOUS:
        raise DimensionMismatch("model is not continuous-time")
    _require_stable(model, allow_unstable)
    p = model.params
    r = model.reward_to_absorption
    m = model.time_to_absorption
    b0 = model.absorption.b[:, 0]
    b1 = model.absorption.b[:, 1]
    a = (p.d0 + r)[:, None] * b0[None, :] + b1[:, None] * (p.d1 + r)[None, :]
    den = (p.mu0 + m)[:, None] * b0[None, :] + b1[:, None] * (p.mu1 + m)[None, :]
    if np.any(den <= 0.0):
        raise NonPositiveDenominatorCoefficient(
            "denominator coefficients are not strictly positive; invariant breach"
        )
    return LfifCoefficients(a=a, b=den)


def coefficients_discrete(model, allow_unstable=False):
    """Coefficient tensors of the discrete-time index.

    Same numerator structure as the continuous version; the denominator
    reduces to the paired absorption weights ``b[l1, 0] + b[l0, 1]``.
    """
    if model.time_model is not TimeModel.DISCRETE:
        raise DimensionMismatch("model is not discrete-time")
    _require_stable(model, allow_unstable)
    p = model.params
    r = model.reward_to_absorption
    b0 = model.absorption.b[:, 0]
    b1 = model.absorption.b[:, 1]
    a = (p.d0 + r)[:, None] * b0[None, :] + b1[:, None] * (p.d1 + r)[None, :]
    den = np.zeros_like(a) + b0[None, :] + b1[:, None]
    if np.any(den <= 0.0):
        raise NonPositiveDenominatorCoefficient(
            "denominator coefficients are not strictly positive; invariant breach"
        )
    return LfifCoefficients(a=a, b=den)


def coefficients(model, allow_unstable=False):
    """Coefficient tensors matching the model's time version."""
    if model.time_model is TimeModel.CONTINUOUS:
        return coefficients_continuous(model, allow_unstable=allow_unstable)
    return coefficients_discrete(model, allow_unstable=allow_unstable)


def evaluate_index(model, policy, allow_unstable=False):
    """Stationary mean specific profit under ``policy``.

    Continuous models report money per unit time; discrete models report
    money per control cycle.  Evaluated straight from the per-state
    expectations, with the boundary-1 weights taken from the stored
    absorption column (the single representation kept by the model).
    """
    _require_stable(model, allow_unstable)
    n = model.n_internal
    a0 = _as_distribution(policy.alpha0, "alpha0", size=n)
    a1 = _as_distribution(policy.alpha1, "alpha1", size=n)
    p = model.params
    r = model.reward_to_absorption
    b0 = model.absorption.b[:, 0]
    b1 = model.absorption.b[:, 1]
    weight0 = np.dot(a1, b0)
    weight1 = np.dot(a0, b1)
    numerator = np.dot(a0, p.d0 + r) * weight0 + np.dot(a1, p.d1 + r) * weight1
    if model.time_model is TimeModel.CONTINUOUS:
        m = model.time_to_absorption
        denominator = (
            np.dot(a0, p.mu0 + m) * weight0 + np.dot(a1, p.mu1 + m) * weight1
        )
    else:
        denominator = weight0 + weight1
    if denominator == 0.0:
        raise ZeroDenominator("index denominator vanished")
    return IndexValue(
        value=float(numerator / denominator),
        numerator=float(numerator),
        denominator=float(denominator),
    )


def evaluate_index_via_coefficients(coeffs, policy):
    """Index as the ratio of the two bilinear forms in the policy pair.

    Must agree with :func:`evaluate_index` on the same model to floating
    round-off; the two paths exist precisely to check each other.
    """
    if coeffs.n_factors != 2:
        raise DimensionMismatch("expected 2-factor coefficients")
    n0, n1 = coeffs.factor_sizes
    a0 = _as_distribution(policy.alpha0, "alpha0", size=n0)
    a1 = _as_distribution(policy.alpha1, "alpha1", size=n1)
    numerator = a0 @ coeffs.a @ a1
    denominator = a0 @ coeffs.b @ a1
    if denominator == 0.0:
        raise ZeroDenominator("bilinear-form denominator vanished")
    return IndexValue(
        value=float(numerator / denominator),
        numerator=float(numerator),
        denominator=float(denominator),
    )


def evaluate_lfif(coeffs, distributions):
    """Generic N-factor ratio of multilinear forms.

    ``distributions`` supplies one probability vector per factor, in
    factor order.  Returns the scalar ratio; the denominator cannot
    vanish for sign-definite ``b`` but is checked regardless.
    """
    sizes = coeffs.factor_sizes
    if len(distributions) != len(sizes):
        raise DimensionMismatch(
            f"expected {len(sizes)} distributions, got {len(distributions)}"
        )
    dists = [
        _as_distribution(d, f"distribution {i}", size=sizes[i])
        for i, d in enumerate(distributions)
    ]
    numerator = coeffs.a
    denominator = coeffs.b
    for d in dists:
        numerator = np.tensordot(d, numerator, axes=(0, 0))
        denominator = np.tensordot(d, denominator, axes=(0, 0))
    numerator = float(numerator)
    denominator = float(denominator)
    if denominator == 0.0:
        raise ZeroDenominator("multilinear-form denominator vanished")
    return numerator / denominator


def test_function(coeffs, point):
    """Pointwise coefficient ratio ``a[point] / b[point]``.

    Equals the index at the policy degenerate at ``point``; its grid
    extremum is the optimal deterministic control.
    """
    point = tuple(int(k) for k in point)
    sizes = coeffs.factor_sizes
    if len(point) != len(sizes):
        raise IndexOutOfRange(f"point {point} has wrong arity for sizes {sizes}")
    for k, size in zip(point, sizes):
        if not 0 <= k < size:
            raise IndexOutOfRange(f"point {point} outside grid {sizes}")
    return float(coeffs.a[point] / coeffs.b[point])
