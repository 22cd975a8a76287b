"""Linear-algebra core for absorbing chains with two boundary states.

State conventions
-----------------
Internal (admissible) states are indexed ``0 .. n_internal - 1``
throughout the package.  The two absorbing boundary states are never
stored in the transition blocks and are always ordered
``[boundary 0, boundary 1]``.  User-facing output also carries state
*labels*: the chain's original numbering reserves ``0`` and ``1`` for
the boundary states, so internal index ``i`` is displayed as label
``i + 2`` (see :func:`state_label`).

The embedded chain is described by the block pair ``P00`` (internal to
internal) and ``P01`` (internal to boundary).  The remaining blocks are
implied by absorption (zero from the boundary back in, identity on the
boundary) and are not stored.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    NegativeEntry,
    NotAbsorbing,
    RowSumViolation,
    SingularSystem,
)

#: default tolerance on |row sum - 1| for transition rows
ROW_SUM_TOL = 1e-9
#: condition-number ceiling above which (I - P00) is treated as singular
ABSORBING_COND_LIMIT = 1e12
#: ceiling on the residual max|M (I - P00) - I|
RESIDUAL_TOL = 1e-8


def state_label(index):
    """Original-chain label of internal state ``index`` (labels 0 and 1
    belong to the boundary states)."""
    return int(index) + 2


def state_index(label):
    """Inverse of :func:`state_label`."""
    return int(label) - 2


def _as_matrix(raw, name):
    arr = np.asarray(raw, dtype=np.float64)
    if arr.ndim != 2:
        raise DimensionMismatch(f"{name} must be a 2-d matrix, got ndim {arr.ndim}")
    return arr


def _freeze(arr):
    out = np.array(arr, dtype=np.float64, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class BlockTransitionMatrix:
    """Validated transition blocks of an absorbing chain.

    ``p00`` is ``n x n`` (internal to internal) and ``p01`` is ``n x 2``
    with columns ordered ``[to boundary 0, to boundary 1]``.
    """

    p00: np.ndarray
    p01: np.ndarray

    @property
    def n_internal(self):
        return self.p00.shape[0]


@dataclass(frozen=True)
class FundamentalMatrix:
    """Expected visit counts before absorption.

    Entry ``m[i, j]`` is the expected number of visits to internal state
    ``j`` before absorption when the chain starts in internal state ``i``.
    """

    m: np.ndarray

    @property
    def n_internal(self):
        return self.m.shape[0]


@dataclass(frozen=True)
class AbsorptionMatrix:
    """Probabilities of ending in each boundary state.

    Entry ``b[i, 0]`` (resp. ``b[i, 1]``) is the probability that the
    chain started in internal state ``i`` is absorbed at boundary 0
    (resp. boundary 1).  Rows sum to one.
    """

    b: np.ndarray

    @property
    def n_internal(self):
        return self.b.shape[0]


@dataclass(frozen=True)
class StabilityReport:
    """Which internal states fail to reach both boundaries.

    ``violations`` lists ``(state_index, boundary)`` pairs where the
    absorption probability does not exceed ``strict_tol``.  The model is
    stable iff the list is empty; stability makes the boundary-to-boundary
    chain irreducible, which is what gives the stationary index meaning.
    """

    stable: bool
    violations: tuple
    strict_tol: float


def validate_chain(p00, p01, tol=ROW_SUM_TOL):
    """Check the block structure of an absorbing chain and freeze it.

    Raises
    ------
    DimensionMismatch
        If ``p00`` is not square or ``p01`` is not ``n x 2``.
    NegativeEntry
        If any stored probability is negative.
    RowSumViolation
        If some internal row does not sum to 1 within ``tol``.
    NotAbsorbing
        If ``I - P00`` is numerically singular (condition estimate above
        ``ABSORBING_COND_LIMIT``), i.e. absorption is not certain.
    """
    p00 = _as_matrix(p00, "P00")
    p01 = _as_matrix(p01, "P01")
    n = p00.shape[0]
    if p00.shape[1] != n:
        raise DimensionMismatch(f"P00 must be square, got {p00.shape}")
    if n < 1:
        raise DimensionMismatch("need at least one internal state")
    if p01.shape != (n, 2):
        raise DimensionMismatch(f"P01 must have shape ({n}, 2), got {p01.shape}")

    full = np.hstack([p00, p01])
    neg = np.argwhere(full < 0.0)
    if neg.size:
        i, j = neg[0]
        raise NegativeEntry(int(i), int(j), float(full[i, j]))
    totals = full.sum(axis=1)
    bad = np.nonzero(np.abs(totals - 1.0) > tol)[0]
    if bad.size:
        i = int(bad[0])
        raise RowSumViolation(i, float(totals[i]))

    system = np.eye(n) - p00
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        cond = np.linalg.cond(system)
    if not np.isfinite(cond) or cond > ABSORBING_COND_LIMIT:
        raise NotAbsorbing(
            f"condition estimate {cond:.3e} of (I - P00) exceeds "
            f"{ABSORBING_COND_LIMIT:.0e}; some internal state never reaches "
            "a boundary"
        )
    return BlockTransitionMatrix(p00=_freeze(p00), p01=_freeze(p01))


def fundamental_matrix(chain):
    """Solve ``M (I - P00) = I`` by LU-backed linear solves.

    One solve per unit column of the identity; the explicit inverse is
    never formed.  The residual ``max|M (I - P00) - I|`` is verified
    against ``RESIDUAL_TOL``.
    """
    n = chain.n_internal
    system = np.eye(n) - chain.p00
    try:
        m = np.linalg.solve(system, np.eye(n))
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(f"(I - P00) solve failed: {exc}") from exc
    residual = np.abs(m @ system - np.eye(n)).max()
    if residual > RESIDUAL_TOL:
        raise SingularSystem(
            f"fundamental-matrix residual {residual:.3e} exceeds {RESIDUAL_TOL:.0e}"
        )
    return FundamentalMatrix(m=_freeze(m))


def absorption_probabilities(chain, fundamental):
    """Absorption split ``B = M P01``; rows must sum to 1 within tolerance."""
    if fundamental.n_internal != chain.n_internal:
        raise DimensionMismatch(
            "fundamental matrix size does not match the chain "
            f"({fundamental.n_internal} vs {chain.n_internal})"
        )
    b = fundamental.m @ chain.p01
    worst = np.abs(b.sum(axis=1) - 1.0).max()
    if worst > ROW_SUM_TOL:
        raise SingularSystem(
            f"absorption rows deviate from 1 by {worst:.3e}; inconsistent "
            "tolerance settings upstream"
        )
    return AbsorptionMatrix(b=_freeze(b))


def check_stability(absorption, strict_tol=0.0):
    """Report every internal state that misses one of the boundaries.

    A state violates stability at boundary ``s`` when its absorption
    probability there is not strictly above ``strict_tol``.
    """
    if strict_tol < 0.0:
        raise ValueError("strict_tol must be nonnegative")
    b = absorption.b
    violations = []
    for i in range(absorption.n_internal):
        for boundary in (0, 1):
            if not b[i, boundary] > strict_tol:
                violations.append((i, boundary))
    return StabilityReport(
        stable=not violations, violations=tuple(violations), strict_tol=strict_tol
    )
