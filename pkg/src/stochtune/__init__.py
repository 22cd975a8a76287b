"""Stationary profit-rate solver for absorbing-chain models with
randomized boundary controls.

The package computes the stationary mean specific profit of a model
whose process, once absorbed at one of two boundary states, is
reinserted into the admissible states by a randomized control pair;
finds the provably optimal deterministic control by scanning the test
function over the action grid; and verifies everything independently by
seeded renewal-reward simulation.
"""

from .backends import get_backend
from .chain import (
    AbsorptionMatrix,
    BlockTransitionMatrix,
    FundamentalMatrix,
    StabilityReport,
    absorption_probabilities,
    check_stability,
    fundamental_matrix,
    state_index,
    state_label,
    validate_chain,
)
from .errors import (
    DimensionMismatch,
    EmptyActionSet,
    IndexOutOfRange,
    ModelFileError,
    NegativeEntry,
    NonconvergentCycle,
    NonPositiveDenominatorCoefficient,
    NotAbsorbing,
    RowSumViolation,
    SingularSystem,
    TuningError,
    UnstableModel,
    ZeroDenominator,
)
from .functional import (
    ControlPolicy,
    IndexValue,
    LfifCoefficients,
    coefficients,
    coefficients_continuous,
    coefficients_discrete,
    evaluate_index,
    evaluate_index_via_coefficients,
    evaluate_lfif,
    test_function,
)
from .model import (
    ContinuousParameters,
    DiscreteParameters,
    TimeModel,
    TuningModel,
    expected_reward_to_absorption,
    expected_time_discrete,
    expected_time_to_absorption,
)
from .optimizer import (
    AuditReport,
    OptimizationResult,
    Sense,
    dominance_audit,
    optimize,
    optimize_lfif,
    sample_simplex,
)
from .simulate import (
    HoldingTimeLaw,
    SimulationConfig,
    SimulationEstimate,
    estimate_absorption,
    estimate_visits,
    simulate_index,
)

__version__ = "0.1.0"
