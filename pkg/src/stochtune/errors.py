"""Exception hierarchy shared by validation, evaluation, and simulation."""


class TuningError(Exception):
    """Base class for every error raised by this package."""


class DimensionMismatch(TuningError):
    """Array arguments have incompatible shapes or lengths."""


class NegativeEntry(TuningError):
    """A probability entry is negative."""

    def __init__(self, row, col, value):
        self.row = row
        self.col = col
        self.value = value
        super().__init__(f"negative probability {value} at row {row}, column {col}")


class RowSumViolation(TuningError):
    """A transition row does not sum to one within tolerance."""

    def __init__(self, row, total):
        self.row = row
        self.total = total
        super().__init__(f"row {row} sums to {total}, expected 1")


class NotAbsorbing(TuningError):
    """The internal block keeps mass forever; absorption is not certain."""


class SingularSystem(TuningError):
    """A linear solve failed or left a residual above tolerance."""


class UnstableModel(TuningError):
    """Some internal state cannot reach both boundary states."""


class NonPositiveDenominatorCoefficient(TuningError):
    """Denominator coefficients are not strictly of one sign."""


class ZeroDenominator(TuningError):
    """The denominator form vanished for the supplied distributions."""


class IndexOutOfRange(TuningError):
    """A grid point lies outside the coefficient tensor bounds."""


class EmptyActionSet(TuningError):
    """There is no action grid to search (zero internal states)."""


class NonconvergentCycle(TuningError):
    """A simulated trajectory exceeded the per-cycle step cap."""

    def __init__(self, cycle_index, max_steps):
        self.cycle_index = cycle_index
        self.max_steps = max_steps
        super().__init__(
            f"cycle {cycle_index} exceeded {max_steps} embedded steps; "
            "the chain looks numerically non-absorbing"
        )


class ModelFileError(TuningError):
    """A model or policy file failed to parse or validate."""
