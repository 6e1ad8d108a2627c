"""Exception types shared across the package."""


class FlipwalkError(Exception):
    """Base class for all library errors."""


class InvalidParameterError(FlipwalkError, ValueError):
    """A parameter is outside its documented domain."""


class EnumerationTooLargeError(FlipwalkError):
    """An enumeration would exceed the configured cap."""

    def __init__(self, requested, cap):
        super().__init__(f"enumeration size {requested} exceeds cap {cap}")
        self.requested = requested
        self.cap = cap


class RangeExceededError(FlipwalkError, OverflowError):
    """A real-valued result overflows the floating representation."""


class InvalidDistributionError(FlipwalkError, ValueError):
    """A vector claimed to be a probability distribution is not one."""


class LemmaViolationError(FlipwalkError):
    """An exact lemma-level check failed; carries the witness."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class StructureMismatchError(FlipwalkError):
    """A structural isomorphism claimed by the theory failed to verify."""


class NoFlowError(FlipwalkError):
    """A flow problem is infeasible (e.g. disconnected support)."""


class NumericFailureError(FlipwalkError):
    """An iterative numeric routine failed to converge."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class SchemaMismatchError(FlipwalkError, ValueError):
    """Summaries with incompatible schemas were mixed in one report."""
