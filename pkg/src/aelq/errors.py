"""Exception hierarchy shared by all modules."""


class AelqError(Exception):
    """Base class for library errors."""


class NotPrime(AelqError, ValueError):
    pass


class FieldTooLarge(AelqError, ValueError):
    pass


class DivisionByZero(AelqError, ZeroDivisionError):
    pass


class IncompatibleFields(AelqError, ValueError):
    pass


class AmbientMismatch(AelqError, ValueError):
    pass


class NotSubspace(AelqError, ValueError):
    pass


class Singular(AelqError, ValueError):
    pass


class CapExceeded(AelqError, RuntimeError):
    """An enumeration would exceed the configured cap.

    ``partial`` carries whatever was computed before the cap was hit, if any.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class CssConditionViolated(AelqError, ValueError):
    pass


class BadBlockSize(AelqError, ValueError):
    pass


class InconsistentSyndrome(AelqError, ValueError):
    pass


class Degenerate(AelqError, ValueError):
    pass


class RetriesExceeded(AelqError, RuntimeError):
    pass


class ParameterMismatch(AelqError, ValueError):
    pass


class NotInCode(AelqError, ValueError):
    pass


class SameCoset(AelqError, ValueError):
    pass


class ZeroProbabilityEvent(AelqError, ValueError):
    pass


class BudgetExceeded(AelqError, RuntimeError):
    pass


class EmptyPromise(AelqError, ValueError):
    pass


class IterationCapExceeded(AelqError, RuntimeError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class SpecError(AelqError, ValueError):
    """Malformed or unresolvable configuration."""


class InvariantViolation(AelqError, AssertionError):
    """A checked mathematical inequality or identity failed."""
