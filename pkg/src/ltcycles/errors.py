"""Exception hierarchy.

Mathematical failures (``MathError`` subclasses) map to CLI exit code 2,
resource limits (``ResourceLimit`` subclasses) to exit code 3.
"""


class LTCyclesError(Exception):
    pass


class MathError(LTCyclesError):
    pass


class ResourceLimit(LTCyclesError):
    pass


class PrecisionExhausted(ResourceLimit):
    """A valuation or inverse could not be certified at the working precision."""


class DomainError(MathError):
    pass


class SingularMatrix(MathError):
    pass


class DegenerateElement(MathError):
    """A required inverse does not exist for the given element."""


class CoefficientNotRational(MathError):
    """A polynomial coefficient failed to descend to the base field."""


class NotRational(CoefficientNotRational):
    pass


class NotIrreducible(MathError):
    pass


class IrreducibilityUndecided(MathError):
    pass


class HeightMismatch(MathError):
    pass


class DeltaNormMismatch(MathError):
    pass


class InfiniteIntersection(MathError):
    pass


class SingularOrbit(MathError):
    pass


class IrregularElement(MathError):
    pass


class NoIntegralRepresentative(MathError):
    pass


class EnumerationTooLarge(ResourceLimit):
    pass


class BudgetExceeded(ResourceLimit):
    pass


class ConfigError(LTCyclesError):
    pass
