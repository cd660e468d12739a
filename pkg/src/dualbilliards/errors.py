"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class BilliardError(Exception):
    """Base class for every error raised by the package."""


class DegenerateDual(BilliardError, ValueError):
    """Polar duality is undefined for lines through O and for O itself."""


class ZeroMomentum(BilliardError, ValueError):
    pass


class InvalidAxes(BilliardError, ValueError):
    pass


class CenterOutside(BilliardError, ValueError):
    pass


class NonConvex(BilliardError, ValueError):
    pass


class InteriorPoint(BilliardError, ValueError):
    pass


class NoConvergence(BilliardError, RuntimeError):
    pass


class SCurveSingularity(BilliardError, ArithmeticError):
    """The angular map is undefined: the reflected line is parallel to the tangent."""


class SingularEncountered(BilliardError, ArithmeticError):
    pass


class BudgetExceeded(BilliardError, RuntimeError):
    pass


class DegreeTooLow(BilliardError, ValueError):
    pass


class TangentialChord(BilliardError, ArithmeticError):
    pass


class NoIntersection(BilliardError, ValueError):
    pass


class ParityMismatch(BilliardError, ValueError):
    pass


class ParityError(BilliardError, ValueError):
    pass


class OddDegree(BilliardError, ValueError):
    pass


class SignViolation(BilliardError, ValueError):
    pass


class OrbitError(BilliardError):
    """Wraps a failure raised while iterating a map, recording the step index.

    ``cause`` holds the original exception; ``step`` is the index of the state
    whose image could not be computed; ``partial`` holds the states
    computed before the failure.
    """

    def __init__(self, cause: BilliardError, step: int, partial=None):
        self.cause = cause
        self.step = step
        self.partial = partial
        super().__init__(f"{type(cause).__name__} at step {step}: {cause}")
