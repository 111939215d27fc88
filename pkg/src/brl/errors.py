"""Exception hierarchy shared by all brl modules."""


class BrlError(Exception):
    """Base class for all library errors."""


class InadmissibleParameters(BrlError):
    """(N, p) outside the admissible range (or too close to its boundary)."""


class DomainError(BrlError):
    """An argument is outside the domain of the operation."""


class NumericalFailure(BrlError):
    """A numeric routine could not reach its accuracy target."""


class InsufficientSamples(BrlError):
    """Not enough sample points for the requested transform or fit."""


class DegenerateFit(BrlError):
    """The data carries no usable signal for a rate fit."""


class InvalidTrajectory(BrlError):
    """The trajectory does not satisfy the preconditions of a transform."""


class UnclassifiableTrajectory(BrlError):
    """The integrator failed, so the survive/extinct outcome is unknown."""


class BracketFailure(BrlError):
    """Bracket expansion hit its cap without enclosing the critical value."""


class NotAboveCritical(BrlError):
    """A supposedly supercritical trajectory went extinct."""
