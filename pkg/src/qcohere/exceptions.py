"""Exception hierarchy used across the package.

Every error raised on purpose derives from :class:`QCohereError`, so callers
(the CLI in particular) can separate validation problems from optimizer
problems with two ``except`` clauses.
"""


class QCohereError(Exception):
    """Base class for all package errors."""


class ValidationError(QCohereError, ValueError):
    """Input failed a structural or numerical validity check."""


class OptimizerError(QCohereError, RuntimeError):
    """A numerical optimizer did not reach its stopping criterion."""


class NotHermitian(ValidationError):
    pass


class NotPSD(ValidationError):
    pass


class NotUnitary(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class ParamOutOfRange(ValidationError):
    pass


class NotBellDiagonal(ValidationError):
    pass


class NotApplicable(ValidationError):
    pass


class SingularDiagonal(ValidationError):
    pass


class NotMUB(ValidationError):
    pass


class InvalidGram(ValidationError):
    pass


class ZeroLQU(ValidationError):
    pass


class TruncationInsufficient(ValidationError):
    pass


class NoSolution(ValidationError):
    pass


class NoConvergence(OptimizerError):
    pass


class OptimizerStalled(OptimizerError):
    pass


class BoundViolation(OptimizerError):
    """A numerically optimized value fell outside a proven analytic bracket."""
