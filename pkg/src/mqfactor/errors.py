"""Exception hierarchy.

Precondition failures (bad input, unsupported sizes) and computation failures
(no zero point found, retry needed, budget exhausted) are kept apart so the
command-line front end can map them to distinct exit codes.
"""


class MQFactorError(Exception):
    """Base class for every error raised by this package."""


class PreconditionError(MQFactorError, ValueError):
    """Input violates a documented precondition."""


class NotCoprime(PreconditionError):
    """gcd(y, N) != 1.  The shared divisor is kept on ``.divisor``."""

    def __init__(self, y, N, divisor):
        super().__init__(f"y={y} is not coprime to N={N} (gcd={divisor})")
        self.y = y
        self.N = N
        self.divisor = divisor


class BadFactorization(PreconditionError):
    pass


class DimensionMismatch(PreconditionError):
    pass


class UnsupportedNi(PreconditionError):
    pass


class TooLarge(PreconditionError):
    pass


class GridTooCoarse(PreconditionError):
    pass


class ComputationError(MQFactorError, RuntimeError):
    """The computation ran but could not produce the requested answer."""


class NoZeroFound(ComputationError):
    pass


class RetryNewY(ComputationError):
    """Post-processing failed for this base; another y must be tried.

    ``.result`` holds the partial :class:`~mqfactor.factordrive.FactorResult`.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class Exhausted(ComputationError):
    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result
