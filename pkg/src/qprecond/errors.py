"""Exception hierarchy shared by every module."""


class QPrecondError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatchError(QPrecondError, ValueError):
    pass


class NotHermitianError(QPrecondError, ValueError):
    pass


class NotUnitaryError(QPrecondError, ValueError):
    pass


class InvalidStateError(QPrecondError, ValueError):
    """A matrix failed the density-matrix invariants."""


class InvalidChannelError(QPrecondError, ValueError):
    """Channel data violates its representation's invariants."""


class NotCompletelyPositiveError(InvalidChannelError):
    pass


class ConvergenceError(QPrecondError, RuntimeError):
    def __init__(self, message, residual):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


class ResourceBudgetError(QPrecondError, MemoryError):
    pass


class EncodingError(QPrecondError, ValueError):
    """Malformed JSON payload for a matrix, channel or code."""
