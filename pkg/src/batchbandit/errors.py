"""Exception and warning types shared across the package."""


class BatchBanditError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(BatchBanditError, ValueError):
    pass


class NonConvergence(BatchBanditError):
    """Raised in strict mode when an iterative routine hits its iteration cap.

    The best iterate found so far is attached as ``result``.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class NonConvergenceWarning(UserWarning):
    pass


class InvalidGrid(BatchBanditError, ValueError):
    pass


class Infeasible(BatchBanditError, ValueError):
    pass


class BatchClosed(BatchBanditError, RuntimeError):
    pass


class MissingReward(BatchBanditError, ValueError):
    pass


class UnknownStep(BatchBanditError, KeyError):
    pass


class InvalidConfig(BatchBanditError, ValueError):
    pass


# the harness layer reports configuration problems under this name
ConfigError = InvalidConfig


class ParseError(BatchBanditError, ValueError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class SchemaError(BatchBanditError, ValueError):
    def __init__(self, message, missing=()):
        super().__init__(message)
        self.missing = list(missing)


class SingularDesignWarning(UserWarning):
    pass


class DegenerateFit(BatchBanditError, ValueError):
    pass


class ProtocolError(BatchBanditError, RuntimeError):
    """Agent methods called out of order (e.g. committing an unfinished batch)."""
