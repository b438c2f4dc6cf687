"""Exception hierarchy shared by every module."""


class FountainError(Exception):
    """Base class for all package errors."""


class ParameterError(FountainError, ValueError):
    pass


class ConfigurationError(FountainError, ValueError):
    pass


class NonConvergenceError(FountainError):
    """Parameter adjustment ran out of iterations."""


class DecodeFailure(FountainError):
    """Belief propagation left user symbols unresolved."""

    def __init__(self, message: str, stripe: int = 0, unresolved=()):
        super().__init__(message)
        self.stripe = stripe
        self.unresolved = tuple(unresolved)


class RepairFailure(FountainError):
    pass


class MetadataError(FountainError):
    pass


class FormatError(FountainError, ValueError):
    """Malformed check-data image."""

    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)
        self.offset = offset
