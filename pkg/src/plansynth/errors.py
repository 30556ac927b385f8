"""Shared exception types."""


class ParseError(ValueError):
    """Raised on malformed formula or file input; carries a position when known."""

    def __init__(self, message: str, position: int | None = None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class VocabularyMismatch(ValueError):
    """Two objects built over different variable tables were mixed."""


class LimitExceeded(ValueError):
    """An explicit construction would exceed a hard size guard."""


class DomainValidationError(ValueError):
    """A compact domain description violates a well-formedness requirement."""


class EmptyInitError(DomainValidationError):
    pass


class NoAvailableActionError(DomainValidationError):
    pass


class DanglingDeltaError(DomainValidationError):
    pass


class NonSerialPreError(DomainValidationError):
    pass


class InvalidAssumptionError(ValueError):
    """The assumption of a problem is not environment realizable."""


class UnsupportedFeature(RuntimeError):
    """The request is recognized but outside what the engine solves."""


class UnsupportedFairSolve(UnsupportedFeature):
    """Fair planning was requested in a solving mode; carries the exported
    fairness formula so callers can still write it out."""

    def __init__(self, message: str, fairness=None):
        super().__init__(message)
        self.fairness = fairness
