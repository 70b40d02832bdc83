"""Exception types shared across the package."""

from __future__ import annotations


class FssError(Exception):
    """Base class for all package-specific errors."""


class ParseError(FssError):
    """A data file could not be parsed. Carries the offending line number."""

    def __init__(self, message: str, *, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ValidationError(FssError):
    """An input violates a documented invariant or precondition."""


class FitError(FssError):
    """The penalized least-squares system is singular after regularization."""


class UndefinedMetricError(FssError):
    """A metric's denominator is zero, so the metric is undefined."""


class TreatmentViolationError(FssError):
    """An edit kind is not permitted under the session's treatment."""


class DuplicateWorkerError(FssError):
    """The worker id already participated in another (or a closed) session."""

    duplicate = True


class SessionError(FssError):
    """Invalid session-state transition; ``code`` identifies the rejection."""

    def __init__(self, message: str, *, code: str):
        super().__init__(message)
        self.code = code
