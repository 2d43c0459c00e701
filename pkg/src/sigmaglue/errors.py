"""Exception hierarchy shared by all modules."""


class SigmaGlueError(Exception):
    """Base class for all package errors.

    ``report`` optionally carries a diagnostic payload (e.g. a partial
    convergence report) for callers that want to record it.
    """

    def __init__(self, message: str = "", report=None):
        super().__init__(message)
        self.report = report


class DomainError(SigmaGlueError, ValueError):
    """An argument lies outside the admissible domain of an operation."""


class SingularSystemError(SigmaGlueError):
    """A discrete linear system could not be inverted reliably."""


class DegenerateFitError(SigmaGlueError):
    """A fit could not be performed because the data vanished to round-off."""


class ConeExit(SigmaGlueError):
    """An iterate left the positive cone, so ellipticity is lost."""


class MaxIterError(SigmaGlueError):
    """The iteration budget was exhausted before convergence."""


class PositivityLoss(SigmaGlueError):
    """A conformal factor became non-positive somewhere."""
