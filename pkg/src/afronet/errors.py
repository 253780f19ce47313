"""Exception hierarchy shared by every stage of the toolkit."""


class AfronetError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(AfronetError, ValueError):
    """Input data or parameters violate a documented constraint."""


class ParseError(ValidationError):
    """A tabular input row could not be parsed."""

    def __init__(self, message, row=None):
        self.row = row
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)


class RoutingError(AfronetError):
    """No admissible route exists for a routing request."""


class PlanIOError(AfronetError, OSError):
    """Reading or writing a run artefact failed."""
