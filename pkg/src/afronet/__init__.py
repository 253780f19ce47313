"""Cluster-then-route backbone planning over the 55 African countries."""

from .errors import AfronetError, ParseError, PlanIOError, RoutingError, ValidationError

__version__ = "0.1.0"

__all__ = ["AfronetError", "ParseError", "PlanIOError", "RoutingError", "ValidationError", "__version__"]
