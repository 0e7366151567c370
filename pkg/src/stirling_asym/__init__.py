"""Exact Stirling numbers of the second kind and their asymptotic approximations."""

from .errors import DomainError, NonConvergenceError, ResourceLimitError, StirlingAsymError

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "NonConvergenceError",
    "ResourceLimitError",
    "StirlingAsymError",
]
