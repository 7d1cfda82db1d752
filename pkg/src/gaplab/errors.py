"""Exception types shared across the package.

Each class maps to one CLI exit status (see ``gaplab.cli``).
"""


class GaplabError(Exception):
    """Base class for all package errors."""


class ParameterError(GaplabError, ValueError):
    """Inputs violate an operation's preconditions."""


class CapacityError(GaplabError):
    """Request exceeds a configured size limit."""


class CertificateError(GaplabError):
    """A certificate is structurally malformed (missing prime, bad residue)."""


class NotFoundError(GaplabError):
    """A search finished without a result."""

    def __init__(self, message, nodes_visited=0):
        super().__init__(message)
        self.nodes_visited = nodes_visited
