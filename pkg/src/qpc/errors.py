"""Exception hierarchy shared by the library and the CLI."""


class QPCError(Exception):
    """Base class for all errors raised by :mod:`qpc`."""


class ContractError(QPCError, ValueError):
    """An argument violates a documented precondition."""


class CapacityError(QPCError):
    """A requested Hilbert space exceeds the configured dense capacity."""


class NonTerminationError(QPCError):
    """An iterative procedure hit its iteration cap before stabilizing."""

    def __init__(self, message, partial_dim=None):
        super().__init__(message)
        self.partial_dim = partial_dim


class InvariantViolation(QPCError):
    """An internal consistency check failed; indicates a bug or bad numerics."""
