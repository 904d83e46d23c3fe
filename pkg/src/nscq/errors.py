"""Exception types shared across the package.

Each maps to a distinct command-line exit code.
"""


class MalformedInputError(ValueError):
    """Input data violates a documented precondition (exit code 1)."""


class ResourceLimitError(RuntimeError):
    """Requested problem exceeds the configured size cap (exit code 2)."""


class InvariantViolation(AssertionError):
    """A mathematical invariant failed beyond its tolerance (exit code 3)."""


class NumericalFailure(RuntimeError):
    """A numerical routine did not converge (exit code 4)."""
