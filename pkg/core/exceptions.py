"""
==============================================================================
CORE APP - EXCEPTIONS
==============================================================================
Error hierarchy shared by every ShiftRobust app.

Each error carries the process exit code the CLI reports for it:
    1  usage / argument problems (bad config, dimension mismatch, ...)
    2  infeasibility and resource limits (cover cap, l1(g) > 2, ...)

Author: ShiftRobust Development Team
==============================================================================
"""


class ShiftRobustError(Exception):
    """Base class for all errors raised by ShiftRobust code."""

    exit_code = 1

    def __init__(self, message, *, hint=None):
        super().__init__(message)
        self.hint = hint

    def __str__(self):
        message = super().__str__()
        if self.hint:
            return f'{message} (hint: {self.hint})'
        return message


class ArgumentError(ShiftRobustError, ValueError):
    """A precondition on the inputs does not hold."""

    exit_code = 1


class UnsupportedError(ArgumentError):
    """The operation is not defined for this kind (e.g. multivariate density)."""


class ResourceError(ShiftRobustError):
    """A configured size cap would be exceeded.

    Attributes:
        required: The size (cover points, atoms, K, ...) that was asked for.
    """

    exit_code = 2

    def __init__(self, message, *, required=None, hint=None):
        super().__init__(message, hint=hint)
        self.required = required


class InfeasibleError(ShiftRobustError):
    """The requested construction cannot be realized with these parameters."""

    exit_code = 2


class QuadratureError(ShiftRobustError):
    """Numerical integration failed to reach the requested tolerance."""

    exit_code = 2
