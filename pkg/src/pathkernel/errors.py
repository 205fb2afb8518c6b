"""Exception types shared across the package."""


class PathkernelError(RuntimeError):
    """Base class for numeric failures (as opposed to bad arguments)."""


class QuadratureError(PathkernelError):
    """Adaptive quadrature failed to reach the requested tolerance."""


class DivergentIntegralError(PathkernelError):
    """An integral was detected as non-convergent under domain expansion."""


class RejectionBudgetError(PathkernelError):
    """A rejection sampler exhausted its attempt budget.

    Carries diagnostics so the failure can be reported rather than
    silently retried.
    """

    def __init__(self, message, attempts=None, acceptance_rate=None):
        super().__init__(message)
        self.attempts = attempts
        self.acceptance_rate = acceptance_rate


class StepTooLargeError(PathkernelError):
    """A path step exceeds half the shortest period, so its lift is ambiguous."""


class PotentialBoundError(PathkernelError):
    """A potential evaluated outside its declared sup bound."""
