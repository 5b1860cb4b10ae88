"""Exception types shared across the package."""


class InvalidArgument(ValueError):
    """A precondition on an input was violated."""


class NumericalFailure(RuntimeError):
    """An iterative numerical procedure did not converge.

    ``diagnostics`` carries whatever the failing routine knew at the time
    (iteration counts, the offending index, residuals).
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class UndefinedCriticalCoupling(ArithmeticError):
    """Raised when F'(kappa0) vanishes and the critical coupling has no value."""


class DegeneracyStop(NumericalFailure):
    """The tracked eigenvalue became (numerically) multiple."""


class LineSearchFailure(NumericalFailure):
    """Backtracking could not find a non-increasing step."""
