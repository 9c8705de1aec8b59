"""Exception hierarchy shared by every module in the package."""


class PWLError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(PWLError, ValueError):
    pass


class DivergedError(PWLError, ArithmeticError):
    """An iterate left the finite range; ``step`` is where it happened."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class OverflowDetected(PWLError, ArithmeticError):
    """A non-finite value appeared during a recurrence or product.

    ``location`` is whatever index tuple the raiser found useful, e.g.
    ``(row, seq_index)`` for the Gamma recurrence.
    """

    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


class SingularMatrixError(PWLError, ArithmeticError):
    pass


class DegenerateSpectrumError(PWLError, ArithmeticError):
    pass


class EigenvalueOneError(PWLError, ArithmeticError):
    """``I - M`` is (numerically) singular, so the closed GP formula is unusable."""


class ConvergenceError(PWLError, ArithmeticError):
    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class IllConditionedWarning(UserWarning):
    """Emitted by ``lu_solve`` when the multiply-back residual is too large."""
