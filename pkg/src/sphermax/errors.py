"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes 2 (domain), 3 (accuracy) and 4 (divergence).
"""


class SphermaxError(Exception):
    """Base class."""


class DomainError(SphermaxError, ValueError):
    """Input outside the mathematical domain of an operation."""


class AccuracyError(SphermaxError, ArithmeticError):
    """A quadrature did not reach its tolerance.

    ``best`` carries the best available estimate, ``error`` its error estimate.
    """

    def __init__(self, message, best=float("nan"), error=float("inf")):
        super().__init__(message)
        self.best = best
        self.error = error


class DivergenceSignal(SphermaxError, ArithmeticError):
    """An integral that should be finite was found to diverge.

    For the counterexample families this is an expected outcome, not a bug.
    """

    def __init__(self, message, partial=float("inf")):
        super().__init__(message)
        self.partial = partial
