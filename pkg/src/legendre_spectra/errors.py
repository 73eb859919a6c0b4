"""Exception types shared across the package.

The CLI maps these onto exit codes: usage/domain problems exit 2, bad input
data exits 3 and numerical divergence exits 4.
"""


class LegendreError(Exception):
    """Base class for all package errors."""


class DomainError(LegendreError, ValueError):
    """An argument lies outside the domain where the operation is defined."""


class DataError(LegendreError, ValueError):
    """Input data is malformed or non-finite."""


class ConvergenceError(LegendreError, RuntimeError):
    """An internal iteration did not converge."""


class DivergenceError(LegendreError, ArithmeticError):
    """Time integration produced a non-finite state.

    Attributes
    ----------
    t : float
        Time at which the non-finite value appeared.
    mode : int
        Index of the first non-finite coefficient.
    step : int or None
        Reporting step index, when known.
    """

    def __init__(self, message, t, mode, step=None):
        super().__init__(message)
        self.t = t
        self.mode = mode
        self.step = step
