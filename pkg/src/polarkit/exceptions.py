"""Toolkit exception types mapped to CLI exit codes."""


class CapacityError(ValueError):
    """An enumeration-based operation was asked to exceed its size guard."""


class IntegrationError(RuntimeError):
    """Numerical integration failed to meet tolerance.

    Carries the best value achieved and the error estimate so callers can
    decide whether the result is still usable.
    """

    def __init__(self, message, value=None, error_estimate=None):
        super().__init__(message)
        self.value = value
        self.error_estimate = error_estimate
