"""Exception hierarchy shared by every module of the package."""


class BayesDepError(Exception):
    """Base class for all errors raised by bayesdep."""


class DomainError(BayesDepError, ValueError):
    """An argument lies outside the domain of the operation."""


class AccuracyError(BayesDepError, ArithmeticError):
    """A numerical procedure failed to reach its requested accuracy.

    The best estimate obtained so far is kept on the exception so callers
    can decide whether it is good enough.
    """

    def __init__(self, message, best_estimate=None, error_estimate=None):
        super().__init__(message)
        self.best_estimate = best_estimate
        self.error_estimate = error_estimate


class EvaluationError(BayesDepError, ArithmeticError):
    """A user supplied density or function returned an invalid value."""


class DivergenceError(BayesDepError, ArithmeticError):
    """An ODE integration produced a non-finite state."""

    def __init__(self, message, last_valid_time=None):
        super().__init__(message)
        self.last_valid_time = last_valid_time


class FitError(BayesDepError, RuntimeError):
    """A maximum-likelihood fit did not converge."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class ConfigError(BayesDepError, ValueError):
    """A sweep configuration is malformed."""


class SweepError(BayesDepError, RuntimeError):
    """Too many replications failed inside one sweep cell."""
