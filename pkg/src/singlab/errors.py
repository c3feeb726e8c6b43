"""Exception hierarchy shared by the numerical kernels and the CLI."""


class SinglabError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(SinglabError, ValueError):
    """Argument outside the domain of a function."""


class PreconditionError(SinglabError, ValueError):
    """Parameters violate the stated precondition of an operation."""


class SingularityError(SinglabError, ArithmeticError):
    """Evaluation hit the spectral singularity (d = 0, k = b) or another
    point where the requested quantity does not exist."""


class PoleError(SinglabError, ArithmeticError):
    """Resolvent evaluated on the spectrum or at a zero of the Jost function."""

    def __init__(self, message, abs_w=None):
        super().__init__(message)
        self.abs_w = abs_w


class ConvergenceError(SinglabError, RuntimeError):
    """Quadrature did not reach the requested tolerance."""

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class DivergenceError(ConvergenceError):
    """Integrand tail does not decay."""


class InsufficientDataError(PreconditionError):
    """A fit window covers too few oscillation periods."""


class NoResonanceError(SinglabError, RuntimeError):
    """A cross-section scan has no interior maximum."""


class PoorFitWarning(RuntimeWarning):
    """Least-squares residual is large compared with the fitted amplitude."""
