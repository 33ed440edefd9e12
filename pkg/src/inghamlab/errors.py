"""Exception and warning types raised across the package."""


class InghamError(Exception):
    """Base class for errors raised by inghamlab."""


class DomainError(InghamError, ValueError):
    """An argument lies outside the domain of the operation."""


class PoleError(DomainError):
    """Evaluation at a pole (e.g. log-gamma at a nonpositive integer)."""


class StepUnderflowError(InghamError, ArithmeticError):
    """The adaptive integrator could not satisfy its tolerance."""


class BudgetError(InghamError):
    """A construction cannot meet its support or magnitude budget."""


class MagnitudeOverflowError(InghamError, OverflowError):
    """A norm exceeds the representable log-magnitude budget."""


class WindowError(InghamError):
    """A spectral or radial window is too small for the requested accuracy."""


class ConfigError(InghamError):
    """Malformed experiment configuration or input table."""


class NumericsWarning(UserWarning):
    """Base class for numerical-quality warnings."""


class TruncationWarning(NumericsWarning):
    """The truncated integrand is not negligible at the window edge."""


class GridWarning(NumericsWarning):
    """The grid is too coarse for the finite-difference operator."""


class LimitWarning(NumericsWarning):
    """A value was defined by continuity at a removable or pole point."""
