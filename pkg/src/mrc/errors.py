"""Exception types shared across the package."""


class MRCError(Exception):
    """Base class for all package errors."""


class DomainError(MRCError, ValueError):
    """An argument lies outside the domain of the operation."""


class SingularityError(DomainError):
    """Evaluation at a singular point of a basis function or kernel."""


class UnsupportedOrderError(MRCError, ValueError):
    """Requested order exceeds the supported range."""


class ConfigurationError(MRCError, ValueError):
    """Inconsistent geometry or solver configuration."""


class SamplingError(MRCError, RuntimeError):
    """Rejection sampling could not produce a point."""


class WoodAnomalyError(ConfigurationError):
    """A grating mode is grazing: l_j^2 == k^2."""


class NumericalError(MRCError, ArithmeticError):
    """A numerical kernel failed (e.g. SVD did not converge)."""
