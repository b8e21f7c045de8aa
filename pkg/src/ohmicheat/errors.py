"""Exception hierarchy shared by all solver modules."""


class OhmicHeatError(Exception):
    """Base class for all package errors."""


class DomainError(OhmicHeatError, ValueError):
    """Argument outside the mathematical domain of an operation (e.g. s < 0)."""


class ExtrapolationError(OhmicHeatError, ValueError):
    """Tabulated kernel queried beyond its sample grid."""


class QuadratureError(OhmicHeatError, RuntimeError):
    """Quadrature refinement did not converge.

    Carries the last two panel-doubling estimates so the caller can judge
    how far from convergence the computation stopped.
    """

    def __init__(self, message, estimates=None):
        super().__init__(message)
        self.estimates = estimates


class ShootingError(OhmicHeatError, RuntimeError):
    """Shooting bracket not found or residual tolerance not met."""


class GridResolutionError(OhmicHeatError, RuntimeError):
    """Two independent discrete routes to the same quantity disagree."""


class BranchRangeError(OhmicHeatError, RuntimeError):
    """A branch feature (e.g. an interior maximum) is not bracketed by the
    traced mu range; widen the grid."""


class NumericsError(OhmicHeatError, RuntimeError):
    """Time integration or fitting failed in a way that is not a blow-up."""


class InsufficientDataError(OhmicHeatError, ValueError):
    """A fit was requested on data with too little dynamic range."""


class ConfigError(OhmicHeatError, ValueError):
    """Run configuration file is malformed or inconsistent."""
