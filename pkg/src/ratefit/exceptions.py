"""Exception hierarchy.

Physics-validity problems derive from :class:`ValidityError` so callers (the
CLI in particular) can separate them from bad input files or fitting trouble.
"""


class RateFitError(Exception):
    """Base class for all package errors."""


class ValidityError(RateFitError, ValueError):
    """A formula was evaluated outside its range of validity."""


class DegenerateParameterError(ValidityError):
    """Parameters make a closed-form denominator vanish."""


class UndefinedRatioError(ValidityError):
    """A rate ratio (beta, Purcell factor, ...) has a zero denominator."""


class SingularityError(ValidityError):
    """A spectral denominator or resolvent matrix is singular."""

    def __init__(self, message, omega=None):
        super().__init__(message)
        self.omega = omega


class SaturationError(ValidityError):
    """The single-point method was used away from saturation."""


class IntegrationError(RateFitError):
    """The ODE integrator could not meet its tolerance."""

    def __init__(self, message, last_good_time):
        super().__init__(f"{message} (last good time {last_good_time:.6g} s)")
        self.last_good_time = last_good_time


class FitError(RateFitError):
    """Generic estimator failure."""


class RankDeficiencyError(FitError):
    """The Jacobian at the optimum does not identify every parameter."""

    def __init__(self, message, directions=()):
        super().__init__(message)
        self.directions = tuple(directions)


class DegenerateGeometryError(FitError):
    """Circle fit on (nearly) collinear points."""


class AliasingError(FitError):
    """Phase advances by more than pi between samples."""


class ConfigError(RateFitError):
    """Configuration or data file does not match its schema.

    ``path`` names the offending field, column or file.
    """

    def __init__(self, message, path=""):
        super().__init__(message)
        self.path = path


class DegenerateSampleError(FitError):
    """Samples have zero spread."""


class FitWarning(UserWarning):
    """A fit finished but its diagnostics flag a problem."""
