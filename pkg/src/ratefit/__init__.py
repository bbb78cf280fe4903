"""Decay-rate extraction for a driven two-level emitter at the end of a
one-dimensional waveguide.

Subpackages: :mod:`ratefit.qed` (closed-form physics), :mod:`ratefit.dynamics`
(time evolution and numeric oracles), :mod:`ratefit.chain` (synthetic
measurement chain), :mod:`ratefit.estimators` (fitting) and
:mod:`ratefit.pipeline` (cross-method rate table). Rates are angular
frequencies (rad/s) internally and cyclic (Hz) in files.
"""
from .exceptions import (AliasingError, ConfigError, DegenerateGeometryError, FitError,
                         FitWarning, RankDeficiencyError, RateFitError, SaturationError,
                         ValidityError)
from .qed import DriveConfig, RateSet, Spectrum

__version__ = "0.1.0"

__all__ = [
    "AliasingError", "ConfigError", "DegenerateGeometryError", "DriveConfig", "FitError",
    "FitWarning", "RankDeficiencyError", "RateFitError", "RateSet", "SaturationError", "Spectrum",
    "ValidityError", "__version__",
]
