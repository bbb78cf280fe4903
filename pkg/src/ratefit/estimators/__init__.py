"""Inverse problems: from synthetic or measured data back to decay rates."""
from .calibration import fit_flux_arch, fit_rabi_calibration
from .combine import RATE_NAMES, RateRecord, combine_rates, pairwise_consistency
from .core import FitResult, damped_least_squares, numeric_jacobian
from .powers import SinglePointResult, fit_scattering_powers, single_point_rates
from .reflection import algebraic_circle, circle_fit
from .spectral import (find_triplet_peaks, fit_full_spectrum, fit_mollow_triplet,
                       full_spectrum_model, integrated_weights)
from .timedomain import fit_complex_decay, fit_exponential_power, fit_gaussian_histogram

__all__ = [
    "FitResult", "RATE_NAMES", "RateRecord", "SinglePointResult", "algebraic_circle",
    "circle_fit", "combine_rates", "damped_least_squares", "find_triplet_peaks",
    "fit_complex_decay", "fit_exponential_power", "fit_flux_arch", "fit_full_spectrum",
    "fit_gaussian_histogram", "fit_mollow_triplet", "fit_rabi_calibration",
    "fit_scattering_powers", "full_spectrum_model", "integrated_weights", "numeric_jacobian",
    "pairwise_consistency", "single_point_rates",
]
