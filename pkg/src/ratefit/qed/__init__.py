"""Closed-form physics of a driven two-level emitter at the end of a waveguide."""
from .bloch import (BlochVector, bloch_matrix, reflection_coefficient, steady_state,
                    steady_state_values, weak_probe_circle)
from .dressed import DressedModel, dressed_asymmetry, mixing_angle
from .power import PowerBudget, RegionBoundaries, power_balance, power_curves, region_boundaries
from .rates import DriveConfig, RateSet, derive_rates
from .spectrum import (Spectrum, i3_closed_form, incoherent_flux, incoherent_psd,
                       incoherent_spectrum, lorentzian, mollow_triplet_approx, triplet_psd)
from .transmon import (TransmonParams, power_from_rabi, rabi_from_power, rabi_power_conversion,
                       transmon_frequency, transmon_frequency_array)

__all__ = [
    "BlochVector", "DressedModel", "DriveConfig", "PowerBudget", "RateSet", "RegionBoundaries",
    "Spectrum", "TransmonParams", "bloch_matrix", "derive_rates", "dressed_asymmetry",
    "i3_closed_form", "incoherent_flux", "incoherent_psd", "incoherent_spectrum", "lorentzian",
    "mixing_angle", "mollow_triplet_approx", "power_balance", "power_curves", "power_from_rabi",
    "rabi_from_power", "rabi_power_conversion", "reflection_coefficient", "region_boundaries",
    "steady_state", "steady_state_values", "transmon_frequency", "transmon_frequency_array",
    "triplet_psd", "weak_probe_circle",
]
