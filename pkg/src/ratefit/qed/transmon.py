"""Transmon flux arch and drive-power calibration."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..exceptions import ValidityError
from ..units import dbm_to_photon_flux, photon_flux_to_dbm


@dataclass(frozen=True)
class TransmonParams:
    """Josephson and charging energies as frequencies (Hz); flux in Phi_0."""

    ej_max: float
    ec: float
    flux: float = 0.0

    def __post_init__(self):
        if not self.ej_max > 0 or not self.ec > 0:
            raise ValueError("ej_max and ec must be positive")


def josephson_energy(ej_max, flux):
    return ej_max * np.abs(np.cos(np.pi * np.asarray(flux, dtype=float)))


def transmon_frequency_array(ej_max, ec, flux):
    """Vectorised f01(flux) in Hz; raises if any point leaves the valid arch."""
    ej = josephson_energy(ej_max, flux)
    bad = 8.0 * ej * ec <= ec * ec
    if np.any(bad):
        where = np.asarray(flux, dtype=float)[bad] if np.ndim(flux) else flux
        raise ValidityError(f"E_J(flux) <= E_C/8 at flux {where}; transmon formula invalid")
    return np.sqrt(8.0 * ej * ec) - ec


def transmon_frequency(params: TransmonParams) -> float:
    """|0>-|1> frequency in Hz: sqrt(8 E_J(flux) E_C) - E_C."""
    return float(transmon_frequency_array(params.ej_max, params.ec, params.flux))


def rabi_from_power(p_dbm, attenuation_db, gamma_r, f01):
    """Rabi amplitude (rad/s) of a resonant tone of source power ``p_dbm``.

    The tone reaches the qubit through ``attenuation_db`` (negative for loss).
    With photon flux Phi at the qubit, Omega = 2 sqrt(gamma_r * Phi).
    """
    if not gamma_r > 0:
        raise ValueError("gamma_r must be positive")
    flux = dbm_to_photon_flux(np.asarray(p_dbm, dtype=float) + attenuation_db, f01)
    return 2.0 * np.sqrt(gamma_r * flux)


def power_from_rabi(rabi, attenuation_db, gamma_r, f01):
    """Source power (dBm) that produces Rabi amplitude ``rabi`` (rad/s)."""
    if not gamma_r > 0:
        raise ValueError("gamma_r must be positive")
    flux = np.asarray(rabi, dtype=float) ** 2 / (4.0 * gamma_r)
    return photon_flux_to_dbm(flux, f01) - attenuation_db


def rabi_power_conversion(p_dbm, attenuation_db, gamma_r, f01, inverse=False):
    """Convert source power to Rabi amplitude, or back when ``inverse``.

    With ``inverse=True`` the first argument is a Rabi amplitude (rad/s) and
    the return value a source power in dBm.
    """
    if inverse:
        return power_from_rabi(p_dbm, attenuation_db, gamma_r, f01)
    out = rabi_from_power(p_dbm, attenuation_db, gamma_r, f01)
    return float(out) if np.ndim(out) == 0 else out
