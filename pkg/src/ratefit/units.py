"""Unit conversions used at I/O boundaries.

Rates and frequencies are angular (rad/s) inside the package; files and the
command line speak cyclic Hz. Powers are photon fluxes (s^-1).
"""
import math

import numpy as np
from scipy.constants import h as PLANCK

TWO_PI = 2.0 * math.pi


def hz_to_rad(f):
    return TWO_PI * np.asarray(f) if np.ndim(f) else TWO_PI * f


def rad_to_hz(w):
    return np.asarray(w) / TWO_PI if np.ndim(w) else w / TWO_PI


def _check_finite(name, value):
    if not np.all(np.isfinite(value)):
        raise ValueError(f"{name} must be finite, got {value!r}")


def dbm_to_watt(p_dbm):
    _check_finite("p_dbm", p_dbm)
    return 10.0 ** ((np.asarray(p_dbm, dtype=float) - 30.0) / 10.0)


def watt_to_dbm(p_w):
    _check_finite("p_w", p_w)
    return 10.0 * np.log10(np.asarray(p_w, dtype=float)) + 30.0


def dbm_to_photon_flux(p_dbm, f01, photon_energy=None):
    """Photon flux (s^-1) carried by a tone of power ``p_dbm`` at ``f01`` (Hz).

    ``photon_energy`` overrides ``h * f01`` (handy for unit tests).
    """
    if photon_energy is None:
        if not f01 > 0:
            raise ValueError("f01 must be positive")
        photon_energy = PLANCK * f01
    flux = dbm_to_watt(p_dbm) / photon_energy
    return float(flux) if np.ndim(flux) == 0 else flux


def photon_flux_to_dbm(flux, f01, photon_energy=None):
    if photon_energy is None:
        if not f01 > 0:
            raise ValueError("f01 must be positive")
        photon_energy = PLANCK * f01
    p = watt_to_dbm(np.asarray(flux, dtype=float) * photon_energy)
    return float(p) if np.ndim(p) == 0 else p


def db_sum(*levels_db):
    """Cascade of gains/attenuations in dB."""
    return float(sum(levels_db))


def scale_by_db(value, level_db):
    """Multiply a linear power (or flux) by a dB factor."""
    return value * 10.0 ** (level_db / 10.0)
