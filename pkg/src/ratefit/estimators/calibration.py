"""Drive-line attenuation and transmon flux-arch calibrations."""
from __future__ import annotations

import warnings

import numpy as np
from scipy.constants import h as PLANCK

from ..exceptions import FitWarning, ValidityError
from ..units import dbm_to_watt
from . import models
from .core import damped_least_squares


def fit_rabi_calibration(source_dbm, rabi, gamma_r, f01, sigma=None):
    """Input-line attenuation from Rabi amplitude versus source power.

    Omega = s sqrt(P_source) with s = 2 sqrt(A gamma_r / (h f01)), so the
    fitted slope gives the linear attenuation A, reported in dB.

    Raises
    ------
    ValidityError
        If the inferred attenuation is a gain (A > 0 dB).
    """
    p = np.asarray(source_dbm, dtype=float)
    om = np.asarray(rabi, dtype=float)
    if p.size < 3 or p.shape != om.shape:
        raise ValueError("need >= 3 (power, rabi) pairs")
    if not (gamma_r > 0 and f01 > 0):
        raise ValueError("gamma_r and f01 must be positive")
    x = np.sqrt(dbm_to_watt(p))
    s0 = float(np.sum(x * om) / np.sum(x * x))
    res = damped_least_squares(models.proportional, x, om, [s0], sigma=sigma, names=("slope",),
                               jac=models.proportional_jac)
    s = res["slope"]
    lin = s * s * PLANCK * f01 / (4.0 * gamma_r)
    att = 10.0 * np.log10(lin)
    if att > 0:
        raise ValidityError(f"inferred attenuation {att:.2f} dB is a gain")
    datt = 20.0 / (np.log(10.0) * s)  # d(att)/d(slope)
    res = res.add_derived("attenuation_db", att, [datt], unit="dB")
    res.units["slope"] = "rad/s/sqrt(W)"
    return res


def fit_flux_arch(flux, f01_hz, ec_fixed, ej_init=None, sigma=None):
    """Maximum Josephson energy (Hz) from f01 versus reduced flux with E_C fixed.

    Points where the dispersive formula is invalid for the starting E_J,max
    are dropped with a warning.
    """
    phi = np.asarray(flux, dtype=float)
    f = np.asarray(f01_hz, dtype=float)
    if not ec_fixed > 0:
        raise ValueError("ec_fixed must be positive")
    c = np.abs(np.cos(np.pi * phi))
    if ej_init is None:
        ok0 = np.isfinite(f) & (c > 0)
        if not np.any(ok0):
            raise ValidityError("no usable flux points")
        k = np.flatnonzero(ok0)[np.argmax(f[ok0])]
        ej_init = (f[k] + ec_fixed) ** 2 / (8.0 * ec_fixed * c[k])
    valid = np.isfinite(f) & (8.0 * ej_init * c * ec_fixed > ec_fixed**2) & (f > 0)
    if not np.all(valid):
        warnings.warn(f"dropped {np.count_nonzero(~valid)} point(s) outside the valid arch",
                      FitWarning, stacklevel=2)
    if not np.any(valid):
        raise ValidityError("no points in the valid region of the arch")
    span = np.ptp(phi[valid]) if np.count_nonzero(valid) > 1 else 0.0
    sig = None if sigma is None else np.broadcast_to(np.asarray(sigma, float), f.shape)[valid]

    def model(x, p):
        return models.flux_arch(x, p, ec=ec_fixed)

    def jac(x, p):
        return models.flux_arch_jac(x, p, ec=ec_fixed)

    res = damped_least_squares(model, phi[valid], f[valid], [ej_init], sigma=sig,
                               names=("ej_max",), jac=jac)
    res.units["ej_max"] = "Hz"
    res.meta.update(n_dropped=int(np.count_nonzero(~valid)), flux_span=float(span),
                    ec_fixed=float(ec_fixed))
    return res
