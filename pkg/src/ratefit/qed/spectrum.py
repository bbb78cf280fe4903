"""Incoherent fluorescence spectrum of the driven qubit.

The spectrum is S(w) = (gamma_r / pi) Re I3(w), with I3 the one-sided
Fourier transform of the fluctuating part of <sigma+(t) sigma-(t+tau)>.
The 1/pi prefactor makes the spectrum integrate to the incoherently
scattered photon flux gamma_r (s2 - |s1|^2); on resonance and at strong
drive the weights are 1/4, 1/8, 1/8 of gamma_r.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..exceptions import SingularityError, ValidityError
from .bloch import steady_state_values
from .rates import DriveConfig, RateSet

#: Sum-rule normalisation applied to gamma_r * Re I3.
SPECTRUM_NORM = 1.0 / np.pi

#: Default validity threshold Omega / Gamma_2 for the three-Lorentzian form.
TRIPLET_VALIDITY = 5.0


@dataclass(frozen=True)
class Spectrum:
    """PSD samples on a detection-frequency grid (rad/s).

    ``psd`` is in photon flux per unit angular frequency; ``sigma`` is an
    optional per-point standard deviation.
    """

    omega_grid: np.ndarray
    psd: np.ndarray
    sigma: Optional[np.ndarray] = None

    def __post_init__(self):
        w = np.asarray(self.omega_grid, dtype=float)
        p = np.asarray(self.psd, dtype=float)
        if w.ndim != 1 or w.shape != p.shape:
            raise ValueError("omega_grid and psd must be 1-D arrays of equal length")
        if w.size > 1 and np.any(np.diff(w) <= 0):
            raise ValueError("omega_grid must be strictly increasing")
        if not np.all(np.isfinite(p)):
            raise ValueError("psd must be finite")
        object.__setattr__(self, "omega_grid", w)
        object.__setattr__(self, "psd", p)
        if self.sigma is not None:
            s = np.asarray(self.sigma, dtype=float)
            if s.shape != p.shape:
                raise ValueError("sigma must match psd")
            object.__setattr__(self, "sigma", s)

    def integrate(self, lo=-np.inf, hi=np.inf) -> float:
        m = (self.omega_grid >= lo) & (self.omega_grid <= hi)
        return float(np.trapezoid(self.psd[m], self.omega_grid[m]))


def _check_grid(omega):
    w = np.asarray(omega, dtype=float)
    if w.ndim != 1:
        raise ValueError("omega grid must be 1-D")
    if w.size > 1 and np.any(np.diff(w) <= 0):
        raise ValueError("omega grid must be strictly increasing")
    if not np.all(np.isfinite(w)):
        raise ValueError("omega grid must be finite")
    return w


def fluctuation_initial(s1, s2):
    """delta S(0) = (s2 - |s1|^2, -(s1*)^2, -s1* s2) for the correlation vector."""
    c = np.conj(s1)
    return np.array([s2 - abs(s1) ** 2, -(c**2), -c * s2], dtype=complex)


def i3_closed_form(x, delta, rabi, g1, g2):
    """Closed-form I3 as a function of x = w - w_p (rad/s).

    The mu-denominators are the diagonal of M + i x; the third one is
    -gamma_1 + i x (pump-frame), which is what the 3x3 resolvent gives.
    """
    x = np.asarray(x, dtype=float)
    s1, s2 = steady_state_values(delta, rabi, g1, g2)
    a = abs(s1) ** 2 - s2
    c = np.conj(s1)
    mu1 = -g2 + 1j * (x + delta)
    mu2 = -g2 + 1j * (x - delta)
    mu3 = -g1 + 1j * x
    den = 2.0 * mu1 * mu2 * mu3 + rabi**2 * (mu1 + mu2)
    bad = (mu1 == 0) | (mu2 == 0) | (mu3 == 0) | (den == 0)
    if np.any(bad):
        idx = np.flatnonzero(np.atleast_1d(bad))[0]
        raise SingularityError(f"spectral denominator vanishes at x={np.atleast_1d(x)[idx]!r} rad/s",
                               omega=np.atleast_1d(x)[idx])
    num = rabi**2 * c**2 - rabi**2 * a * mu2 / mu1 - 2j * rabi * c * s2 * mu2
    return a / mu1 + num / den


def incoherent_psd(omega, drive: DriveConfig, rates: RateSet):
    """S_i on an arbitrary array of detection frequencies (rad/s)."""
    x = np.asarray(omega, dtype=float) - drive.omega_p
    i3 = i3_closed_form(x, drive.delta, drive.rabi, rates.gamma_1, rates.gamma_2)
    return SPECTRUM_NORM * rates.gamma_r * i3.real


def incoherent_spectrum(omega_grid, drive: DriveConfig, rates: RateSet) -> Spectrum:
    """Incoherent PSD S_i(w) on ``omega_grid`` (absolute rad/s)."""
    w = _check_grid(omega_grid)
    return Spectrum(w, incoherent_psd(w, drive, rates))


def incoherent_flux(drive: DriveConfig, rates: RateSet) -> float:
    """Integral of S_i: gamma_r (s2 - |s1|^2)."""
    s1, s2 = steady_state_values(drive.delta, drive.rabi, rates.gamma_1, rates.gamma_2)
    return rates.gamma_r * (s2 - abs(s1) ** 2)


def lorentzian(x, center, hwhm, area):
    """Area-normalised Lorentzian."""
    return area / np.pi * hwhm / ((x - center) ** 2 + hwhm**2)


def triplet_psd(detuning, rabi, gamma_1, gamma_2, gamma_r):
    """Strong-drive three-Lorentzian spectrum versus detuning w - w_01."""
    g_s = 0.5 * (gamma_1 + gamma_2)
    return (lorentzian(detuning, 0.0, gamma_2, 0.25 * gamma_r)
            + lorentzian(detuning, -rabi, g_s, 0.125 * gamma_r)
            + lorentzian(detuning, rabi, g_s, 0.125 * gamma_r))


def mollow_triplet_approx(omega_grid, drive: DriveConfig, rates: RateSet,
                          validity=TRIPLET_VALIDITY) -> Spectrum:
    """Resonant strong-drive approximation of the incoherent spectrum.

    Central line of half-width gamma_2 and weight gamma_r/4, sidebands at
    +-Omega of half-width (gamma_1 + gamma_2)/2 and weight gamma_r/8.
    """
    if drive.delta != 0:
        raise ValidityError("three-Lorentzian form requires a resonant pump")
    if not drive.rabi > validity * rates.gamma_2:
        raise ValidityError(f"Omega must exceed {validity} Gamma_2 for the triplet form")
    w = _check_grid(omega_grid)
    psd = triplet_psd(w - drive.omega_q, drive.rabi, rates.gamma_1, rates.gamma_2, rates.gamma_r)
    return Spectrum(w, psd)
