"""Power budget of a resonantly driven qubit at a mirror (photon-flux units)."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..exceptions import UndefinedRatioError, ValidityError
from .rates import RateSet


@dataclass(frozen=True)
class PowerBudget:
    p_in: float
    p_coh: float
    p_incoh: float
    p_loss: float

    @property
    def p_out(self):
        return self.p_coh + self.p_incoh

    def closure(self):
        """p_in - p_coh - p_incoh - p_loss (zero up to rounding)."""
        return self.p_in - self.p_coh - self.p_incoh - self.p_loss


def power_curves(rabi, gamma_r, gamma_n, gamma_phi):
    """Vectorised (p_in, p_coh, p_incoh, p_loss) versus Rabi amplitude."""
    w2 = np.asarray(rabi, dtype=float) ** 2
    g1 = gamma_r + gamma_n
    g2 = 0.5 * g1 + gamma_phi
    x = w2 + g1 * g2
    p_in = w2 / (4.0 * gamma_r)
    p_coh = p_in * (1.0 - g1 * gamma_r / x) ** 2
    p_incoh = 0.5 * gamma_r * w2 * (g1 * gamma_phi + w2) / x**2
    p_loss = gamma_n * w2 / (2.0 * x)
    return p_in, p_coh, p_incoh, p_loss


def power_balance(rabi: float, rates: RateSet) -> PowerBudget:
    """Input, coherent, incoherent and lost photon flux at resonance."""
    if rabi < 0 or not np.isfinite(rabi):
        raise ValueError("rabi must be finite and >= 0")
    if rates.gamma_r == 0:
        if rabi > 0:
            raise UndefinedRatioError("input flux undefined for gamma_r = 0")
        return PowerBudget(0.0, 0.0, 0.0, 0.0)
    if rabi == 0:
        return PowerBudget(0.0, 0.0, 0.0, 0.0)
    vals = power_curves(rabi, rates.gamma_r, rates.gamma_n, rates.gamma_phi)
    return PowerBudget(*(float(v) for v in vals))


@dataclass(frozen=True)
class RegionBoundaries:
    omega_sat: float
    omega_low: float
    gamma_n_crit: float
    omega_dip: float | None

    @property
    def has_dip(self):
        return self.omega_dip is not None


def region_boundaries(rates: RateSet) -> RegionBoundaries:
    """Rabi amplitudes separating the low, intermediate and saturated regimes.

    ``omega_dip`` is where coherent reflection vanishes; it exists only for
    gamma_r > gamma_2 and is ``None`` otherwise.
    """
    g_r, g_n = rates.gamma_r, rates.gamma_n
    g1, g2 = rates.gamma_1, rates.gamma_2
    if g_r <= 0 or g2 <= 0:
        raise ValidityError("region boundaries need gamma_r > 0 and gamma_2 > 0")
    omega_sat = (1.0 + 1.0 / math.sqrt(2.0)) * g_r
    omega_low = math.sqrt(g1 * g2 * g_n / g_r)
    gamma_n_crit = g1 * (g_r - g2) ** 2 / (2.0 * g_r * g2)
    omega_dip = math.sqrt(g1 * (g_r - g2)) if g_r > g2 else None
    return RegionBoundaries(omega_sat, omega_low, gamma_n_crit, omega_dip)
