"""Bloch equations in the pump frame: steady state and reflection."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..exceptions import DegenerateParameterError, ValidityError
from .rates import DriveConfig, RateSet

POSITIVITY_SLACK = 1e-10


@dataclass(frozen=True)
class BlochVector:
    """Coherence s1 = rho_10 and excited population s2 = rho_11."""

    s1: complex
    s2: float

    def __post_init__(self):
        s1 = complex(self.s1)
        s2 = float(np.real(self.s2))
        if not (-POSITIVITY_SLACK <= s2 <= 1 + POSITIVITY_SLACK):
            raise ValueError(f"population s2={s2} outside [0, 1]")
        if abs(s1) ** 2 > s2 * (1 - s2) + POSITIVITY_SLACK:
            raise ValueError(f"|s1|^2={abs(s1) ** 2:.3g} exceeds s2(1-s2)={s2 * (1 - s2):.3g}")
        object.__setattr__(self, "s1", s1)
        object.__setattr__(self, "s2", s2)

    @classmethod
    def ground(cls):
        return cls(0j, 0.0)

    def as_state(self) -> np.ndarray:
        """State vector (s1, s1*, s2) used by the equations of motion."""
        return np.array([self.s1, np.conj(self.s1), self.s2], dtype=complex)

    @classmethod
    def from_state(cls, y):
        return cls(complex(y[0]), float(np.real(y[2])))

    @property
    def sz(self) -> float:
        return 2.0 * self.s2 - 1.0


def bloch_matrix(delta, rabi, gamma_1, gamma_2):
    """Drift matrix M and inhomogeneity B of d/dt (s1, s1*, s2) = M s + B."""
    m = np.array(
        [
            [1j * delta - gamma_2, 0.0, 1j * rabi],
            [0.0, -1j * delta - gamma_2, -1j * rabi],
            [0.5j * rabi, -0.5j * rabi, -gamma_1],
        ],
        dtype=complex,
    )
    b = np.array([-0.5j * rabi, 0.5j * rabi, 0.0], dtype=complex)
    return m, b


def _denominator(delta, rabi, g1, g2):
    return rabi**2 * g2 + g1 * (delta**2 + g2**2)


def steady_state_values(delta, rabi, g1, g2):
    """Stationary (s1, s2); works elementwise on arrays."""
    den = _denominator(delta, rabi, g1, g2)
    if np.any(den == 0):
        raise DegenerateParameterError("Omega^2 Gamma_2 + Gamma_1 (Delta^2 + Gamma_2^2) = 0")
    s1 = rabi * g1 * (delta - 1j * g2) / (2.0 * den)
    s2 = rabi**2 * g2 / (2.0 * den)
    return s1, s2


def steady_state(drive: DriveConfig, rates: RateSet) -> BlochVector:
    s1, s2 = steady_state_values(drive.delta, drive.rabi, rates.gamma_1, rates.gamma_2)
    return BlochVector(s1, s2)


def reflection_coefficient(drive: DriveConfig, rates: RateSet, mode="full",
                           delta=None):
    """Complex reflection coefficient of the qubit-terminated line.

    ``mode`` is ``"full"`` (any drive), ``"weak_probe"`` (Omega ignored) or
    ``"resonant"`` (requires Delta = 0). ``delta`` overrides the drive
    detuning and may be an array, which is how frequency sweeps are done.
    """
    d = drive.delta if delta is None else np.asarray(delta, dtype=float)
    g_r, g1, g2 = rates.gamma_r, rates.gamma_1, rates.gamma_2
    w = drive.rabi
    if mode == "full":
        den = _denominator(d, w, g1, g2)
        if np.any(den == 0):
            raise DegenerateParameterError("reflection denominator vanishes")
        return 1.0 - 1j * g_r * g1 * (d - 1j * g2) / den
    if mode == "weak_probe":
        den = d + 1j * g2
        if np.any(den == 0):
            raise DegenerateParameterError("weak-probe reflection needs Gamma_2 > 0 or Delta != 0")
        return 1.0 - 1j * g_r / den
    if mode == "resonant":
        if np.any(d != 0):
            raise ValidityError("resonant mode requires Delta = 0")
        if g_r == 0:
            return 1.0 + 0j
        den = w**2 / (g1 * g_r) + g2 / g_r
        if den == 0:
            raise DegenerateParameterError("resonant reflection denominator vanishes")
        return complex(1.0 - 1.0 / den)
    raise ValueError(f"unknown mode {mode!r}")


def weak_probe_circle(rates: RateSet):
    """Centre (on the real axis) and radius traced by the weak-probe r(Delta)."""
    d = rates.gamma_r / rates.gamma_2
    return 1.0 - 0.5 * d, 0.5 * d
