"""Decay-rate bookkeeping and drive parameters."""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from ..exceptions import UndefinedRatioError
from ..units import TWO_PI


@dataclass(frozen=True)
class RateSet:
    """Radiative, non-radiative and pure-dephasing rates in rad/s.

    ``gamma_1`` and ``gamma_2`` are always derived, never stored. The optional
    ``sigma_*`` fields hold one-sigma uncertainties (rad/s).
    """

    gamma_r: float
    gamma_n: float
    gamma_phi: float
    sigma_r: Optional[float] = None
    sigma_n: Optional[float] = None
    sigma_phi: Optional[float] = None

    def __post_init__(self):
        for name in ("gamma_r", "gamma_n", "gamma_phi"):
            value = getattr(self, name)
            if not np.isfinite(value) or value < 0:
                raise ValueError(f"{name} must be finite and >= 0, got {value!r}")
            object.__setattr__(self, name, float(value))
        for name in ("sigma_r", "sigma_n", "sigma_phi"):
            value = getattr(self, name)
            if value is not None and (not np.isfinite(value) or value < 0):
                raise ValueError(f"{name} must be finite and >= 0, got {value!r}")

    @classmethod
    def from_hz(cls, gamma_r, gamma_n, gamma_phi, **sigmas_hz):
        """Build from cyclic rates Gamma/2pi in Hz."""
        sig = {k: (None if v is None else TWO_PI * v) for k, v in sigmas_hz.items()}
        return cls(TWO_PI * gamma_r, TWO_PI * gamma_n, TWO_PI * gamma_phi, **sig)

    @property
    def gamma_1(self) -> float:
        return self.gamma_r + self.gamma_n

    @property
    def gamma_2(self) -> float:
        return 0.5 * self.gamma_1 + self.gamma_phi

    @property
    def beta(self) -> float:
        if self.gamma_1 == 0:
            raise UndefinedRatioError("beta undefined for gamma_r + gamma_n = 0")
        return self.gamma_r / self.gamma_1

    @property
    def purcell(self) -> float:
        """Gamma_r / (Gamma_n + 2 Gamma_phi); infinite for a lossless,
        dephasing-free emitter."""
        if self.gamma_1 == 0:
            raise UndefinedRatioError("Purcell factor undefined for gamma_r + gamma_n = 0")
        den = self.gamma_n + 2.0 * self.gamma_phi
        return self.gamma_r / den if den > 0 else float("inf")

    def to_hz(self) -> dict:
        return {
            "gamma_r_hz": self.gamma_r / TWO_PI,
            "gamma_n_hz": self.gamma_n / TWO_PI,
            "gamma_phi_hz": self.gamma_phi / TWO_PI,
        }

    def scaled(self, k: float) -> "RateSet":
        return replace(self, gamma_r=k * self.gamma_r, gamma_n=k * self.gamma_n,
                       gamma_phi=k * self.gamma_phi)


@dataclass(frozen=True)
class DriveConfig:
    """Qubit and pump angular frequencies plus Rabi amplitude (all rad/s).

    ``delta`` is ``omega_p - omega_q``: negative when the pump sits below the
    qubit.
    """

    omega_q: float
    omega_p: float
    rabi: float = 0.0

    def __post_init__(self):
        if not self.omega_q > 0:
            raise ValueError(f"omega_q must be > 0, got {self.omega_q!r}")
        if not (np.isfinite(self.rabi) and self.rabi >= 0):
            raise ValueError(f"rabi must be >= 0, got {self.rabi!r}")
        if not np.isfinite(self.omega_p):
            raise ValueError("omega_p must be finite")

    @property
    def delta(self) -> float:
        return self.omega_p - self.omega_q

    @classmethod
    def from_detuning(cls, omega_q, delta, rabi=0.0):
        return cls(omega_q=omega_q, omega_p=omega_q + delta, rabi=rabi)

    @classmethod
    def from_hz(cls, f01, detuning=0.0, rabi=0.0):
        return cls.from_detuning(TWO_PI * f01, TWO_PI * detuning, TWO_PI * rabi)

    def with_rabi(self, rabi) -> "DriveConfig":
        return replace(self, rabi=rabi)


def derive_rates(rates: RateSet) -> dict:
    """Total relaxation/decoherence rates, beta factor and Purcell factor.

    Raises :class:`UndefinedRatioError` when a ratio has a vanishing
    denominator.
    """
    return {
        "gamma_1": rates.gamma_1,
        "gamma_2": rates.gamma_2,
        "beta": rates.beta,
        "purcell": rates.purcell,
    }
