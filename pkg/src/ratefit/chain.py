"""Synthetic measurement chain: dB bookkeeping, white noise floor, averaging
and slow-drift ensembles.

Noise model: each output point gets independent zero-mean Gaussian noise with
standard deviation (signal + floor) / sqrt(n_avg). The floor comes from the
system noise ``noise_photons`` (photons per second per Hz of bandwidth). For
a PSD in photons/s per rad/s it is N / 2pi; for a sampled trace it is set by
the sample bandwidth 1/dt.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from .dynamics import ComplexTrace
from .qed.rates import RateSet
from .qed.spectrum import Spectrum
from .units import TWO_PI, dbm_to_photon_flux, photon_flux_to_dbm, scale_by_db

__all__ = [
    "ChainConfig", "DriftDraw", "DriftEnsemble", "dbm_to_photon_flux", "detected_flux",
    "drift_ensemble", "photon_flux_to_dbm", "qubit_power_dbm", "stream_rng",
    "synthesize_noisy_coherent_power", "synthesize_noisy_powers", "synthesize_noisy_psd", "synthesize_noisy_reflection",
    "synthesize_noisy_trace",
]


@dataclass(frozen=True)
class ChainConfig:
    """Input attenuation and output gain (dB), system noise N and averaging."""

    attenuation_db: float = -145.0
    gain_db: float = 115.0
    noise_photons: float = 49.0
    n_avg: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if not self.n_avg >= 1:
            raise ValueError(f"n_avg must be >= 1, got {self.n_avg!r}")
        if not self.noise_photons >= 0:
            raise ValueError(f"noise_photons must be >= 0, got {self.noise_photons!r}")
        if not (np.isfinite(self.attenuation_db) and np.isfinite(self.gain_db)):
            raise ValueError("attenuation_db and gain_db must be finite")

    def with_averages(self, n_avg) -> "ChainConfig":
        return replace(self, n_avg=n_avg)


def stream_rng(seed, index=None) -> np.random.Generator:
    """Generator for stream ``index`` of ``seed``.

    Streams are keyed by (seed, index), so traces drawn in parallel match a
    serial run. ``index`` may be an int or a tuple of ints.
    """
    if index is None:
        key = ()
    elif np.ndim(index) == 0:
        key = (int(index),)
    else:
        key = tuple(int(i) for i in index)
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=key))


def qubit_power_dbm(source_dbm, chain: ChainConfig):
    """Power reaching the qubit after the input line."""
    return np.asarray(source_dbm, dtype=float) + chain.attenuation_db


def detected_flux(flux, chain: ChainConfig):
    """Photon flux at the digitizer after the output gain."""
    return scale_by_db(flux, chain.gain_db)


def synthesize_noisy_psd(clean: Spectrum, chain: ChainConfig, stream=None) -> Spectrum:
    """Background-subtracted PSD estimate with per-point sigma.

    The floor N / 2pi is the white system noise expressed per unit angular
    frequency; it raises the variance but not the mean, since the measured
    background is subtracted.
    """
    floor = chain.noise_photons / TWO_PI
    sigma = (np.abs(clean.psd) + floor) / np.sqrt(chain.n_avg)
    rng = stream_rng(chain.seed, stream)
    noisy = clean.psd + sigma * rng.standard_normal(clean.psd.shape)
    return Spectrum(clean.omega_grid, noisy, sigma)


def synthesize_noisy_trace(clean: ComplexTrace, chain: ChainConfig, stream=None) -> ComplexTrace:
    """Add white noise to an emission record.

    Amplitude traces get circular complex noise with E|n|^2 = N B / n_avg,
    B = 1/dt; ``sigma`` then holds sqrt(E|n|^2). Power traces get real noise
    with sigma = (P + N B) / sqrt(n_avg).
    """
    dt = clean.dt
    bandwidth = 1.0 / dt if dt > 0 else 0.0
    floor = chain.noise_photons * bandwidth
    rng = stream_rng(chain.seed, stream)
    shape = clean.values.shape
    if clean.role == "amplitude":
        sigma = np.full(shape, np.sqrt(floor / chain.n_avg))
        noise = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * (sigma / np.sqrt(2.0))
    else:
        sigma = (np.abs(clean.values) + floor) / np.sqrt(chain.n_avg)
        noise = sigma * rng.standard_normal(shape)
    return ComplexTrace(clean.t_grid, clean.values + noise, sigma, role=clean.role)


@dataclass(frozen=True)
class DriftEnsemble:
    """Repetition structure of a long stability run."""

    n_traces: int
    interval_s: float = 420.0
    seed: int = 0

    def __post_init__(self):
        if int(self.n_traces) < 1:
            raise ValueError("n_traces must be >= 1")
        if not self.interval_s > 0:
            raise ValueError("interval_s must be > 0")

    @property
    def times(self):
        return self.interval_s * np.arange(self.n_traces)


DRIFT_STREAM = 1_000_003


class DriftDraw(NamedTuple):
    rates: RateSet
    delta_omega: float  # rad/s offset of the qubit frequency


def drift_ensemble(base: RateSet, freq_jitter_sigma, rate_jitter_sigma, spec: DriftEnsemble,
                   freq_center=0.0) -> list[DriftDraw]:
    """Independent Gaussian draws of (rates, frequency offset) per trace.

    Jitter sigmas and ``freq_center`` are cyclic (Hz). Each of gamma_r,
    gamma_n and gamma_phi is jittered independently and truncated at zero.
    """
    if freq_jitter_sigma < 0 or rate_jitter_sigma < 0:
        raise ValueError("jitter sigmas must be >= 0")
    base_vec = np.array([base.gamma_r, base.gamma_n, base.gamma_phi])
    out = []
    for i in range(int(spec.n_traces)):
        rng = stream_rng(spec.seed, (DRIFT_STREAM, i))
        z = rng.standard_normal(4)
        r = np.maximum(base_vec + TWO_PI * rate_jitter_sigma * z[:3], 0.0)
        dw = TWO_PI * (freq_center + freq_jitter_sigma * z[3])
        out.append(DriftDraw(RateSet(*r), float(dw)))
    return out


def synthesize_noisy_reflection(r, chain: ChainConfig, probe_flux, bandwidth_hz, stream=None):
    """Noisy reflection samples and their per-quadrature sigma.

    The output field carries circular noise of power N B / n_avg on top of a
    probe of ``probe_flux`` photons/s; dividing by the probe amplitude gives
    sigma = sqrt(N B / (2 n_avg probe_flux)) per quadrature.
    """
    r = np.asarray(r, dtype=complex)
    if not probe_flux > 0:
        raise ValueError("probe_flux must be positive")
    sigma = np.full(r.shape, np.sqrt(chain.noise_photons * bandwidth_hz
                                     / (2.0 * chain.n_avg * probe_flux)))
    rng = stream_rng(chain.seed, stream)
    noise = sigma * (rng.standard_normal(r.shape) + 1j * rng.standard_normal(r.shape))
    return r + noise, sigma


def synthesize_noisy_powers(p, chain: ChainConfig, bandwidth_hz, stream=None):
    """Noisy photon-flux readings with sigma = (P + N B) / sqrt(n_avg).

    Returns the noisy values and sigma. The floor N B is subtracted in the
    returned values (background-corrected readings).
    """
    p = np.asarray(p, dtype=float)
    sigma = (np.abs(p) + chain.noise_photons * bandwidth_hz) / np.sqrt(chain.n_avg)
    rng = stream_rng(chain.seed, stream)
    return p + sigma * rng.standard_normal(p.shape), sigma


def synthesize_noisy_coherent_power(p, chain: ChainConfig, bandwidth_hz, stream=None):
    """Coherent flux |<a>|^2 from an averaged field amplitude.

    The averaged amplitude sqrt(P) carries circular noise of power
    v = N B / n_avg; the reading |a|^2 - v is unbiased with sigma
    sqrt(2 P v + v^2).
    """
    p = np.asarray(p, dtype=float)
    v = chain.noise_photons * bandwidth_hz / chain.n_avg
    rng = stream_rng(chain.seed, stream)
    z = (rng.standard_normal(p.shape) + 1j * rng.standard_normal(p.shape)) * np.sqrt(v / 2.0)
    a = np.sqrt(np.maximum(p, 0.0)) + z
    return np.abs(a) ** 2 - v, np.sqrt(2.0 * np.abs(p) * v + v * v)
