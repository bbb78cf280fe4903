"""Synthetic experiments: forward model plus measurement chain, driven by a
resolved configuration (see :mod:`ratefit.presets`).

Each experiment draws its noise from its own (seed, stream) pair, so results
do not depend on the order or concurrency in which experiments run.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .chain import (ChainConfig, DriftEnsemble, drift_ensemble, stream_rng,
                    synthesize_noisy_coherent_power, synthesize_noisy_powers,
                    synthesize_noisy_psd, synthesize_noisy_reflection, synthesize_noisy_trace)
from .dynamics import ComplexTrace, ramsey_emission, t1_power_trace
from .qed.bloch import reflection_coefficient
from .qed.power import power_curves
from .qed.rates import DriveConfig, RateSet
from .qed.spectrum import Spectrum, incoherent_spectrum, mollow_triplet_approx
from .qed.transmon import transmon_frequency_array
from .units import TWO_PI

STREAMS = {"reflection": 0, "on_res_mt": 100, "off_res_mt": 200, "spectrum": 250,
           "powers": 300, "single_point": 400, "dynamics": 500, "ensemble": 10_000}


def device_rates(cfg) -> RateSet:
    d = cfg["device"]
    return RateSet.from_hz(d["gamma_r_hz"], d["gamma_n_hz"], d["gamma_phi_hz"])


def device_f01(cfg) -> float:
    d = cfg["device"]
    return float(transmon_frequency_array(d["ej_max_hz"], d["ec_hz"], d["flux"]))


def chain_for(cfg, n_avg, seed) -> ChainConfig:
    c = cfg["chain"]
    return ChainConfig(c["attenuation_db"], c["gain_db"], c["noise_photons"], n_avg, seed)


@dataclass
class ReflectionData:
    omega: np.ndarray
    r: np.ndarray
    sigma: Optional[np.ndarray]


def simulate_reflection(cfg, seed=0) -> ReflectionData:
    """Weak-probe reflection across the resonance (linear-response limit)."""
    b = cfg["reflection"]
    rates = device_rates(cfg)
    w01 = TWO_PI * device_f01(cfg)
    x = TWO_PI * np.linspace(-0.5, 0.5, int(b["n_points"])) * b["span_hz"]
    r = reflection_coefficient(DriveConfig(w01, w01), rates, mode="weak_probe", delta=x)
    sigma = None
    if cfg.get("noisy", True):
        chain = chain_for(cfg, b["n_avg"], seed)
        r, sigma = synthesize_noisy_reflection(r, chain, b["probe_flux"], b["bandwidth_hz"],
                                               STREAMS["reflection"])
    return ReflectionData(w01 + x, r, sigma)


def spectrum_drives(cfg, block):
    b = cfg[block]
    w01 = TWO_PI * device_f01(cfg)
    dets = np.atleast_1d(np.asarray(b["detuning_hz"], dtype=float))
    return [DriveConfig.from_detuning(w01, TWO_PI * d, TWO_PI * b["rabi_hz"]) for d in dets]


def simulate_spectra(cfg, block="spectrum", seed=0) -> list[Spectrum]:
    """Incoherent spectra on grids centred on the pump, one per detuning."""
    b = cfg[block]
    rates = device_rates(cfg)
    out = []
    for k, drive in enumerate(spectrum_drives(cfg, block)):
        grid = drive.omega_p + TWO_PI * np.linspace(-0.5, 0.5, int(b["n_points"])) * b["span_hz"]
        if b.get("forward", "exact") == "triplet":
            clean = mollow_triplet_approx(grid, drive, rates)
        else:
            clean = incoherent_spectrum(grid, drive, rates)
        if cfg.get("noisy", True):
            chain = chain_for(cfg, b["n_avg"], seed)
            clean = synthesize_noisy_psd(clean, chain, STREAMS.get(block, 250) + k)
        out.append(clean)
    return out


@dataclass
class PowerData:
    rabi: np.ndarray
    p_in: np.ndarray
    p_coh: np.ndarray
    p_incoh: np.ndarray
    p_loss: np.ndarray
    sigma_in: Optional[np.ndarray] = None
    sigma_coh: Optional[np.ndarray] = None
    sigma_incoh: Optional[np.ndarray] = None
    sigma_loss: Optional[np.ndarray] = None
    rabi_rel_sigma: float = 0.0  # relative one-sigma error of the Rabi axis


def _measured_powers(rabi, rates, chain, bandwidth, stream):
    """Measure P_in and P_out as powers and P_coh from the averaged field;
    derive P_incoh = P_out - P_coh and P_loss = P_in - P_out with
    independent-error sigmas."""
    p_in, p_coh, p_incoh, p_loss = power_curves(rabi, rates.gamma_r, rates.gamma_n,
                                                rates.gamma_phi)
    m_in, s_in = synthesize_noisy_powers(p_in, chain, bandwidth, stream)
    m_out, s_out = synthesize_noisy_powers(p_coh + p_incoh, chain, bandwidth, stream + 1)
    m_coh, s_coh = synthesize_noisy_coherent_power(p_coh, chain, bandwidth, stream + 2)
    return PowerData(rabi, m_in, m_coh, m_out - m_coh, m_in - m_out, s_in, s_coh,
                     np.hypot(s_out, s_coh), np.hypot(s_in, s_out))


def simulate_powers(cfg, seed=0) -> PowerData:
    """Power budget on a logarithmic Rabi grid (linear when it starts at 0),
    resonant drive."""
    b = cfg["powers"]
    rates = device_rates(cfg)
    if b["rabi_min_hz"] == 0:
        rabi = TWO_PI * np.linspace(0.0, b["rabi_max_hz"], int(b["n_points"]))
    else:
        rabi = TWO_PI * np.geomspace(b["rabi_min_hz"], b["rabi_max_hz"], int(b["n_points"]))
    if not cfg.get("noisy", True):
        return PowerData(rabi, *power_curves(rabi, rates.gamma_r, rates.gamma_n, rates.gamma_phi))
    chain = chain_for(cfg, b["n_avg"], seed)
    # the sweep's true drive differs from the nominal axis by one common factor
    rel = float(b.get("rabi_rel_sigma", 0.0))
    scale = 1.0 + rel * stream_rng(seed, STREAMS["powers"] + 3).standard_normal()
    out = _measured_powers(scale * rabi, rates, chain, b["bandwidth_hz"], STREAMS["powers"])
    out.rabi = rabi
    out.rabi_rel_sigma = rel
    return out


def simulate_single_point(cfg, seed=0) -> list[PowerData]:
    """One saturating drive measured in ``n_quarters`` independent blocks."""
    b = cfg["single_point"]
    rates = device_rates(cfg)
    rabi = np.array([TWO_PI * b["rabi_hz"]])
    out = []
    for q in range(int(b["n_quarters"])):
        if cfg.get("noisy", True):
            chain = chain_for(cfg, b["n_avg"], seed)
            out.append(_measured_powers(rabi, rates, chain, b["bandwidth_hz"],
                                        STREAMS["single_point"] + 3 * q))
        else:
            out.append(PowerData(rabi, *power_curves(rabi, rates.gamma_r, rates.gamma_n,
                                                     rates.gamma_phi)))
    return out


def _time_grid(b):
    return b["dt_s"] * np.arange(int(b["n_samples"]))


def _drift_draws(cfg, seed, rates):
    b = cfg["dynamics"]
    spec = DriftEnsemble(int(b["n_traces"]), b["interval_s"], seed)
    return drift_ensemble(rates, b["freq_jitter_hz"], b["rate_jitter_hz"], spec,
                          freq_center=b["detuning_hz"])


def simulate_dynamics(cfg, protocol=None, seed=0) -> ComplexTrace:
    """Averaged free-decay record.

    ``ramsey``: field amplitude sqrt(gamma_r) <sigma_-> after a pi/2 pulse,
    averaged over all repetitions (including drift when configured).
    ``t1``: emitted photon flux after a pi pulse.
    """
    b = cfg["dynamics"]
    protocol = protocol or b.get("protocol", "ramsey")
    rates = device_rates(cfg)
    t = _time_grid(b)
    n_avg = b["n_avg_trace"] * b["n_traces"]
    if protocol == "ramsey":
        if b["freq_jitter_hz"] > 0 or b["rate_jitter_hz"] > 0:
            draws = _drift_draws(cfg, seed, rates)
            vals = np.mean([ramsey_emission(d.delta_omega, d.rates, t,
                                            scale=np.sqrt(d.rates.gamma_r)).values
                            for d in draws], axis=0)
            clean = ComplexTrace(t, vals)
        else:
            clean = ramsey_emission(TWO_PI * b["detuning_hz"], rates, t,
                                    scale=np.sqrt(rates.gamma_r))
        stream = STREAMS["dynamics"]
    elif protocol == "t1":
        clean = t1_power_trace(rates, t, initial_sz=1.0)
        n_avg = b["n_avg_power"]
        stream = STREAMS["dynamics"] + 1
    else:
        raise ValueError(f"unknown dynamics protocol {protocol!r}")
    if not cfg.get("noisy", True):
        return clean
    return synthesize_noisy_trace(clean, chain_for(cfg, n_avg, seed), stream)


def simulate_ramsey_ensemble(cfg, seed=0) -> list[ComplexTrace]:
    """Single noisy Ramsey traces, one per drift draw."""
    b = cfg["dynamics"]
    rates = device_rates(cfg)
    t = _time_grid(b)
    chain = chain_for(cfg, b["n_avg_trace"], seed)
    out = []
    for i, d in enumerate(_drift_draws(cfg, seed, rates)):
        clean = ramsey_emission(d.delta_omega, d.rates, t, scale=np.sqrt(d.rates.gamma_r))
        out.append(synthesize_noisy_trace(clean, chain, STREAMS["ensemble"] + i)
                   if cfg.get("noisy", True) else clean)
    return out
