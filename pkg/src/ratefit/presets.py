"""Default device and experiment settings (cyclic Hz at this boundary).

Averaging counts are calibrated so that each method's one-sigma fit errors
land near the error bars quoted for the corresponding measurement; the noise
model itself is the minimal white-floor model of :mod:`ratefit.chain`.
"""
from __future__ import annotations

import copy

SCHEMA_VERSION = 1

DEFAULT_CONFIG = {
    "schema_version": SCHEMA_VERSION,
    "noisy": True,
    "device": {
        "gamma_r_hz": 227e3,
        "gamma_n_hz": 48e3,
        "gamma_phi_hz": 3e3,
        "ej_max_hz": 16.56e9,
        "ec_hz": 0.252e9,
        "flux": 0.0,
    },
    "chain": {
        "attenuation_db": -145.0,
        "gain_db": 115.0,
        "noise_photons": 49.0,
    },
    "reflection": {
        "span_hz": 1.5e6,
        "n_points": 201,
        "probe_flux": 1.0e4,
        "bandwidth_hz": 1.0e3,
        "n_avg": 2.0e3,
    },
    "spectrum": {
        "rabi_hz": 9.0e6,
        "detuning_hz": 0.0,
        "span_hz": 30.0e6,
        "n_points": 1201,
        "n_avg": 1.0e9,
    },
    "on_res_mt": {
        "rabi_hz": 9.0e6,
        "detuning_hz": 0.0,
        "span_hz": 30.0e6,
        "n_points": 1201,
        "n_avg": 2.0e7,
        "forward": "exact",
    },
    "off_res_mt": {
        "rabi_hz": 1.41e6,
        "detuning_hz": -790e3,
        "span_hz": 8.0e6,
        "n_points": 801,
        "n_avg": 5.5e6,
    },
    "powers": {
        "rabi_min_hz": 20e3,
        "rabi_max_hz": 3.0e6,
        "n_points": 60,
        "bandwidth_hz": 5.0e6,
        "n_avg": 4.0e8,
        "rabi_rel_sigma": 0.004,
    },
    "single_point": {
        "rabi_hz": 1119e3,
        "n_quarters": 4,
        "bandwidth_hz": 5.0e6,
        "n_avg": 1.0e9,
    },
    "dynamics": {
        "protocol": "ramsey",
        "detuning_hz": 125e3,
        "dt_s": 50e-9,
        "n_samples": 240,
        "n_traces": 975,
        "n_avg_trace": 3.8e4,
        "n_avg_power": 8.0e8,
        "freq_jitter_hz": 0.0,
        "rate_jitter_hz": 0.0,
        "interval_s": 420.0,
    },
    # references for the fit subcommands; null falls back to the device or experiment block
    "fit": {
        "gamma_r_ref_hz": None,
        "gamma_2_ref_hz": None,
        "gamma_phi_hz": 0.0,
        "rabi_rel_sigma": None,
        "saturation_correction": True,
    },
}

#: Table rows, in output order.
METHODS = ("Reflection", "On-res.MT", "Off-res.MT", "Scattering", "SinglePoint", "Dynamics")


def default_config() -> dict:
    return copy.deepcopy(DEFAULT_CONFIG)


def merge(base: dict, override: dict) -> dict:
    """Recursive dict merge; ``override`` wins."""
    out = copy.deepcopy(base)
    for k, v in override.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out
