"""Cross-method rate table from one synthetic device.

Reflection runs first because the other methods take its gamma_r (and, for
the single-point method, gamma_2) as a reference. The remaining rows are
independent and run concurrently, capped by ``RATEFIT_THREADS``.
"""
from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import synth
from .estimators import (circle_fit, combine_rates, fit_complex_decay, fit_exponential_power,
                         fit_full_spectrum, fit_mollow_triplet, fit_scattering_powers,
                         pairwise_consistency, single_point_rates)
from .estimators.combine import RATE_NAMES, RateRecord
from .presets import METHODS, SCHEMA_VERSION
from .units import TWO_PI

CONSISTENCY_SIGMAS = 2.0
DYNAMICS_REPORT_SCALE = 1.96


def thread_cap(default=None) -> int:
    env = os.environ.get("RATEFIT_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return default or min(5, os.cpu_count() or 1)


def _pair(fit, name):
    return fit[name], fit.error(name)


def run_reflection(cfg, seed):
    data = synth.simulate_reflection(cfg, seed)
    fit = circle_fit(data.omega, data.r, data.sigma)
    rec = combine_rates({"gamma_r": _pair(fit, "gamma_r"), "gamma_2": _pair(fit, "gamma_2")},
                        method="Reflection")
    return rec, fit


def run_on_res_mt(cfg, seed, refs):
    spectrum = synth.simulate_spectra(cfg, "on_res_mt", seed)[0]
    fit = fit_mollow_triplet(spectrum)
    # gamma_1 and gamma_2 share the red and blue widths; keep their covariance
    fit = fit.add_derived("gamma_phi", fit["gamma_2"] - 0.5 * fit["gamma_1"],
                          {"gamma_2": 1.0, "gamma_1": -0.5}, unit="rad/s")
    rec = combine_rates({k: _pair(fit, k) for k in ("gamma_1", "gamma_2", "gamma_phi")},
                        gamma_r_ref=refs["gamma_r"], method="On-res.MT")
    return rec, fit


def run_off_res_mt(cfg, seed, refs):
    spectra = synth.simulate_spectra(cfg, "off_res_mt", seed)
    drives = synth.spectrum_drives(cfg, "off_res_mt")
    gr = refs["gamma_r"][0]
    g2 = refs["gamma_2"][0]
    init = {"gamma_1": 2.0 * g2, "gamma_phi": 0.02 * g2,
            "omega": [d.rabi for d in drives], "delta": [d.delta for d in drives]}
    fit = fit_full_spectrum(spectra, gr, [d.omega_p for d in drives], init)
    rec = combine_rates({k: _pair(fit, k) for k in ("gamma_1", "gamma_phi", "gamma_2")},
                        gamma_r_ref=refs["gamma_r"], method="Off-res.MT")
    return rec, fit


def run_scattering(cfg, seed, refs=None):
    d = synth.simulate_powers(cfg, seed)
    fit = fit_scattering_powers(d.rabi, d.p_coh, d.p_incoh, d.p_loss, d.sigma_coh, d.sigma_incoh,
                                d.sigma_loss, rabi_rel_sigma=d.rabi_rel_sigma)
    rec = combine_rates({k: _pair(fit, k) for k in RATE_NAMES}, method="Scattering")
    rec.warnings.extend(fit.meta["inconsistent"])
    return rec, fit


def run_single_point(cfg, seed, refs):
    quarters = synth.simulate_single_point(cfg, seed)
    gr, g2 = refs["gamma_r"][0], refs["gamma_2"][0]
    est, err = [], []
    for q in quarters:
        r = single_point_rates(float(q.p_loss[0]), float(q.p_incoh[0]), float(q.rabi[0]),
                               gamma_r_ref=gr, gamma_2_ref=g2)
        est.append(r.gamma_n)
        s = 0.0 if q.sigma_loss is None else float(q.sigma_loss[0])
        err.append(2.0 * (1.0 + r.correction) * s)
    est = np.array(est)
    # one block's error, matching the block-to-block scatter it predicts
    sigma = float(np.sqrt(np.mean(np.square(err))))
    rec = combine_rates({"gamma_n": (float(est.mean()), sigma)},
                        references={"gamma_r": refs["gamma_r"], "gamma_2": refs["gamma_2"]},
                        method="SinglePoint")
    detail = {"quarters": est.tolist(), "quarter_std": float(est.std(ddof=1)) if est.size > 1
              else 0.0, "propagated_sigma": sigma}
    return rec, detail


def run_dynamics(cfg, seed, refs):
    ramsey = synth.simulate_dynamics(cfg, "ramsey", seed)
    power = synth.simulate_dynamics(cfg, "t1", seed)
    f2 = fit_complex_decay(ramsey)
    f1 = fit_exponential_power(power)
    rec = combine_rates({"gamma_2": _pair(f2, "gamma_2"), "gamma_1": _pair(f1, "gamma_1")},
                        gamma_r_ref=refs["gamma_r"], method="Dynamics",
                        report_scale=DYNAMICS_REPORT_SCALE)
    return rec, {"ramsey": f2, "power": f1}


RUNNERS = {
    "On-res.MT": run_on_res_mt,
    "Off-res.MT": run_off_res_mt,
    "Scattering": run_scattering,
    "SinglePoint": run_single_point,
    "Dynamics": run_dynamics,
}


def _guard(method, fn, *args):
    try:
        rec, detail = fn(*args)
        return rec, detail
    except Exception as exc:  # a failing row must not stop the table
        return RateRecord(method, failed=True, message=f"{type(exc).__name__}: {exc}"), None


def table1(cfg, seed=0, threads=None):
    """Run all six methods on the configured device.

    Returns
    -------
    rows : list of RateRecord
        In :data:`METHODS` order; failed rows carry ``failed=True``.
    details : dict
        Per-method fit objects.
    """
    refl, refl_fit = _guard("Reflection", run_reflection, cfg, seed)
    rows = {"Reflection": refl}
    details = {"Reflection": refl_fit}
    if refl.failed:
        for m in RUNNERS:
            rows[m] = RateRecord(m, failed=True, message="reference row Reflection failed")
    else:
        refs = {"gamma_r": (refl.values["gamma_r"], refl.errors["gamma_r"]),
                "gamma_2": (refl.values["gamma_2"], refl.errors["gamma_2"])}
        n = threads or thread_cap()
        if n <= 1:
            results = {m: _guard(m, fn, cfg, seed, refs) for m, fn in RUNNERS.items()}
        else:
            with ThreadPoolExecutor(max_workers=n) as pool:
                futs = {m: pool.submit(_guard, m, fn, cfg, seed, refs) for m, fn in RUNNERS.items()}
                results = {m: f.result() for m, f in futs.items()}
        for m, (rec, det) in results.items():
            rows[m] = rec
            details[m] = det
    return [rows[m] for m in METHODS], details


def report(rows, cfg, seed) -> dict:
    """JSON-ready table: values and reported errors in Hz."""
    violations = pairwise_consistency(rows, CONSISTENCY_SIGMAS)
    out_rows = []
    for r in rows:
        entry = {"method": r.method, "failed": r.failed, "message": r.message,
                 "confidence": 0.95 if r.report_scale == DYNAMICS_REPORT_SCALE else 0.683,
                 "values_hz": {}, "errors_hz": {}, "one_sigma_hz": {}, "source": {},
                 "warnings": list(r.warnings)}
        if not r.failed:
            for n in r.shown:
                entry["values_hz"][n] = r.values[n] / TWO_PI
                entry["errors_hz"][n] = r.report_scale * r.errors[n] / TWO_PI
                entry["one_sigma_hz"][n] = r.errors[n] / TWO_PI
                entry["source"][n] = r.source[n]
        out_rows.append(entry)
    return {
        "schema_version": SCHEMA_VERSION,
        "seed": int(seed),
        "device": dict(cfg["device"]),
        "noisy": bool(cfg.get("noisy", True)),
        "rows": out_rows,
        "consistency": {
            "n_sigma": CONSISTENCY_SIGMAS,
            "consistent": not violations,
            "violations": [{"a": a, "b": b, "quantity": q, "z": z} for a, b, q, z in violations],
        },
        "any_failed": any(r.failed for r in rows),
    }


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=True) + "\n"
