"""Estimator round trips on synthetic data."""

import numpy as np
import pytest

from ratefit import synth
from ratefit.chain import ChainConfig, synthesize_noisy_trace
from ratefit.dynamics import ComplexTrace, ramsey_emission, t1_power_trace
from ratefit.estimators import (algebraic_circle, circle_fit, find_triplet_peaks,
                                fit_complex_decay, fit_exponential_power, fit_flux_arch,
                                fit_full_spectrum, fit_gaussian_histogram, fit_mollow_triplet,
                                fit_rabi_calibration, fit_scattering_powers, full_spectrum_model,
                                integrated_weights, single_point_rates)
from ratefit.exceptions import (AliasingError, DegenerateGeometryError, DegenerateSampleError,
                                FitWarning, SaturationError, ValidityError)
from ratefit.presets import merge
from ratefit.qed.bloch import reflection_coefficient
from ratefit.qed.power import power_curves
from ratefit.qed.rates import DriveConfig, RateSet
from ratefit.qed.spectrum import incoherent_spectrum, mollow_triplet_approx
from ratefit.qed.transmon import rabi_from_power, transmon_frequency_array

from conftest import KHZ, TWO_PI


# ---------------------------------------------------------------- reflection

def weak_probe(rates, w01, span=1.5e6, n=201):
    x = TWO_PI * np.linspace(-0.5, 0.5, n) * span
    return w01 + x, reflection_coefficient(DriveConfig(w01, w01), rates, mode="weak_probe",
                                           delta=x)


def test_circle_fit_exact(w01):
    rates = RateSet(KHZ * 227, 0.0, KHZ * (141 - 113.5))
    omega, r = weak_probe(rates, w01)
    fit = circle_fit(omega, r)
    assert fit["gamma_r"] == pytest.approx(rates.gamma_r, rel=1e-9)
    assert fit["gamma_2"] == pytest.approx(rates.gamma_2, rel=1e-9)
    assert fit["omega_01"] == pytest.approx(w01, rel=1e-15)


def test_circle_through_unity_with_diameter_two(w01):
    # lossless, dephasing-free: the circle through r = 1 has diameter 2
    rates = RateSet(KHZ * 200, 0.0, 0.0)
    omega, r = weak_probe(rates, w01)
    c, rad = algebraic_circle(r)
    assert abs(c) == pytest.approx(0.0, abs=1e-9) and 2 * rad == pytest.approx(2.0)
    fit = circle_fit(omega, r)
    assert fit["gamma_r"] == pytest.approx(2 * fit["gamma_2"], rel=1e-9)


def test_circle_collinear_degenerate():
    z = np.linspace(-1, 1, 20) * (1 + 1j)
    with pytest.raises(DegenerateGeometryError):
        algebraic_circle(z)
    with pytest.raises(DegenerateGeometryError):
        algebraic_circle(np.ones(5))
    with pytest.raises(ValueError):
        circle_fit(np.arange(3.0), np.ones(3))


def test_circle_fit_at_configured_noise(cfg):
    d = synth.simulate_reflection(cfg, seed=0)
    fit = circle_fit(d.omega, d.r, d.sigma)
    assert fit["gamma_r"] / KHZ == pytest.approx(227, abs=3 * fit.error("gamma_r") / KHZ)
    assert fit["gamma_2"] / KHZ == pytest.approx(140.5, abs=3 * fit.error("gamma_2") / KHZ)
    assert 0.5 < fit.error("gamma_r") / KHZ < 2.0
    assert 0.5 < fit.error("gamma_2") / KHZ < 2.0


# ---------------------------------------------------------------- triplet

def triplet_spectrum(rates, w01, forward="triplet", rabi=9e6):
    drive = DriveConfig.from_detuning(w01, 0.0, TWO_PI * rabi)
    grid = w01 + TWO_PI * np.linspace(-15e6, 15e6, 1201)
    f = mollow_triplet_approx if forward == "triplet" else incoherent_spectrum
    return f(grid, drive, rates), drive


@pytest.mark.parametrize("joint", [False, True])
def test_triplet_self_consistency(table_rates, w01, joint):
    sp, drive = triplet_spectrum(table_rates, w01)
    fit = fit_mollow_triplet(sp, joint=joint)
    assert fit["gamma_2"] == pytest.approx(table_rates.gamma_2, rel=1e-8)
    assert fit["gamma_1"] == pytest.approx(table_rates.gamma_1, rel=1e-8)
    assert fit["omega"] == pytest.approx(drive.rabi, rel=1e-8)
    gr = table_rates.gamma_r
    assert fit["area_center"] / gr == pytest.approx(0.25, rel=1e-8)
    assert fit["area_red"] / gr == pytest.approx(0.125, rel=1e-8)


def test_triplet_weights_exact_spectrum(table_rates, w01):
    sp, _ = triplet_spectrum(table_rates, w01, forward="exact")
    fit = fit_mollow_triplet(sp)
    w = np.array([fit["area_center"], fit["area_red"], fit["area_blue"]]) / table_rates.gamma_r
    assert np.allclose(w, [0.25, 0.125, 0.125], atol=0.005)
    split = integrated_weights(sp, [w01 - fit["omega"], w01, w01 + fit["omega"]],
                               table_rates.gamma_r)
    assert sum(split) == pytest.approx(sum(w), rel=0.05)


def test_triplet_at_configured_noise(cfg):
    sp = synth.simulate_spectra(cfg, "on_res_mt", seed=0)[0]
    fit = fit_mollow_triplet(sp)
    assert fit["gamma_2"] / KHZ == pytest.approx(140.5, abs=3 * fit.error("gamma_2") / KHZ)
    assert fit["gamma_1"] / KHZ == pytest.approx(275, abs=3 * fit.error("gamma_1") / KHZ)
    assert fit.error("gamma_2") / KHZ < 4.0 and fit.error("gamma_1") / KHZ < 14.0


def test_triplet_peak_finding_errors(table_rates, w01):
    drive = DriveConfig.from_detuning(w01, 0.0, table_rates.gamma_2)
    grid = w01 + TWO_PI * np.linspace(-2e6, 2e6, 401)
    sp = incoherent_spectrum(grid, drive, table_rates)
    with pytest.raises(ValidityError):
        fit_mollow_triplet(sp)
    x = np.linspace(-1, 1, 101)
    with pytest.raises(ValidityError):
        find_triplet_peaks(x, np.exp(-x**2 / 0.01))


def test_peak_tie_breaks_low():
    x = np.linspace(-10, 10, 201)
    y = np.exp(-x**2) + 0.3 * (np.exp(-(x - 6) ** 2) + np.exp(-(x + 6) ** 2))
    ir, i0, ib = find_triplet_peaks(x, y, smooth=1)
    assert x[ir] == pytest.approx(-6) and x[ib] == pytest.approx(6) and x[i0] == 0


# ---------------------------------------------------------------- full spectrum

def full_init(rates, drives, scale=1.0):
    return {"gamma_1": scale * rates.gamma_1, "gamma_phi": scale * max(rates.gamma_phi, KHZ),
            "omega": [scale * d.rabi for d in drives], "delta": [scale * d.delta for d in drives]}


@pytest.mark.parametrize("scale", [0.8, 1.2])
def test_full_spectrum_noiseless(w01, scale):
    rates = RateSet.from_hz(227e3, 48e3, 7e3)
    drives = [DriveConfig.from_detuning(w01, KHZ * -790, TWO_PI * 1.41e6)]
    grid = drives[0].omega_p + TWO_PI * np.linspace(-4e6, 4e6, 801)
    sp = incoherent_spectrum(grid, drives[0], rates)
    fit = fit_full_spectrum(sp, rates.gamma_r, drives[0].omega_p, full_init(rates, drives, scale))
    assert fit["gamma_1"] == pytest.approx(rates.gamma_1, rel=1e-8)
    assert fit["gamma_phi"] == pytest.approx(rates.gamma_phi, rel=1e-6)
    assert fit["omega"] == pytest.approx(drives[0].rabi, rel=1e-8)
    assert fit["delta"] == pytest.approx(drives[0].delta, rel=1e-8)
    assert fit["gamma_2"] == pytest.approx(rates.gamma_2, rel=1e-8)


def test_full_spectrum_model_matches_forward(table_rates, w01):
    drive = DriveConfig.from_detuning(w01, KHZ * 300, TWO_PI * 1e6)
    x = TWO_PI * np.linspace(-3e6, 3e6, 51)
    ref = incoherent_spectrum(drive.omega_p + x, drive, table_rates).psd
    got = full_spectrum_model(x, table_rates.gamma_1, table_rates.gamma_phi, table_rates.gamma_r,
                              drive.rabi, drive.delta)
    assert np.allclose(got, ref, rtol=1e-12)


def test_full_spectrum_at_configured_noise(cfg):
    rates = synth.device_rates(cfg)
    drives = synth.spectrum_drives(cfg, "off_res_mt")
    spectra = synth.simulate_spectra(cfg, "off_res_mt", seed=0)
    fit = fit_full_spectrum(spectra, rates.gamma_r, [d.omega_p for d in drives],
                            full_init(rates, drives, 1.1))
    assert fit["gamma_1"] / KHZ == pytest.approx(275, abs=3 * fit.error("gamma_1") / KHZ)
    assert 3.0 < fit.error("gamma_1") / KHZ < 12.0
    assert 1.5 < fit.error("gamma_phi") / KHZ < 6.0


def test_two_detuning_shared_dephasing(cfg):
    c = merge(cfg, {"device": {"gamma_phi_hz": 7e3},
                    "off_res_mt": {"detuning_hz": [-825e3, 825e3]}})
    rates = synth.device_rates(c)
    drives = synth.spectrum_drives(c, "off_res_mt")
    fits = []
    for seed in range(8):
        spectra = synth.simulate_spectra(c, "off_res_mt", seed)
        fits.append(fit_full_spectrum(spectra, rates.gamma_r, [d.omega_p for d in drives],
                                      full_init(rates, drives, 1.1)))
    phi = np.array([f["gamma_phi"] for f in fits]) / KHZ
    err = np.array([f.error("gamma_phi") for f in fits]) / KHZ
    assert "delta_1" in fits[0].names and fits[0].meta["shared"] == ["gamma_1", "gamma_phi"]
    assert phi.mean() == pytest.approx(7.0, abs=3 * err.mean() / np.sqrt(phi.size))
    assert 1.0 < err.mean() < 3.0


# ---------------------------------------------------------------- powers

def test_scattering_noiseless():
    rates = RateSet.from_hz(229e3, 49e3, 1e3)
    rabi = KHZ * np.geomspace(20, 3000, 60)
    _, p_coh, p_incoh, p_loss = power_curves(rabi, rates.gamma_r, rates.gamma_n, rates.gamma_phi)
    fit = fit_scattering_powers(rabi, p_coh, p_incoh, p_loss)
    for name, true in (("gamma_r", rates.gamma_r), ("gamma_n", rates.gamma_n),
                       ("gamma_phi", rates.gamma_phi), ("gamma_1", rates.gamma_1),
                       ("gamma_2", rates.gamma_2)):
        assert fit[name] == pytest.approx(true, rel=1e-6), name
    prod = fit.meta["products"]
    assert prod["g1gphi_incoh"] == pytest.approx(rates.gamma_1 * rates.gamma_phi, rel=1e-6)
    assert prod["g1g2_incoh"] == pytest.approx(rates.gamma_1 * rates.gamma_2, rel=1e-6)
    assert prod["g1g2_loss"] == pytest.approx(rates.gamma_1 * rates.gamma_2, rel=1e-6)
    assert fit.meta["consistent"]


def test_scattering_at_configured_noise(cfg):
    d = synth.simulate_powers(cfg, seed=0)
    fit = fit_scattering_powers(d.rabi, d.p_coh, d.p_incoh, d.p_loss, d.sigma_coh,
                                d.sigma_incoh, d.sigma_loss, rabi_rel_sigma=d.rabi_rel_sigma)
    for name, true in (("gamma_r", 227), ("gamma_n", 48), ("gamma_phi", 3)):
        assert fit[name] / KHZ == pytest.approx(true, abs=3 * fit.error(name) / KHZ), name
    assert fit.error("gamma_n") / KHZ < 2.0
    assert fit.error("gamma_r") / KHZ < 2.5
    assert fit.meta["calibration"]["rabi_rel_sigma"] == d.rabi_rel_sigma
    coh = fit.meta["curves"]["coh"]
    assert coh["errors"]["gamma_phi"] / KHZ < 2.5


def test_single_point_values():
    res = single_point_rates(TWO_PI * 0.0243e6, TWO_PI * 0.1056e6, KHZ * 1119)
    assert res.gamma_n / KHZ == pytest.approx(49, abs=1.5)
    assert res.gamma_r / KHZ == pytest.approx(224, abs=1.5)
    held = single_point_rates(TWO_PI * 0.0243e6, TWO_PI * 0.1056e6, KHZ * 1119,
                              gamma_r_ref=KHZ * 227)
    assert held.gamma_r == KHZ * 227 and held.gamma_r_fixed


def test_single_point_exact_inversion():
    rates = RateSet.from_hz(229e3, 49e3, 1e3)
    w = KHZ * 1119
    _, _, p_incoh, p_loss = power_curves(w, rates.gamma_r, rates.gamma_n, rates.gamma_phi)
    res = single_point_rates(float(p_loss), float(p_incoh), w, gamma_phi=rates.gamma_phi)
    assert res.gamma_n == pytest.approx(rates.gamma_n, rel=1e-10)
    assert res.gamma_r == pytest.approx(rates.gamma_r, rel=1e-10)
    sat = single_point_rates(rates.gamma_n / 2, rates.gamma_r / 2, 1e15)
    assert sat.gamma_n == pytest.approx(rates.gamma_n, rel=1e-9)


def test_single_point_saturation_error():
    with pytest.raises(SaturationError):
        single_point_rates(TWO_PI * 0.02e6, TWO_PI * 0.1e6, KHZ * 150)
    with pytest.raises(ValueError):
        single_point_rates(1.0, 1.0, 0.0)


def test_single_point_quarters(cfg):
    rates = synth.device_rates(cfg)
    est = [single_point_rates(float(q.p_loss[0]), float(q.p_incoh[0]), float(q.rabi[0]),
                              gamma_r_ref=rates.gamma_r, gamma_2_ref=rates.gamma_2).gamma_n
           for q in synth.simulate_single_point(cfg, seed=0)]
    est = np.array(est) / KHZ
    assert len(est) == 4
    assert est.mean() == pytest.approx(48, abs=6)
    assert 0.5 < est.std(ddof=1) < 8


# ---------------------------------------------------------------- time domain

def test_complex_decay_noiseless(table_rates):
    t = np.arange(240) * 50e-9
    fit = fit_complex_decay(ramsey_emission(TWO_PI * 125e3, table_rates, t, scale=3.0))
    assert fit["gamma_2"] == pytest.approx(table_rates.gamma_2, rel=1e-9)
    assert fit["delta_omega"] == pytest.approx(TWO_PI * 125e3, rel=1e-9)
    assert fit["amplitude"] == pytest.approx(1.5, rel=1e-9)


def test_complex_decay_aliasing(table_rates):
    t = np.arange(240) * 50e-9
    with pytest.raises(AliasingError):
        fit_complex_decay(ramsey_emission(TWO_PI * 125e3, table_rates, t), delta_bound=TWO_PI * 20e6)
    with pytest.raises(AliasingError):
        fit_complex_decay(ramsey_emission(TWO_PI * 9.9e6, table_rates, t))
    with pytest.raises(ValueError):
        fit_complex_decay(t1_power_trace(table_rates, t))


def test_complex_decay_single_trace_noise(cfg, table_rates):
    t = np.arange(240) * 50e-9
    clean = ramsey_emission(TWO_PI * 125e3, table_rates, t, scale=np.sqrt(table_rates.gamma_r))
    chain = ChainConfig(noise_photons=49.0, n_avg=3.8e4, seed=1)
    vals = [fit_complex_decay(synthesize_noisy_trace(clean, chain, k)) for k in range(200)]
    g2 = np.array([v["gamma_2"] for v in vals])
    err = np.sqrt(np.mean([v.error("gamma_2") ** 2 for v in vals]))
    assert np.std(g2) == pytest.approx(err, rel=0.15)


def test_exponential_power(table_rates):
    t = np.arange(240) * 50e-9
    fit = fit_exponential_power(t1_power_trace(table_rates, t))
    assert fit["gamma_1"] == pytest.approx(table_rates.gamma_1, rel=1e-9)
    assert fit["p0"] == pytest.approx(table_rates.gamma_r, rel=1e-9)


def test_exponential_power_mismatch_warning(table_rates):
    t = np.arange(240) * 50e-9
    v = table_rates.gamma_r * (np.exp(-table_rates.gamma_1 * t) - 0.2)
    with pytest.warns(FitWarning):
        fit_exponential_power(ComplexTrace(t, v, sigma=np.full(t.size, 1e3), role="power"))


def test_histogram_recovers_gaussian():
    x = np.random.default_rng(0).normal(3.0, 2.0, 10_000)
    fit = fit_gaussian_histogram(x)
    assert fit["sigma"] == pytest.approx(2.0, rel=0.03)
    assert fit["mean"] == pytest.approx(3.0, abs=0.1)
    assert not fit.meta["poor_fit"]


def test_histogram_flags_bimodal():
    rng = np.random.default_rng(1)
    x = np.concatenate([rng.normal(-3, 1, 2000), rng.normal(3, 1, 2000)])
    assert fit_gaussian_histogram(x).meta["poor_fit"]


def test_histogram_degenerate():
    with pytest.raises(DegenerateSampleError):
        fit_gaussian_histogram(np.ones(100))
    with pytest.raises(ValueError):
        fit_gaussian_histogram(np.arange(5.0))


# ---------------------------------------------------------------- calibration

def rabi_points(att, gr, f01=5.52e9):
    p = np.linspace(20.0, 35.0, 12)
    return p, rabi_from_power(p, att, gr, f01)


def test_rabi_calibration_exact():
    p, w = rabi_points(-145.0, KHZ * 227)
    fit = fit_rabi_calibration(p, w, KHZ * 227, 5.52e9)
    assert fit["attenuation_db"] == pytest.approx(-145.0, abs=1e-9)
    doubled = fit_rabi_calibration(p, w, 2 * KHZ * 227, 5.52e9)
    assert doubled["attenuation_db"] - fit["attenuation_db"] == pytest.approx(
        -10 * np.log10(2), abs=1e-9)


def test_rabi_calibration_noisy():
    p, w = rabi_points(-145.0, KHZ * 227)
    rng = np.random.default_rng(2)
    noisy = w * (1 + 0.01 * rng.standard_normal(w.size))
    fit = fit_rabi_calibration(p, noisy, KHZ * 227, 5.52e9, sigma=0.01 * w)
    assert fit["attenuation_db"] == pytest.approx(-145.0, abs=0.1)


def test_rabi_calibration_gain_rejected():
    p, w = rabi_points(3.0, KHZ * 227)
    with pytest.raises(ValidityError):
        fit_rabi_calibration(p, w, KHZ * 227, 5.52e9)


def test_flux_arch():
    phi = np.linspace(-0.4, 0.4, 21)
    f = transmon_frequency_array(16.56e9, 0.252e9, phi)
    fit = fit_flux_arch(phi, f, 0.252e9, ej_init=15e9)
    assert fit["ej_max"] == pytest.approx(16.56e9, rel=1e-10)
    one = fit_flux_arch([0.0], [f[10]], 0.252e9)
    assert one["ej_max"] == pytest.approx(16.56e9, rel=1e-10)


def test_flux_arch_noise():
    phi = np.linspace(-0.4, 0.4, 21)
    f = transmon_frequency_array(16.56e9, 0.252e9, phi)
    rng = np.random.default_rng(3)
    for _ in range(50):
        fit = fit_flux_arch(phi, f * (1 + 0.01 * rng.standard_normal(f.size)), 0.252e9)
        assert fit["ej_max"] == pytest.approx(16.56e9, rel=0.025)


def test_flux_arch_drops_invalid_points():
    phi = np.array([0.0, 0.1, 0.2, 0.5])
    f = np.append(transmon_frequency_array(16.56e9, 0.252e9, phi[:3]), 1e9)
    with pytest.warns(FitWarning):
        fit = fit_flux_arch(phi, f, 0.252e9)
    assert fit.meta["n_dropped"] == 1
