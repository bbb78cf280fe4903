"""Fits of pulsed-decay records and of histograms of repeated estimates."""
from __future__ import annotations

import warnings

import numpy as np
from scipy import stats

from ..dynamics import ComplexTrace
from ..exceptions import AliasingError, DegenerateSampleError, FitWarning
from . import models
from .core import FitResult, damped_least_squares


def fit_complex_decay(trace: ComplexTrace, delta_bound=None) -> FitResult:
    """Decoherence rate and detuning from a free-decay amplitude record.

    Fits A exp(-gamma_2 t) exp(i(phi0 - dw t)) in the complex plane, which
    constrains the magnitude envelope and the phase slope together and stays
    unbiased where the envelope sinks into the noise.

    Parameters
    ----------
    trace : ComplexTrace
        Uniformly sampled amplitude record covering at least 2 / gamma_2.
    delta_bound : float, optional
        Largest detuning (rad/s) the caller considers possible.

    Raises
    ------
    AliasingError
        If the phase can advance by more than pi between samples.
    """
    if trace.role != "amplitude":
        raise ValueError("complex decay fit needs an amplitude trace")
    t, v = trace.t_grid, trace.values
    if t.size < 5:
        raise ValueError("need at least 5 samples")
    dt = trace.dt
    if delta_bound is not None and abs(delta_bound) * dt > np.pi:
        raise AliasingError(f"|dw| dt = {abs(delta_bound) * dt:.3f} > pi: phase unwrap ambiguous")
    # start values from the high-amplitude head of the record
    mag = np.abs(v)
    head = mag >= 0.5 * mag.max()
    head[:3] = True
    n_head = max(3, int(np.flatnonzero(head)[-1]) + 1) if np.any(head) else 3
    # lag-1 phase of the head: a noise-robust per-sample phase advance
    lag = np.vdot(v[:n_head - 1], v[1:n_head])
    step = float(np.angle(lag))
    if abs(step) > 0.9 * np.pi:
        raise AliasingError("phase advances by nearly pi per sample: detuning aliased")
    dw0 = -step / dt
    phi0 = float(np.angle(np.sum(v[:n_head] * np.exp(1j * dw0 * (t[:n_head] - t[0])))))
    lg = np.log(np.maximum(mag[:n_head], 1e-300))
    g_slope, lna = np.polyfit(t[:n_head] - t[0], lg, 1)
    g0 = max(-g_slope, 1.0 / (t[-1] - t[0]))
    a0 = float(np.exp(lna))
    p0 = [a0, g0, dw0, phi0]
    sigma = None if trace.sigma is None else trace.sigma / np.sqrt(2.0)
    res = damped_least_squares(models.complex_decay, t - t[0], v, p0, sigma=sigma,
                               names=("amplitude", "gamma_2", "delta_omega", "phase0"),
                               jac=models.complex_decay_jac)
    if abs(res["delta_omega"]) * dt > np.pi:
        raise AliasingError("fitted detuning exceeds the sampling Nyquist limit")
    if (t[-1] - t[0]) * res["gamma_2"] < 2.0:
        res.meta.setdefault("warnings", []).append("trace shorter than 2 / gamma_2")
    if res["amplitude"] < 0:
        res.values[0] = -res.values[0]
        res.values[3] += np.pi
    res.values[3] = (res.values[3] + np.pi) % (2 * np.pi) - np.pi
    res.units.update(gamma_2="rad/s", delta_omega="rad/s", phase0="rad", amplitude="1")
    return res


def fit_exponential_power(trace: ComplexTrace, floor=0.0) -> FitResult:
    """Energy relaxation rate from an emitted-power record P0 exp(-gamma_1 t).

    ``floor`` is subtracted first. Samples below zero by more than three
    standard deviations add a model-mismatch warning.
    """
    if trace.role != "power":
        raise ValueError("exponential power fit needs a power trace")
    t = trace.t_grid - trace.t_grid[0]
    p = trace.values - floor
    warn = []
    if trace.sigma is not None:
        bad = p < -3.0 * trace.sigma
        if np.count_nonzero(bad) > max(1, int(0.01 * p.size)):
            warn.append("negative-going data beyond noise: model mismatch")
    pos = p > 0
    if np.count_nonzero(pos[: max(3, p.size // 4)]) < 2:
        raise ValueError("trace is not positive near the start")
    k = np.flatnonzero(pos[: max(3, p.size // 4)])
    slope, lna = np.polyfit(t[k], np.log(p[k]), 1)
    p0 = [float(np.exp(lna)), max(-slope, 1.0 / max(t[-1], 1e-300))]
    res = damped_least_squares(models.exp_decay, t, p, p0, sigma=trace.sigma,
                               names=("p0", "gamma_1"), jac=models.exp_decay_jac)
    res.units.update(p0="1/s", gamma_1="rad/s")
    if warn:
        res.meta["warnings"] = warn
        for w in warn:
            warnings.warn(w, FitWarning, stacklevel=2)
    return res


def fit_gaussian_histogram(values, bins="fd", p_threshold=0.01, reweight=3) -> FitResult:
    """Gaussian fitted to a Freedman-Diaconis histogram of ``values``.

    Bin counts carry Poisson errors taken from the fitted model rather than
    the observed counts (iteratively reweighted), which avoids the downward
    bias of count-weighted fits in sparse bins. ``meta`` holds the sample
    mean and standard deviation, the chi-square p-value and ``poor_fit``
    (p below ``p_threshold``).
    """
    x = np.asarray(values, dtype=float)
    if x.size < 30:
        raise ValueError("need at least 30 samples")
    sd = float(np.std(x, ddof=1))
    if not sd > 0:
        raise DegenerateSampleError("all samples are equal: zero spread")
    edges = np.histogram_bin_edges(x, bins=bins)
    counts, edges = np.histogram(x, bins=edges)
    centers = 0.5 * (edges[1:] + edges[:-1])
    width = float(edges[1] - edges[0])
    err = np.sqrt(np.maximum(counts, 1.0))
    h0 = x.size * width / (np.sqrt(2 * np.pi) * sd)
    p0 = [h0, float(np.mean(x)), sd]
    if centers.size < 4:
        raise ValueError("too few histogram bins for a three-parameter fit")
    for _ in range(reweight + 1):
        res = damped_least_squares(models.gaussian, centers, counts, p0, sigma=err,
                                   names=("height", "mean", "sigma"), jac=models.gaussian_jac,
                                   absolute_sigma=True)
        p0 = res.values
        err = np.sqrt(np.maximum(models.gaussian(centers, p0), 0.5))
    res.values[2] = abs(res.values[2])
    chi2, dof = res.meta["chi2"], res.meta["dof"]
    pval = float(stats.chi2.sf(chi2, dof)) if dof > 0 else 1.0
    res.meta.update(sample_mean=float(np.mean(x)), sample_std=sd, bin_width=width,
                    n_bins=int(centers.size), p_value=pval, poor_fit=pval < p_threshold,
                    edges=edges.tolist(), counts=counts.tolist())
    return res
