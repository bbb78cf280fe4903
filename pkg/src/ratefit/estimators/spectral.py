"""Mollow-triplet and full line-shape fits of incoherent spectra."""
from __future__ import annotations

import numpy as np

from ..exceptions import ValidityError
from ..qed.bloch import steady_state_values
from ..qed.spectrum import SPECTRUM_NORM, TRIPLET_VALIDITY, Spectrum, i3_closed_form
from . import models
from .core import FitResult, damped_least_squares

TRIPLET_PEAK_SEPARATION = 5.0
# sideband areas below this many sigma are treated as noise, not lines
SIDEBAND_MIN_SIGNIFICANCE = 5.0


def _smooth(y, width):
    if width <= 1:
        return np.asarray(y, dtype=float)
    kernel = np.ones(width) / width
    return np.convolve(y, kernel, mode="same")


def _argmax_lowest(y):
    """Index of the maximum; exact ties resolve to the lowest index."""
    return int(np.flatnonzero(y == np.max(y))[0])


def _half_width(x, y, i):
    """Half width at half maximum around index i by walking outwards."""
    half = 0.5 * y[i]
    lo = i
    while lo > 0 and y[lo] > half:
        lo -= 1
    hi = i
    while hi < y.size - 1 and y[hi] > half:
        hi += 1
    return 0.5 * (x[hi] - x[lo])


def find_triplet_peaks(x, psd, smooth=5, separation=TRIPLET_PEAK_SEPARATION):
    """Locate the central line and the two sidebands.

    The central line is the global maximum of the smoothed PSD; each sideband
    is the largest local maximum more than ``separation`` central half widths
    away on its side. Maxima within one grid step keep the larger value and
    exact ties go to the lower frequency.

    Raises
    ------
    ValidityError
        If a sideband is missing or not separated from the centre by a dip.
    """
    y = _smooth(psd, smooth)
    i0 = _argmax_lowest(y)
    hw = max(_half_width(x, y, i0), np.min(np.diff(x)))
    peaks = []
    for side in (-1, 1):
        mask = side * (x - x[i0]) > separation * hw
        if not np.any(mask):
            raise ValidityError("sideband outside the spectral window; use fit_full_spectrum")
        idx = np.flatnonzero(mask)
        interior = idx[(idx > 0) & (idx < x.size - 1)]
        loc = interior[(y[interior] >= y[interior - 1]) & (y[interior] >= y[interior + 1])]
        if loc.size == 0:
            raise ValidityError("sideband not resolved; use fit_full_spectrum")
        k = int(loc[_argmax_lowest(y[loc])])
        between = y[min(i0, k):max(i0, k) + 1]
        if between.min() > 0.75 * y[k]:
            raise ValidityError("sideband not separated from the central line; "
                                "use fit_full_spectrum")
        peaks.append(k)
    return peaks[0], i0, peaks[1]


def fit_mollow_triplet(spectrum: Spectrum, joint=False, max_sweeps=50, tol=1e-12) -> FitResult:
    """Central and sideband line widths of a resonant Mollow triplet.

    Each line is fitted to a Lorentzian on the part of the grid nearer to it
    than to the other lines, with the current models of the other two lines
    subtracted; the sweep repeats until the parameters settle. ``joint=True``
    fits all eight parameters at once instead.

    Returns
    -------
    FitResult
        ``gamma_2`` (central HWHM), ``gamma_s_red``/``gamma_s_blue`` (sideband
        HWHM), ``omega`` (half the sideband spacing), ``center`` and line
        areas, plus derived ``gamma_1 = gamma_s_red + gamma_s_blue - gamma_2``.
    """
    x_abs = spectrum.omega_grid
    x_ref = float(np.mean(x_abs))
    x = x_abs - x_ref
    y = spectrum.psd
    sigma = spectrum.sigma
    ir, i0, ib = find_triplet_peaks(x, y)

    def init_line(i):
        hw = max(_half_width(x, _smooth(y, 5), i), np.min(np.diff(x)))
        return np.array([x[i], hw, np.pi * hw * max(y[i], 1e-300)])

    lines = [init_line(ir), init_line(i0), init_line(ib)]

    if joint:
        c, g2, a0 = lines[1]
        p0 = [c, g2, a0, 0.5 * (lines[2][0] - lines[0][0]), lines[0][1], lines[0][2],
              lines[2][1], lines[2][2]]
        res = damped_least_squares(models.triplet, x, y, p0, sigma=sigma,
                                   names=models.TRIPLET_NAMES, jac=models.triplet_jac)
        res.values[0] += x_ref
        res.meta["mode"] = "joint"
        return _finish_triplet(res)

    centers = [x[ir], x[i0], x[ib]]
    fits = [None, None, None]
    converged = False
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        old = np.concatenate(lines)
        for k in range(3):
            others = sum(models.lorentzian(x, lines[j]) for j in range(3) if j != k)
            lo = -np.inf if k == 0 else 0.5 * (centers[k - 1] + centers[k])
            hi = np.inf if k == 2 else 0.5 * (centers[k] + centers[k + 1])
            m = (x > lo) & (x <= hi)
            fits[k] = damped_least_squares(models.lorentzian, x[m], y[m] - others[m], lines[k],
                                           sigma=None if sigma is None else sigma[m],
                                           names=("center", "hwhm", "area"),
                                           jac=models.lorentzian_jac)
            lines[k] = fits[k].values.copy()
            lines[k][1] = abs(lines[k][1])
        centers = [ln[0] for ln in lines]
        new = np.concatenate(lines)
        if np.max(np.abs(new - old) / np.maximum(np.abs(new), 1e-300)) < tol:
            converged = True
            break

    # assemble a block-diagonal covariance over the three windows
    names = ("center", "gamma_2", "area_center", "center_red", "gamma_s_red", "area_red",
             "center_blue", "gamma_s_blue", "area_blue")
    order = (1, 0, 2)
    vals = np.concatenate([lines[k] for k in order])
    vals[[0, 3, 6]] += x_ref
    cov = np.zeros((9, 9))
    for b, k in enumerate(order):
        cov[3 * b:3 * b + 3, 3 * b:3 * b + 3] = fits[k].covariance
    res = FitResult(names, vals, cov,
                    residual_norm=float(np.sqrt(sum(f.residual_norm**2 for f in fits))),
                    n_iter=sum(f.n_iter for f in fits), converged=converged
                    and all(f.converged for f in fits),
                    meta={"mode": "individual", "sweeps": sweeps,
                          "window_chi2": [f.meta["chi2"] for f in fits]})
    res = res.add_derived("omega", 0.5 * (vals[6] - vals[3]), {"center_blue": 0.5, "center_red": -0.5})
    return _finish_triplet(res)


def _finish_triplet(res: FitResult) -> FitResult:
    for name in ("gamma_2", "gamma_s_red", "gamma_s_blue"):
        res.values[res.index(name)] = abs(res[name])
    if not res["omega"] > TRIPLET_VALIDITY * res["gamma_2"]:
        raise ValidityError(f"fitted splitting {res['omega']:.4g} rad/s is not resolved against "
                            f"the central width {res['gamma_2']:.4g} rad/s")
    for name in ("area_red", "area_blue"):
        err = res.error(name)
        if not res[name] > SIDEBAND_MIN_SIGNIFICANCE * err:
            raise ValidityError(f"{name} = {res[name]:.4g} is not significant "
                                f"(error {err:.2g}): no resolved sideband")
    g1 = res["gamma_s_red"] + res["gamma_s_blue"] - res["gamma_2"]
    res = res.add_derived("gamma_1", g1, {"gamma_s_red": 1.0, "gamma_s_blue": 1.0, "gamma_2": -1.0})
    for n in res.names:
        if not n.startswith("area"):
            res.units[n] = "rad/s"
        else:
            res.units[n] = "1/s"
    return res


def full_spectrum_model(x, gamma_1, gamma_phi, gamma_r, omega, delta, amplitude=1.0):
    """Incoherent PSD versus x = w - w_p for the given parameters."""
    g2 = 0.5 * gamma_1 + gamma_phi
    i3 = i3_closed_form(x, delta, omega, gamma_1, g2)
    return amplitude * SPECTRUM_NORM * gamma_r * i3.real


def fit_full_spectrum(spectra, gamma_r_ref, omega_p, init, free_amplitude=True,
                      rank_rtol=1e-7) -> FitResult:
    """Fit the complete incoherent line shape with gamma_r held fixed.

    Parameters
    ----------
    spectra : Spectrum or sequence of Spectrum
        Several spectra share (gamma_1, gamma_phi); each keeps its own Rabi
        amplitude, detuning and (optionally) amplitude scale.
    gamma_r_ref : float
        Radiative rate from an independent measurement (rad/s).
    omega_p : float or sequence of float
        Pump angular frequency of each spectrum.
    init : dict
        Starting values: ``gamma_1``, ``gamma_phi`` and per-spectrum
        sequences (or scalars) ``omega`` and ``delta``.

    Returns
    -------
    FitResult
        ``gamma_1``, ``gamma_phi``, per-spectrum ``omega``/``delta``
        (suffixed ``_k`` for k > 0 when several spectra are fitted),
        optional ``amplitude`` and derived ``gamma_n``, ``gamma_2``.
    """
    if isinstance(spectra, Spectrum):
        spectra = [spectra]
    n = len(spectra)
    omega_p = np.broadcast_to(np.asarray(omega_p, dtype=float), (n,))
    om0 = np.broadcast_to(np.asarray(init["omega"], dtype=float), (n,))
    de0 = np.broadcast_to(np.asarray(init["delta"], dtype=float), (n,))
    per = 3 if free_amplitude else 2
    xs = [s.omega_grid - wp for s, wp in zip(spectra, omega_p)]
    sizes = [x.size for x in xs]
    x_all = np.concatenate(xs)
    y_all = np.concatenate([s.psd for s in spectra])
    sig = None
    if all(s.sigma is not None for s in spectra):
        sig = np.concatenate([s.sigma for s in spectra])
    scale = float(gamma_r_ref)

    def unpack(p):
        return p[0] * scale, p[1] * scale, [p[2 + per * k: 2 + per * (k + 1)] for k in range(n)]

    def model(_x, p):
        g1, gp, blocks = unpack(p)
        out = []
        for x, b in zip(xs, blocks):
            amp = b[2] if free_amplitude else 1.0
            out.append(full_spectrum_model(x, g1, gp, gamma_r_ref, b[0] * scale, b[1] * scale, amp))
        return np.concatenate(out)

    p0 = [init["gamma_1"] / scale, init["gamma_phi"] / scale]
    for k in range(n):
        p0 += [om0[k] / scale, de0[k] / scale] + ([1.0] if free_amplitude else [])
    suffix = [""] + [f"_{k}" for k in range(1, n)]
    names = ["gamma_1", "gamma_phi"]
    for s in suffix:
        names += [f"omega{s}", f"delta{s}"] + ([f"amplitude{s}"] if free_amplitude else [])
    res = damped_least_squares(model, x_all, y_all, p0, sigma=sig, names=names,
                               rank_rtol=rank_rtol)
    # back to rad/s
    conv = np.array([scale if not nm.startswith("amplitude") else 1.0 for nm in names])
    res.values = res.values * conv
    res.covariance = res.covariance * np.outer(conv, conv)
    res.values[0] = abs(res.values[0])
    for k in range(n):
        res.values[2 + per * k] = abs(res.values[2 + per * k])
    res.meta.update(shared=["gamma_1", "gamma_phi"],
                    per_spectrum=["omega", "delta"] + (["amplitude"] if free_amplitude else []),
                    gamma_r_ref=float(gamma_r_ref), n_spectra=n, sizes=sizes)
    res = res.add_derived("gamma_n", res["gamma_1"] - gamma_r_ref, {"gamma_1": 1.0})
    res = res.add_derived("gamma_2", 0.5 * res["gamma_1"] + res["gamma_phi"],
                          {"gamma_1": 0.5, "gamma_phi": 1.0})
    for nm in res.names:
        res.units[nm] = "1" if nm.startswith("amplitude") else "rad/s"
    return res


def integrated_weights(spectrum: Spectrum, centers, gamma_r):
    """Fractions of gamma_r carried by each line, splitting the grid at the
    midpoints between adjacent centres."""
    c = np.sort(np.asarray(centers, dtype=float))
    edges = np.concatenate([[-np.inf], 0.5 * (c[1:] + c[:-1]), [np.inf]])
    w = spectrum.omega_grid
    out = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        m = (w >= lo) & (w <= hi)
        out.append(float(np.trapezoid(spectrum.psd[m], w[m])) / gamma_r)
    return out


def steady_incoherent_fraction(omega, delta, gamma_1, gamma_2):
    """(s2 - |s1|^2): incoherent flux per unit gamma_r."""
    s1, s2 = steady_state_values(delta, omega, gamma_1, gamma_2)
    return s2 - abs(s1) ** 2
