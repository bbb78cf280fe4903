"""Fits of scattered and lost power versus drive, and the single-point method."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..exceptions import SaturationError
from . import models
from .core import FitResult, damped_least_squares

CONSISTENCY_SIGMAS = 5.0


def _initial_rates(rabi, p_incoh, p_loss):
    """Crude saturation-level starting point from the strongest drive."""
    k = int(np.argmax(rabi))
    gr = max(2.0 * p_incoh[k], 1e-300)
    gn = max(2.0 * p_loss[k], 1e-3 * gr)
    g1 = gr + gn
    return gr, gn, 0.01 * g1


def _curve_fits(rabi, p_coh, p_incoh, p_loss, sigma_coh, sigma_incoh, sigma_loss, gr, gn, gp):
    g1 = gr + gn
    g2 = 0.5 * g1 + gp
    fit_i = damped_least_squares(models.p_incoh, rabi, p_incoh, [gr, g1 * g2, g1 * gp],
                                 sigma=sigma_incoh, names=("gamma_r", "g1g2", "g1gphi"),
                                 jac=models.p_incoh_jac)
    fit_l = damped_least_squares(models.p_loss, rabi, p_loss, [gn, g1 * g2], sigma=sigma_loss,
                                 names=("gamma_n", "g1g2"), jac=models.p_loss_jac)
    fit_c = damped_least_squares(models.p_coh, rabi, p_coh,
                                 [fit_i["gamma_r"], fit_l["gamma_n"], gp], sigma=sigma_coh,
                                 names=("gamma_r", "gamma_n", "gamma_phi"), jac=models.p_coh_jac)
    return fit_i, fit_l, fit_c


def fit_scattering_powers(rabi, p_coh, p_incoh, p_loss, sigma_coh=None, sigma_incoh=None,
                          sigma_loss=None, init=None, rabi_rel_sigma=0.0,
                          calibration_step=1e-3) -> FitResult:
    """Decay rates from the three power curves, fitted separately.

    P_incoh gives (gamma_r, gamma_1 gamma_2, gamma_1 gamma_phi); P_loss gives
    (gamma_n, gamma_1 gamma_2); P_coh gives (gamma_r, gamma_n, gamma_phi).
    Each rate is taken from the curve whose shape sets it: gamma_r from
    P_incoh, gamma_n from P_loss, gamma_phi from P_coh. The gamma_r in P_coh
    enters only through the drive normalisation P_in = Omega^2 / (4 gamma_r),
    so it is a cross-check rather than an independent estimate. Duplicate
    estimates further than 5 sigma apart are listed in ``meta["inconsistent"]``.

    Parameters
    ----------
    rabi : array_like
        Rabi amplitudes (rad/s), spanning below omega_low and above omega_sat.
    p_coh, p_incoh, p_loss : array_like
        Photon fluxes (1/s).
    init : RateSet, optional
        Starting rates; derived from the high-drive data when omitted.
    rabi_rel_sigma : float
        Relative one-sigma uncertainty of the Rabi axis as a whole. Its effect
        is found by refitting on axes scaled by 1 +- ``calibration_step`` and
        added to the covariance (fully correlated across the rates).
    """
    rabi = np.asarray(rabi, dtype=float)
    p_coh, p_incoh, p_loss = (np.asarray(a, dtype=float) for a in (p_coh, p_incoh, p_loss))
    if init is None:
        gr, gn, gp = _initial_rates(rabi, p_incoh, p_loss)
    else:
        gr, gn, gp = init.gamma_r, init.gamma_n, max(init.gamma_phi, 1e-3 * init.gamma_1)
    data = (p_coh, p_incoh, p_loss, sigma_coh, sigma_incoh, sigma_loss)
    fit_i, fit_l, fit_c = _curve_fits(rabi, *data, gr, gn, gp)
    names = ("gamma_r", "gamma_n", "gamma_phi")
    primary = {"gamma_r": fit_i, "gamma_n": fit_l, "gamma_phi": fit_c}
    vals = np.array([primary[n][n] for n in names])
    cov = np.diag([primary[n].error(n) ** 2 for n in names])

    inconsistent = []
    for name in ("gamma_r", "gamma_n"):
        e = np.hypot(primary[name].error(name), fit_c.error(name))
        if abs(primary[name][name] - fit_c[name]) > CONSISTENCY_SIGMAS * max(e, 1e-300):
            inconsistent.append(f"{name} from P_coh")
    a_i, a_l = fit_i["g1g2"], fit_l["g1g2"]
    ea = np.hypot(fit_i.error("g1g2"), fit_l.error("g1g2"))
    if abs(a_i - a_l) > CONSISTENCY_SIGMAS * max(ea, 1e-300):
        inconsistent.append("gamma_1 gamma_2 from P_incoh vs P_loss")

    grad = np.zeros(3)
    if rabi_rel_sigma > 0:
        shifted = []
        for sign in (1.0, -1.0):
            fi, fl, fc = _curve_fits(rabi * (1.0 + sign * calibration_step), *data, *vals)
            shifted.append(np.array([fi["gamma_r"], fl["gamma_n"], fc["gamma_phi"]]))
        grad = (shifted[0] - shifted[1]) / (2.0 * calibration_step)
        cov = cov + np.outer(grad, grad) * rabi_rel_sigma**2

    fits = (fit_i, fit_l, fit_c)
    res = FitResult(names, vals, cov,
                    residual_norm=float(np.sqrt(sum(f.residual_norm**2 for f in fits))),
                    n_iter=sum(f.n_iter for f in fits),
                    converged=all(f.converged for f in fits),
                    units={n: "rad/s" for n in names})
    res.meta.update(
        curves={"incoh": _summary(fit_i), "loss": _summary(fit_l), "coh": _summary(fit_c)},
        products={"g1g2_incoh": a_i, "g1g2_loss": a_l, "g1gphi_incoh": fit_i["g1gphi"]},
        calibration={"rabi_rel_sigma": float(rabi_rel_sigma),
                     "d_rates_d_scale": dict(zip(names, grad.tolist()))},
        inconsistent=inconsistent, consistent=not inconsistent)
    res = res.add_derived("gamma_1", vals[0] + vals[1], {"gamma_r": 1, "gamma_n": 1},
                          unit="rad/s")
    res = res.add_derived("gamma_2", 0.5 * (vals[0] + vals[1]) + vals[2],
                          {"gamma_r": 0.5, "gamma_n": 0.5, "gamma_phi": 1.0}, unit="rad/s")
    return res


def _summary(fit: FitResult):
    return {"params": fit.params, "errors": fit.errors, "reduced_chi2": fit.meta["reduced_chi2"],
            "converged": fit.converged}


@dataclass(frozen=True)
class SinglePointResult:
    gamma_n: float
    gamma_r: float
    correction: float  # gamma_1 gamma_2 / Omega^2 at the solution
    n_iter: int
    saturation_correction: bool
    gamma_r_fixed: bool


def single_point_rates(p_loss, p_incoh, omega, gamma_r_ref=None, gamma_phi=0.0, gamma_2_ref=None,
                       saturation_correction=True, max_correction=0.3, tol=1e-13,
                       max_iter=200) -> SinglePointResult:
    """Non-radiative and radiative rate from one strongly saturating drive.

    Solves gamma_n = 2 P_loss (1 + c) and gamma_r = 2 P_incoh (1 + c)^2 /
    (1 + gamma_1 gamma_phi / Omega^2) with c = gamma_1 gamma_2 / Omega^2 by
    fixed-point iteration from the uncorrected estimate. With ``gamma_r_ref``
    the radiative rate is held at that value; with ``gamma_2_ref`` the
    decoherence rate in c is taken from that value instead of
    gamma_1/2 + gamma_phi.

    Raises
    ------
    SaturationError
        If Omega does not exceed the saturation threshold of the solution, or
        the correction c exceeds ``max_correction``.
    """
    if not (omega > 0 and p_loss >= 0 and p_incoh > 0):
        raise ValueError("need omega > 0, p_loss >= 0 and p_incoh > 0")
    gn = 2.0 * p_loss
    gr = float(gamma_r_ref) if gamma_r_ref is not None else 2.0 * p_incoh
    c = 0.0
    n = 0
    if saturation_correction:
        for n in range(1, max_iter + 1):
            g1 = gr + gn
            g2 = gamma_2_ref if gamma_2_ref is not None else 0.5 * g1 + gamma_phi
            c = g1 * g2 / omega**2
            if c > max_correction:
                raise SaturationError(
                    f"saturation correction {c:.3f} exceeds {max_correction}: drive too weak")
            gn_new = 2.0 * p_loss * (1.0 + c)
            gr_new = gr if gamma_r_ref is not None else \
                2.0 * p_incoh * (1.0 + c) ** 2 / (1.0 + g1 * gamma_phi / omega**2)
            done = abs(gn_new - gn) <= tol * max(gn_new, 1e-300) and \
                abs(gr_new - gr) <= tol * gr_new
            gn, gr = gn_new, gr_new
            if done:
                break
        else:
            raise SaturationError("fixed point did not converge")
    sat = (1.0 + 1.0 / np.sqrt(2.0)) * gr
    if omega < sat:
        raise SaturationError(f"omega {omega:.4g} rad/s is below the saturation threshold {sat:.4g}")
    return SinglePointResult(gn, gr, c, n, saturation_correction, gamma_r_ref is not None)
