"""Circle fit of weak-probe reflection data."""
from __future__ import annotations

import numpy as np
from scipy import linalg

from ..exceptions import DegenerateGeometryError
from . import models
from .core import FitResult, damped_least_squares


def algebraic_circle(z):
    """Pratt-normalised algebraic circle fit.

    Solves the generalised eigenproblem M a = eta B a for the moment matrix
    of (|z|^2, x, y, 1) and the Pratt constraint B, taking the smallest
    non-negative eta.

    Returns
    -------
    center : complex
    radius : float
    """
    z = np.asarray(z, dtype=complex)
    if z.size < 3:
        raise DegenerateGeometryError("a circle needs at least 3 points")
    z0 = z.mean()
    scale = np.sqrt(np.mean(np.abs(z - z0) ** 2))
    if not scale > 0:
        raise DegenerateGeometryError("all points coincide")
    u = (z - z0) / scale
    cols = np.stack([np.abs(u) ** 2, u.real, u.imag, np.ones(u.size)], axis=1)
    m = cols.T @ cols / u.size
    b = np.array([[0.0, 0, 0, -2], [0, 1, 0, 0], [0, 0, 1, 0], [-2, 0, 0, 0]])
    eta, vec = linalg.eig(m, b)
    ok = np.isfinite(eta) & (np.abs(eta.imag) < 1e-9)
    eta_r = np.where(ok, eta.real, np.inf)
    eta_r[eta_r < -1e-10] = np.inf
    k = int(np.argmin(eta_r))
    if not np.isfinite(eta_r[k]):
        raise DegenerateGeometryError("no admissible circle solution")
    a, bx, by, d = vec[:, k].real
    if abs(a) < 1e-10 * np.linalg.norm([a, bx, by, d]):
        raise DegenerateGeometryError("points are collinear: no resonance in the span")
    cu = complex(-bx / (2 * a), -by / (2 * a))
    ru = np.sqrt(max(bx * bx + by * by - 4 * a * d, 0.0)) / (2 * abs(a))
    if ru > 1e8:
        raise DegenerateGeometryError("points are collinear: no resonance in the span")
    return z0 + scale * cu, scale * ru


def circle_fit(omega, r, sigma=None) -> FitResult:
    """Resonance frequency, radiative and total decoherence rate from r(omega).

    The algebraic circle gives centre and diameter d; the angle of r around
    the centre follows theta0 + 2 arctan((omega - omega_01)/gamma_2), which
    fixes omega_01 and gamma_2; gamma_r = d gamma_2. A final fit of the
    complex weak-probe model, started there, supplies the covariance.

    Parameters
    ----------
    omega : array_like
        Probe angular frequencies (rad/s).
    r : array_like
        Complex reflection samples.
    sigma : array_like, optional
        Per-quadrature standard deviation.
    """
    omega = np.asarray(omega, dtype=float)
    r = np.asarray(r, dtype=complex)
    if omega.size < 6 or omega.shape != r.shape:
        raise ValueError("circle fit needs >= 6 points with matching omega and r")
    order = np.argsort(omega)
    omega, r = omega[order], r[order]
    if sigma is not None:
        sigma = np.broadcast_to(np.asarray(sigma, dtype=float), r.shape)[order]
    w_ref = float(np.mean(omega))
    x = omega - w_ref

    center, radius = algebraic_circle(r)
    theta = np.unwrap(np.angle(r - center))
    dev = np.abs(r - 1.0) ** 2
    i0 = int(np.argmax(dev))
    half = x[dev >= 0.5 * dev[i0]]
    g2_0 = max(0.5 * (half.max() - half.min()), np.min(np.diff(x)) if x.size > 1 else 1.0)
    phase = damped_least_squares(models.circle_phase, x, theta, [theta[i0], x[i0], g2_0],
                                 names=("theta0", "omega_01", "gamma_2"),
                                 jac=models.circle_phase_jac)
    x01, g2 = phase["omega_01"], abs(phase["gamma_2"])
    gr = 2.0 * radius * g2

    full = damped_least_squares(models.weak_reflection, x, r, [x01, gr, g2], sigma=sigma,
                                names=("omega_01", "gamma_r", "gamma_2"),
                                jac=models.weak_reflection_jac)
    full.values[0] += w_ref
    full.units.update(omega_01="rad/s", gamma_r="rad/s", gamma_2="rad/s")
    full.meta.update(center=[center.real, center.imag], radius=radius,
                     diameter=2.0 * radius,
                     algebraic={"omega_01": x01 + w_ref, "gamma_r": gr, "gamma_2": g2},
                     converged_phase=phase.converged)
    full.values[2] = abs(full.values[2])
    return full
