"""Forward models used by the fitters, each paired with its analytic Jacobian.

Every model has signature ``f(x, p)`` and Jacobian ``j(x, p) -> (len(x), len(p))``.
:data:`REGISTRY` lists them with samplers for the gradient check.
"""
from __future__ import annotations

import numpy as np


def lorentzian(x, p):
    """Area-normalised Lorentzian; p = (center, hwhm, area)."""
    c, g, a = p
    return a / np.pi * g / ((x - c) ** 2 + g * g)


def lorentzian_jac(x, p):
    c, g, a = p
    u = x - c
    d = u * u + g * g
    return np.stack([a / np.pi * g * 2.0 * u / d**2,
                     a / np.pi * (d - 2.0 * g * g) / d**2,
                     g / (np.pi * d)], axis=-1)


TRIPLET_NAMES = ("center", "gamma_2", "area_center", "omega", "gamma_s_red", "area_red",
                 "gamma_s_blue", "area_blue")


def triplet(x, p):
    """Three Lorentzians: centre line and sidebands at center -/+ omega."""
    c, g2, a0, om, gr, ar, gb, ab = p
    return (lorentzian(x, (c, g2, a0)) + lorentzian(x, (c - om, gr, ar))
            + lorentzian(x, (c + om, gb, ab)))


def triplet_jac(x, p):
    c, g2, a0, om, gr, ar, gb, ab = p
    j0 = lorentzian_jac(x, (c, g2, a0))
    jr = lorentzian_jac(x, (c - om, gr, ar))
    jb = lorentzian_jac(x, (c + om, gb, ab))
    dc = j0[:, 0] + jr[:, 0] + jb[:, 0]
    dom = -jr[:, 0] + jb[:, 0]
    return np.stack([dc, j0[:, 1], j0[:, 2], dom, jr[:, 1], jr[:, 2], jb[:, 1], jb[:, 2]], axis=-1)


def weak_reflection(x, p):
    """r(w) = 1 - i gamma_r / (w - w01 + i gamma_2); p = (w01, gamma_r, gamma_2)."""
    w01, gr, g2 = p
    return 1.0 - 1j * gr / ((x - w01) + 1j * g2)


def weak_reflection_jac(x, p):
    w01, gr, g2 = p
    z = (x - w01) + 1j * g2
    return np.stack([-1j * gr / z**2, -1j / z, -gr / z**2], axis=-1)


def circle_phase(x, p):
    """Angle of r - center around the weak-probe circle; p = (theta0, w01, gamma_2)."""
    t0, w01, g2 = p
    return t0 + 2.0 * np.arctan((x - w01) / g2)


def circle_phase_jac(x, p):
    t0, w01, g2 = p
    u = x - w01
    d = u * u + g2 * g2
    return np.stack([np.ones_like(u), -2.0 * g2 / d, -2.0 * u / d], axis=-1)


def p_incoh(x, p):
    """Incoherent flux vs Rabi; p = (gamma_r, g1g2, g1gphi)."""
    gr, a, b = p
    w2 = x * x
    return 0.5 * gr * w2 * (b + w2) / (a + w2) ** 2


def p_incoh_jac(x, p):
    gr, a, b = p
    w2 = x * x
    q = 0.5 * w2 / (a + w2) ** 2
    val = gr * q * (b + w2)
    return np.stack([q * (b + w2), -2.0 * val / (a + w2), gr * q], axis=-1)


def p_loss(x, p):
    """Lost flux vs Rabi; p = (gamma_n, g1g2)."""
    gn, a = p
    w2 = x * x
    return gn * w2 / (2.0 * (a + w2))


def p_loss_jac(x, p):
    gn, a = p
    w2 = x * x
    q = w2 / (2.0 * (a + w2))
    return np.stack([q, -gn * q / (a + w2)], axis=-1)


def p_coh(x, p):
    """Coherently reflected flux vs Rabi; p = (gamma_r, gamma_n, gamma_phi)."""
    gr, gn, gp = p
    w2 = x * x
    g1 = gr + gn
    u = 1.0 - g1 * gr / (w2 + g1 * (0.5 * g1 + gp))
    return w2 / (4.0 * gr) * u * u


def p_coh_jac(x, p):
    gr, gn, gp = p
    w2 = x * x
    g1 = gr + gn
    xx = w2 + g1 * (0.5 * g1 + gp)
    num = g1 * gr
    u = 1.0 - num / xx
    dnum = np.array([g1 + gr, gr, 0.0])
    dxx = np.array([g1 + gp, g1 + gp, g1])
    cols = []
    for k in range(3):
        du = -(dnum[k] * xx - num * dxx[k]) / xx**2
        d = w2 / 4.0 * (2.0 * u * du / gr)
        if k == 0:
            d = d - w2 / 4.0 * u * u / gr**2
        cols.append(d)
    return np.stack(cols, axis=-1)


def exp_decay(x, p):
    """p0 exp(-gamma t); p = (p0, gamma)."""
    a, g = p
    return a * np.exp(-g * x)


def exp_decay_jac(x, p):
    a, g = p
    e = np.exp(-g * x)
    return np.stack([e, -a * x * e], axis=-1)


def complex_decay(x, p):
    """A exp(-gamma_2 t) exp(i(phi0 - dw t)); p = (A, gamma_2, dw, phi0)."""
    a, g, dw, ph = p
    return a * np.exp(-g * x + 1j * (ph - dw * x))


def complex_decay_jac(x, p):
    a, g, dw, ph = p
    v = np.exp(-g * x + 1j * (ph - dw * x))
    return np.stack([v, -a * x * v, -1j * a * x * v, 1j * a * v], axis=-1)


def gaussian(x, p):
    """Unnormalised Gaussian; p = (height, mean, sigma)."""
    h, mu, s = p
    return h * np.exp(-0.5 * ((x - mu) / s) ** 2)


def gaussian_jac(x, p):
    h, mu, s = p
    z = (x - mu) / s
    e = np.exp(-0.5 * z * z)
    return np.stack([e, h * e * z / s, h * e * z * z / s], axis=-1)


def proportional(x, p):
    return p[0] * x


def proportional_jac(x, p):
    return np.asarray(x, dtype=float)[:, None] * np.ones((1, 1))


def flux_arch(x, p, ec=0.252e9):
    """Transmon f01 (Hz) vs reduced flux; p = (ej_max,)."""
    c = np.abs(np.cos(np.pi * x))
    return np.sqrt(8.0 * p[0] * c * ec) - ec


def flux_arch_jac(x, p, ec=0.252e9):
    c = np.abs(np.cos(np.pi * x))
    return (4.0 * c * ec / np.sqrt(8.0 * p[0] * c * ec))[:, None]


def _u(rng, lo, hi, n=None):
    return rng.uniform(lo, hi, n)


# name -> (model, jac, param sampler, abscissa sampler); samplers take a Generator.
REGISTRY = {
    "lorentzian": (lorentzian, lorentzian_jac,
                   lambda r: np.array([_u(r, -1, 1), _u(r, 0.2, 2), _u(r, 0.5, 3)]),
                   lambda r: _u(r, -5, 5, 40)),
    "triplet": (triplet, triplet_jac,
                lambda r: np.array([_u(r, -1, 1), _u(r, 0.5, 1.5), _u(r, 0.5, 2), _u(r, 5, 20),
                                    _u(r, 0.5, 2), _u(r, 0.2, 1), _u(r, 0.5, 2), _u(r, 0.2, 1)]),
                lambda r: _u(r, -30, 30, 80)),
    "weak_reflection": (weak_reflection, weak_reflection_jac,
                        lambda r: np.array([_u(r, -1, 1), _u(r, 0.5, 3), _u(r, 0.5, 2)]),
                        lambda r: _u(r, -6, 6, 40)),
    "circle_phase": (circle_phase, circle_phase_jac,
                     lambda r: np.array([_u(r, -4, 0), _u(r, -1, 1), _u(r, 0.5, 2)]),
                     lambda r: _u(r, -6, 6, 40)),
    "p_incoh": (p_incoh, p_incoh_jac,
                lambda r: np.array([_u(r, 0.5, 3), _u(r, 0.2, 2), _u(r, 0.0, 0.5)]),
                lambda r: _u(r, 0.05, 10, 40)),
    "p_loss": (p_loss, p_loss_jac,
               lambda r: np.array([_u(r, 0.05, 1), _u(r, 0.2, 2)]),
               lambda r: _u(r, 0.05, 10, 40)),
    "p_coh": (p_coh, p_coh_jac,
              lambda r: np.array([_u(r, 0.5, 3), _u(r, 0.05, 1), _u(r, 0.0, 0.5)]),
              lambda r: _u(r, 0.05, 10, 40)),
    "exp_decay": (exp_decay, exp_decay_jac,
                  lambda r: np.array([_u(r, 0.5, 3), _u(r, 0.2, 2)]),
                  lambda r: _u(r, 0, 5, 40)),
    "complex_decay": (complex_decay, complex_decay_jac,
                      lambda r: np.array([_u(r, 0.2, 2), _u(r, 0.2, 2), _u(r, -3, 3), _u(r, -3, 3)]),
                      lambda r: _u(r, 0, 5, 40)),
    "gaussian": (gaussian, gaussian_jac,
                 lambda r: np.array([_u(r, 1, 100), _u(r, -1, 1), _u(r, 0.3, 2)]),
                 lambda r: _u(r, -4, 4, 40)),
    "proportional": (proportional, proportional_jac,
                     lambda r: np.array([_u(r, 0.1, 10)]),
                     lambda r: _u(r, 0, 5, 20)),
    "flux_arch": (flux_arch, flux_arch_jac,
                  lambda r: np.array([_u(r, 10e9, 25e9)]),
                  lambda r: _u(r, -0.4, 0.4, 20)),
}
