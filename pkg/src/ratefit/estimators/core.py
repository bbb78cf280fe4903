"""Fit result container and the damped least-squares engine."""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import least_squares

from ..exceptions import RankDeficiencyError

#: Columns of the normalised Jacobian whose singular value falls below this
#: fraction of the largest are treated as unidentifiable.
RANK_RTOL = 1e-7


@dataclass
class FitResult:
    """Named estimates with covariance and convergence metadata.

    ``values`` and ``covariance`` are in internal units (rad/s for rates);
    ``units`` maps a parameter name to its unit label for reporting.
    """

    names: tuple
    values: np.ndarray
    covariance: np.ndarray
    residual_norm: float = 0.0
    n_iter: int = 0
    converged: bool = True
    units: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.names = tuple(self.names)
        self.values = np.asarray(self.values, dtype=float)
        cov = np.asarray(self.covariance, dtype=float)
        self.covariance = 0.5 * (cov + cov.T)

    @property
    def params(self) -> dict:
        return dict(zip(self.names, self.values.tolist()))

    @property
    def errors(self) -> dict:
        return dict(zip(self.names, self.sigmas.tolist()))

    @property
    def sigmas(self) -> np.ndarray:
        return np.sqrt(np.clip(np.diag(self.covariance), 0.0, None))

    def index(self, name) -> int:
        return self.names.index(name)

    def __getitem__(self, name) -> float:
        return float(self.values[self.index(name)])

    def error(self, name) -> float:
        i = self.index(name)
        return float(np.sqrt(max(self.covariance[i, i], 0.0)))

    def __contains__(self, name):
        return name in self.names

    def add_derived(self, name, value, gradient, unit=None) -> "FitResult":
        """Append a quantity with first-order propagated covariance.

        ``gradient`` holds d(value)/d(existing parameter), either as an array
        aligned with ``names`` or as a {name: derivative} mapping.
        """
        if isinstance(gradient, dict):
            g = np.zeros(len(self.names))
            for k, v in gradient.items():
                g[self.index(k)] = v
        else:
            g = np.asarray(gradient, dtype=float)
        cross = self.covariance @ g
        n = len(self.names)
        cov = np.zeros((n + 1, n + 1))
        cov[:n, :n] = self.covariance
        cov[:n, n] = cov[n, :n] = cross
        cov[n, n] = g @ cross
        units = dict(self.units)
        if unit is not None:
            units[name] = unit
        return replace(self, names=self.names + (name,), values=np.append(self.values, value),
                       covariance=cov, units=units, meta=dict(self.meta))

    def subset(self, names) -> "FitResult":
        idx = [self.index(n) for n in names]
        return replace(self, names=tuple(names), values=self.values[idx],
                       covariance=self.covariance[np.ix_(idx, idx)],
                       units={k: v for k, v in self.units.items() if k in names},
                       meta=dict(self.meta))


def numeric_jacobian(fun, p, rel_step=1e-6, abs_step=1e-8):
    """Central differences with step h = max(abs_step, rel_step |p|)."""
    p = np.asarray(p, dtype=float)
    cols = []
    for k in range(p.size):
        h = max(abs_step, rel_step * abs(p[k]))
        up, dn = p.copy(), p.copy()
        up[k] += h
        dn[k] -= h
        cols.append((np.asarray(fun(up)) - np.asarray(fun(dn))) / (2.0 * h))
    return np.stack(cols, axis=-1)


def _as_real(z):
    z = np.asarray(z)
    if np.iscomplexobj(z):
        return np.concatenate([z.real, z.imag], axis=0)
    return z.astype(float)


def damped_least_squares(model, x, y, p0, sigma=None, names=None, bounds=None, jac=None,
                         absolute_sigma=False, max_nfev=None, rank_rtol=RANK_RTOL,
                         tol=1e-14, units=None) -> FitResult:
    """Weighted nonlinear least squares with Levenberg-Marquardt damping.

    Parameters
    ----------
    model : callable
        ``model(x, p) -> y_model``; real or complex.
    x, y : array_like
        Abscissa and data. Complex data are fitted in both quadratures.
    p0 : array_like
        Starting point, inside ``bounds`` when bounds are given.
    sigma : array_like, optional
        Per-point standard deviation (per quadrature for complex data).
    jac : callable, optional
        Analytic ``jac(x, p) -> (n, k)`` derivative of the model. Central
        differences are used otherwise.
    absolute_sigma : bool
        If False the covariance is scaled by the reduced chi-square.

    Returns
    -------
    FitResult
        Non-convergence is reported through ``converged``, not raised.

    Raises
    ------
    RankDeficiencyError
        If the Jacobian at the optimum leaves a parameter direction
        unconstrained.
    """
    p0 = np.asarray(p0, dtype=float)
    k = p0.size
    names = tuple(names) if names is not None else tuple(f"p{i}" for i in range(k))
    y = np.asarray(y)
    w = 1.0 / np.broadcast_to(np.asarray(1.0 if sigma is None else sigma, dtype=float), y.shape)
    if not np.all(np.isfinite(w)):
        raise ValueError("sigma must be positive and finite")
    n_res = y.size * (2 if np.iscomplexobj(y) else 1)
    if n_res < k:
        raise ValueError(f"{n_res} residuals cannot determine {k} parameters")

    def residuals(p):
        return _as_real((np.asarray(model(x, p)) - y) * w)

    if jac is not None:
        def jacobian(p):
            return _as_real(np.asarray(jac(x, p)) * w[..., None])
    else:
        def jacobian(p):
            return numeric_jacobian(residuals, p)

    if bounds is None:
        method, lsq_bounds = "lm", (-np.inf, np.inf)
    else:
        method, lsq_bounds = "trf", bounds
        lo, hi = (np.broadcast_to(np.asarray(b, dtype=float), p0.shape) for b in bounds)
        if np.any(p0 < lo) or np.any(p0 > hi):
            raise ValueError("initial parameters lie outside the bounds")
    if max_nfev is None:
        max_nfev = 200 * (k + 1)
    res = least_squares(residuals, p0, jac=jacobian, method=method, bounds=lsq_bounds,
                        x_scale="jac", ftol=tol, xtol=tol, gtol=tol, max_nfev=max_nfev)
    p = res.x
    r = residuals(p)
    jm = jacobian(p)
    chi2 = float(r @ r)
    dof = n_res - k
    cov = _covariance(jm, names, rank_rtol)
    if not absolute_sigma:
        cov = cov * (chi2 / max(dof, 1))
    meta = {"chi2": chi2, "dof": dof, "reduced_chi2": chi2 / max(dof, 1),
            "status": int(res.status), "message": res.message, "method": method}
    return FitResult(names, p, cov, residual_norm=float(np.sqrt(chi2)), n_iter=int(res.nfev),
                     converged=bool(res.status > 0), units=dict(units or {}), meta=meta)


def _covariance(jm, names, rank_rtol):
    norms = np.linalg.norm(jm, axis=0)
    dead = norms == 0
    if np.any(dead):
        raise RankDeficiencyError(
            "Jacobian column vanishes for " + ", ".join(n for n, d in zip(names, dead) if d),
            directions=[{n: 1.0} for n, d in zip(names, dead) if d])
    js = jm / norms
    _, s, vt = np.linalg.svd(js, full_matrices=False)
    weak = s < rank_rtol * s[0]
    if np.any(weak):
        dirs = []
        for v in vt[weak]:
            big = np.abs(v) > 0.1
            dirs.append({n: float(c) for n, c, b in zip(names, v, big) if b})
        desc = "; ".join(" + ".join(f"{c:+.3g}*{n}" for n, c in d.items()) for d in dirs)
        raise RankDeficiencyError(f"unidentifiable parameter combination(s): {desc}", directions=dirs)
    inv = (vt.T / s**2) @ vt
    return inv / np.outer(norms, norms)
