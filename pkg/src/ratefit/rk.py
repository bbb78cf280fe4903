"""Embedded Dormand-Prince 5(4) integrator for small dense (complex) systems.

Outputs land exactly on the requested time grid: steps are clipped at grid
points rather than interpolated.
"""
from __future__ import annotations

import numpy as np

from .exceptions import IntegrationError

_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = np.zeros((7, 7))
_A[1, :1] = [1 / 5]
_A[2, :2] = [3 / 40, 9 / 40]
_A[3, :3] = [44 / 45, -56 / 15, 32 / 9]
_A[4, :4] = [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]
_A[5, :5] = [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]
_A[6, :6] = [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]
_B5 = _A[6].copy()
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4

ORDER = 5


def _step(f, t, y, h, k1):
    k = np.empty((7, y.size), dtype=np.result_type(y, k1))
    k[0] = k1
    for i in range(1, 7):
        k[i] = f(t + _C[i] * h, y + h * (_A[i, :i] @ k[:i]))
    # the 7th stage sits at the 5th-order solution (FSAL)
    y5 = y + h * (_B5 @ k)
    return y5, h * (_E @ k), k[6]


def integrate(f, t_grid, y0, rtol=1e-10, atol=1e-12, h0=None, max_steps=10_000_000,
              fixed_step=None):
    """Integrate dy/dt = f(t, y) and return y on ``t_grid`` (shape (n, dim)).

    With ``fixed_step`` set, uniform steps of (at most) that size are taken
    without error control; this is only for convergence-order studies.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size == 0:
        raise ValueError("t_grid must be a non-empty 1-D array")
    if t_grid.size > 1 and np.any(np.diff(t_grid) <= 0):
        raise ValueError("t_grid must be strictly increasing")
    y = np.array(y0, dtype=complex if np.iscomplexobj(y0) else float)
    out = np.empty((t_grid.size, y.size), dtype=y.dtype)
    out[0] = y
    t = float(t_grid[0])
    k1 = f(t, y)

    if fixed_step is not None:
        for j in range(1, t_grid.size):
            span = t_grid[j] - t
            n = max(1, int(np.ceil(span / fixed_step - 1e-12)))
            h = span / n
            for _ in range(n):
                y, _, k1 = _step(f, t, y, h, k1)
                t += h
            t = float(t_grid[j])
            out[j] = y
        return out

    if h0 is None:
        scale = atol + rtol * np.abs(y)
        d0 = np.sqrt(np.mean(np.abs(y / scale) ** 2))
        d1 = np.sqrt(np.mean(np.abs(k1 / scale) ** 2))
        h = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
        total = t_grid[-1] - t_grid[0]
        if total > 0:
            h = min(h, total)
    else:
        h = float(h0)

    steps = 0
    for j in range(1, t_grid.size):
        t_end = float(t_grid[j])
        while t < t_end:
            last = False
            if t + h >= t_end:
                h_try = t_end - t
                last = True
            else:
                h_try = h
            y_new, err, k_new = _step(f, t, y, h_try, k1)
            scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
            err_norm = float(np.sqrt(np.mean(np.abs(err / scale) ** 2)))
            steps += 1
            if steps > max_steps:
                raise IntegrationError("step budget exhausted", t)
            if err_norm <= 1.0:
                t = t_end if last else t + h_try
                y, k1 = y_new, k_new
                fac = 5.0 if err_norm == 0 else min(5.0, max(0.2, 0.9 * err_norm ** (-1 / ORDER)))
                if not last:
                    h = h_try * fac
                else:
                    h = max(h, h_try * fac)
            else:
                h = h_try * max(0.2, 0.9 * err_norm ** (-1 / ORDER))
                if h <= 1e-14 * max(1.0, abs(t)) or h < 1e-300:
                    raise IntegrationError("step size underflow", t)
        out[j] = y
    return out
