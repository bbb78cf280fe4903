"""Time-domain Bloch dynamics, two-time correlations and pulsed protocols."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import rk
from .exceptions import SingularityError
from .qed.bloch import BlochVector, bloch_matrix, steady_state_values
from .qed.rates import DriveConfig, RateSet
from .qed.spectrum import SPECTRUM_NORM, fluctuation_initial

DEFAULT_RTOL = 1e-10
DEFAULT_ATOL = 1e-12


@dataclass(frozen=True)
class BlochTrajectory:
    t_grid: np.ndarray
    states: np.ndarray  # (n, 3) complex: s1, s1*, s2

    @property
    def s1(self):
        return self.states[:, 0]

    @property
    def s2(self):
        return self.states[:, 2].real

    def __len__(self):
        return self.t_grid.size

    def __getitem__(self, i) -> BlochVector:
        return BlochVector.from_state(self.states[i])

    def positivity_violation(self) -> float:
        """Largest excursion outside the physical Bloch ball (0 if none)."""
        s2 = self.s2
        over = np.maximum(-s2, s2 - 1.0)
        cone = np.abs(self.s1) ** 2 - s2 * (1.0 - s2)
        return float(max(0.0, over.max(initial=0.0), cone.max(initial=0.0)))


@dataclass(frozen=True)
class ComplexTrace:
    """Sampled emission record.

    ``role`` is ``"amplitude"`` for complex field/<sigma_-> samples or
    ``"power"`` for real photon-flux samples.
    """

    t_grid: np.ndarray
    values: np.ndarray
    sigma: Optional[np.ndarray] = None
    role: str = "amplitude"

    def __post_init__(self):
        t = np.asarray(self.t_grid, dtype=float)
        v = np.asarray(self.values)
        if t.ndim != 1 or t.shape != v.shape:
            raise ValueError("t_grid and values must be 1-D and equally long")
        if self.role not in ("amplitude", "power"):
            raise ValueError("role must be 'amplitude' or 'power'")
        v = v.astype(complex) if self.role == "amplitude" else v.real.astype(float)
        object.__setattr__(self, "t_grid", t)
        object.__setattr__(self, "values", v)
        if self.sigma is not None:
            s = np.broadcast_to(np.asarray(self.sigma, dtype=float), t.shape).copy()
            object.__setattr__(self, "sigma", s)

    @property
    def dt(self):
        return float(np.mean(np.diff(self.t_grid))) if self.t_grid.size > 1 else 0.0


def _linear_rhs(m, b):
    def f(_t, y):
        return m @ y + b
    return f


def bloch_integrate(initial: BlochVector, drive: DriveConfig, rates: RateSet, t_grid,
                    rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL) -> BlochTrajectory:
    """Integrate the optical Bloch equations from ``initial`` over ``t_grid``."""
    m, b = bloch_matrix(drive.delta, drive.rabi, rates.gamma_1, rates.gamma_2)
    t_grid = np.asarray(t_grid, dtype=float)
    ys = rk.integrate(_linear_rhs(m, b), t_grid, initial.as_state(), rtol=rtol, atol=atol)
    return BlochTrajectory(t_grid, ys)


@dataclass(frozen=True)
class CorrelationTrajectory:
    """s3 = <s+(t)s-(t+tau)>, s4 = <s+(t)s+(t+tau)>, s5 = <s+(t)s+s-(t+tau)>
    (pump frame, stationary t)."""

    tau: np.ndarray
    s3: np.ndarray
    s4: np.ndarray
    s5: np.ndarray


def correlation_trajectory(drive: DriveConfig, rates: RateSet, tau_grid,
                           rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL) -> CorrelationTrajectory:
    """Two-time correlations by the quantum regression theorem.

    The correlation vector obeys the Bloch equations with the inhomogeneity
    multiplied by <sigma_+> = s1*, which makes it relax to
    s1* (s1, s1*, s2).
    """
    tau = np.asarray(tau_grid, dtype=float)
    if tau.size == 0 or tau[0] != 0:
        raise ValueError("tau_grid must start at 0")
    g1, g2 = rates.gamma_1, rates.gamma_2
    m, b = bloch_matrix(drive.delta, drive.rabi, g1, g2)
    s1, s2 = steady_state_values(drive.delta, drive.rabi, g1, g2)
    y0 = np.array([s2, 0.0, 0.0], dtype=complex)
    ys = rk.integrate(_linear_rhs(m, b * np.conj(s1)), tau, y0, rtol=rtol, atol=atol)
    return CorrelationTrajectory(tau, ys[:, 0], ys[:, 1], ys[:, 2])


def resolvent_i(x, drive: DriveConfig, rates: RateSet):
    """I(w) = -[M + i x]^-1 delta S(0) at x = w - w_p, all three components."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    g1, g2 = rates.gamma_1, rates.gamma_2
    m, _ = bloch_matrix(drive.delta, drive.rabi, g1, g2)
    ds0 = fluctuation_initial(*steady_state_values(drive.delta, drive.rabi, g1, g2))
    mats = m[None] + 1j * x[:, None, None] * np.eye(3)[None]
    # smallest singular value relative to the largest flags singular systems
    sv = np.linalg.svd(mats, compute_uv=False)
    sing = sv[:, -1] <= 1e-14 * sv[:, 0]
    if np.any(sing):
        k = int(np.flatnonzero(sing)[0])
        raise SingularityError(f"M + i(w - w_p) is singular at x = {x[k]!r} rad/s", omega=x[k])
    rhs = np.broadcast_to(ds0, (x.size, 3))[..., None]
    return -np.linalg.solve(mats, rhs)[..., 0]


def spectrum_numeric(omega, drive: DriveConfig, rates: RateSet):
    """Incoherent PSD from the numeric 3x3 resolvent (the oracle path).

    Accepts a scalar or an array of absolute detection frequencies (rad/s).
    """
    x = np.asarray(omega, dtype=float) - drive.omega_p
    i3 = resolvent_i(np.ravel(x), drive, rates)[:, 0]
    out = SPECTRUM_NORM * rates.gamma_r * i3.real
    return float(out[0]) if np.ndim(omega) == 0 else out.reshape(np.shape(omega))


def _fourier_one_sided(x, tau, f, fprime0):
    """Trapezoid estimate of int_0^T exp(i x tau) f(tau) dtau on a uniform grid,
    with the Euler-Maclaurin end correction at tau = 0 (f(T) ~ 0)."""
    h = tau[1] - tau[0]
    w = np.full(tau.size, h)
    w[0] = w[-1] = 0.5 * h
    out = np.empty(x.size, dtype=complex)
    wf = w * f
    for start in range(0, x.size, 64):
        xs = x[start:start + 64]
        out[start:start + 64] = np.exp(1j * np.outer(xs, tau)) @ wf
    g0 = 1j * x * f[0] + fprime0
    return out + h * h / 12.0 * g0


def spectrum_from_correlation(omega, drive: DriveConfig, rates: RateSet, tau_max_factor=50.0,
                              phase_step=0.4, rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL):
    """Incoherent PSD by Fourier transforming the integrated s3(tau).

    The correlation is integrated to tau_max = ``tau_max_factor`` / gamma_2
    and truncated there (the tail is below e^-50 by default). The time step
    keeps the largest phase advance per sample under ``phase_step`` rad;
    the end-corrected trapezoid rule is fourth order in that step.
    """
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    x = omega - drive.omega_p
    g1, g2 = rates.gamma_1, rates.gamma_2
    tau_max = tau_max_factor / g2
    w_max = np.max(np.abs(x)) + np.hypot(drive.delta, drive.rabi) + g1
    n = int(np.ceil(tau_max * w_max / phase_step)) + 1
    tau = np.linspace(0.0, tau_max, n)
    corr = correlation_trajectory(drive, rates, tau, rtol=rtol, atol=atol)
    s1, s2 = steady_state_values(drive.delta, drive.rabi, g1, g2)
    ds3 = corr.s3 - abs(s1) ** 2
    m, _ = bloch_matrix(drive.delta, drive.rabi, g1, g2)
    fprime0 = (m @ fluctuation_initial(s1, s2))[0]
    i3 = _fourier_one_sided(x, tau, ds3, fprime0)
    return SPECTRUM_NORM * rates.gamma_r * i3.real


def pulse_prepare(angle, mode="instantaneous", duration=None, rates: RateSet | None = None,
                  omega_q=2 * np.pi * 5e9) -> BlochVector:
    """Bloch vector after a resonant rotation by ``angle`` from the ground state.

    The instantaneous rotation follows the same sign as the equations of
    motion: s1 = -(i/2) sin(angle), s2 = sin^2(angle/2). ``mode="finite"``
    integrates a square pulse of the given ``duration`` (s) with
    Omega = angle / duration, including decay at ``rates``.
    """
    if not 0 <= angle <= np.pi:
        raise ValueError("angle must lie in [0, pi]")
    if mode == "instantaneous":
        return BlochVector(-0.5j * np.sin(angle), np.sin(0.5 * angle) ** 2)
    if mode != "finite":
        raise ValueError(f"unknown pulse mode {mode!r}")
    if duration is None or not duration > 0:
        raise ValueError("finite pulses need duration > 0")
    rates = rates if rates is not None else RateSet(0.0, 0.0, 0.0)
    drive = DriveConfig(omega_q, omega_q, angle / duration)
    traj = bloch_integrate(BlochVector.ground(), drive, rates, [0.0, duration])
    y = traj.states[-1]
    return BlochVector(complex(y[0]), float(np.clip(y[2].real, 0.0, 1.0)))


def ramsey_emission(delta_pulse, rates: RateSet, t_grid, scale=1.0) -> ComplexTrace:
    """Free decay of <sigma_-> after an ideal pi/2 pulse.

    values = scale * (1/2) exp(-gamma_2 tau) exp(-i delta_pulse tau), with
    delta_pulse = w_01 - w_pulse. ``scale`` converts to field units, e.g.
    sqrt(gamma_r) for the emitted amplitude in sqrt(photons/s).
    """
    t = np.asarray(t_grid, dtype=float)
    vals = 0.5 * scale * np.exp(-rates.gamma_2 * t) * np.exp(-1j * delta_pulse * t)
    return ComplexTrace(t, vals, role="amplitude")


def t1_power_trace(rates: RateSet, t_grid, initial_sz=1.0) -> ComplexTrace:
    """Emitted photon flux (gamma_r/2)(1 + <sigma_z>) exp(-gamma_1 tau)."""
    if not -1.0 <= initial_sz <= 1.0:
        raise ValueError("initial_sz must lie in [-1, 1]")
    t = np.asarray(t_grid, dtype=float)
    vals = 0.5 * rates.gamma_r * (1.0 + initial_sz) * np.exp(-rates.gamma_1 * t)
    return ComplexTrace(t, vals, role="power")
