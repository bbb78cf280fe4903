"""Assemble per-method rate tables from partial estimates."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from ..exceptions import FitWarning
from ..units import TWO_PI

RATE_NAMES = ("gamma_r", "gamma_n", "gamma_phi", "gamma_1", "gamma_2")

# target <- linear combination of available quantities
_RULES = (
    ("gamma_n", {"gamma_1": 1.0, "gamma_r": -1.0}),
    ("gamma_1", {"gamma_r": 1.0, "gamma_n": 1.0}),
    ("gamma_phi", {"gamma_2": 1.0, "gamma_1": -0.5}),
    ("gamma_2", {"gamma_1": 0.5, "gamma_phi": 1.0}),
    ("gamma_1", {"gamma_2": 2.0, "gamma_phi": -2.0}),
    ("gamma_r", {"gamma_1": 1.0, "gamma_n": -1.0}),
)


@dataclass
class RateRecord:
    """One row of a cross-method rate table (values and one-sigma errors in rad/s).

    ``source`` tags each entry ``measured``, ``derived`` or ``reference``;
    reference entries are inputs from another method and are not shown.
    ``report_scale`` multiplies the errors in reported output (1.96 where the
    method quotes 95 % intervals).
    """

    method: str
    values: dict = field(default_factory=dict)
    errors: dict = field(default_factory=dict)
    source: dict = field(default_factory=dict)
    report_scale: float = 1.0
    warnings: list = field(default_factory=list)
    failed: bool = False
    message: str = ""

    @property
    def shown(self):
        return [n for n in RATE_NAMES if n in self.values and self.source.get(n) != "reference"]

    def to_hz(self) -> dict:
        """Shown entries as {name: (value_hz, reported_error_hz)}."""
        return {n: (self.values[n] / TWO_PI, self.report_scale * self.errors[n] / TWO_PI)
                for n in self.shown}


def combine_rates(measured: dict, gamma_r_ref=None, method="", report_scale=1.0,
                  references=None) -> RateRecord:
    """Complete a partial rate estimate using gamma_1 = gamma_r + gamma_n and
    gamma_2 = gamma_1/2 + gamma_phi, propagating independent errors.

    Parameters
    ----------
    measured : dict
        {name: (value, sigma)} for any of gamma_r, gamma_n, gamma_phi,
        gamma_1, gamma_2 (rad/s).
    gamma_r_ref : (value, sigma), optional
        Radiative rate from a reference method.
    references : dict, optional
        Further {name: (value, sigma)} inputs from other methods.
    """
    vals, errs, src = {}, {}, {}
    for k, (v, s) in measured.items():
        if k not in RATE_NAMES:
            raise KeyError(f"unknown rate {k!r}")
        if not (np.isfinite(v) and np.isfinite(s) and s >= 0):
            raise ValueError(f"{k}: value and sigma must be finite, sigma >= 0")
        vals[k], errs[k], src[k] = float(v), float(s), "measured"
    refs = dict(references or {})
    if gamma_r_ref is not None:
        refs.setdefault("gamma_r", gamma_r_ref)
    for k, (v, s) in refs.items():
        if k not in RATE_NAMES:
            raise KeyError(f"unknown rate {k!r}")
        if k not in vals:
            vals[k], errs[k], src[k] = float(v), float(s), "reference"
    changed = True
    while changed:
        changed = False
        for target, combo in _RULES:
            if target in vals or not all(k in vals for k in combo):
                continue
            vals[target] = sum(c * vals[k] for k, c in combo.items())
            errs[target] = float(np.sqrt(sum((c * errs[k]) ** 2 for k, c in combo.items())))
            src[target] = "derived"
            changed = True
    rec = RateRecord(method, vals, errs, src, report_scale=report_scale)
    for k in rec.shown:
        if vals[k] + 2.0 * errs[k] < 0:
            msg = f"{method or 'estimate'}: {k} negative beyond 2 sigma ({vals[k]:.4g} rad/s)"
            rec.warnings.append(msg)
            warnings.warn(msg, FitWarning, stacklevel=2)
    return rec


def pairwise_consistency(records, n_sigma=2.0, rel_tol=1e-9, rule="overlap"):
    """Pairs of rows whose shared shown quantities disagree.

    ``rule="overlap"`` requires the two n_sigma error bars to overlap,
    |a - b| <= n_sigma (s_a + s_b); ``rule="combined"`` requires
    |a - b| <= n_sigma sqrt(s_a^2 + s_b^2). ``rel_tol`` of the value is
    allowed on top, so noiseless rows agreeing to rounding pass.

    Returns
    -------
    list of (method_a, method_b, name, z)
        z is |a - b| in units of the rule's combined sigma.
    """
    if rule not in ("overlap", "combined"):
        raise ValueError(f"unknown rule {rule!r}")
    bad = []
    rows = [r for r in records if not r.failed]
    for i, a in enumerate(rows):
        for b in rows[i + 1:]:
            for n in sorted(set(a.shown) & set(b.shown)):
                ea, eb = a.errors[n], b.errors[n]
                s = ea + eb if rule == "overlap" else float(np.hypot(ea, eb))
                d = abs(a.values[n] - b.values[n])
                if d <= n_sigma * s + rel_tol * max(abs(a.values[n]), abs(b.values[n])):
                    continue
                bad.append((a.method, b.method, n, float(d / s) if s > 0 else float("inf")))
    return bad
