"""CSV data files, JSON configs and fit-result JSON.

CSV files are UTF-8 with one header row, '.' decimals and 17 significant
digits, so values survive a write/read round trip exactly. Frequencies are in
Hz at this boundary and converted to rad/s on read.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional

import jsonschema
import numpy as np

from .dynamics import ComplexTrace
from .exceptions import ConfigError
from .presets import SCHEMA_VERSION, default_config, merge
from .qed.spectrum import Spectrum
from .units import TWO_PI

FLOAT_FMT = "%.17g"

COLUMNS = {
    "reflection": (("freq_hz", "re_r", "im_r"), ("sigma_re", "sigma_im")),
    "spectrum": (("detuning_hz", "psd"), ("sigma",)),
    "powers": (("rabi_hz", "p_in", "p_coh", "p_incoh", "p_loss"),
               ("sigma_in", "sigma_coh", "sigma_incoh", "sigma_loss")),
    "dynamics_amplitude": (("t_s", "re_v", "im_v"), ("sigma",)),
    "dynamics_power": (("t_s", "power"), ("sigma",)),
}


class DataFileError(ConfigError):
    """Empty, malformed or mis-keyed data file."""


# ---------------------------------------------------------------- CSV

def write_csv(path, header, columns):
    """Write equal-length columns under ``header`` with 17 significant digits."""
    cols = [np.asarray(c, dtype=float) for c in columns]
    n = {c.size for c in cols}
    if len(n) != 1:
        raise ValueError("columns must have equal length")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in zip(*cols):
            w.writerow([FLOAT_FMT % v for v in row])


def read_csv(path, required, optional=()):
    """Columns of a CSV file as float arrays keyed by header name.

    Raises
    ------
    DataFileError
        If the file is empty, has no data rows, lacks a required column,
        carries an unknown column, or holds a non-numeric value.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataFileError(f"{path}: {exc.strerror or exc}", path=str(path)) from exc
    rows = list(csv.reader(text.splitlines()))
    rows = [r for r in rows if any(c.strip() for c in r)]
    if not rows:
        raise DataFileError(f"{path}: empty file", path=str(path))
    header = [h.strip() for h in rows[0]]
    for name in required:
        if name not in header:
            raise DataFileError(f"{path}: missing column {name!r} (found {header})", path=name)
    allowed = set(required) | set(optional)
    for name in header:
        if name not in allowed:
            raise DataFileError(f"{path}: unexpected column {name!r}", path=name)
    if len(rows) < 2:
        raise DataFileError(f"{path}: no data rows", path=str(path))
    out = {h: [] for h in header}
    for k, r in enumerate(rows[1:], start=2):
        if len(r) != len(header):
            raise DataFileError(f"{path}: line {k} has {len(r)} fields, expected {len(header)}",
                                path=f"line {k}")
        for h, v in zip(header, r):
            try:
                out[h].append(float(v))
            except ValueError as exc:
                raise DataFileError(f"{path}: line {k}, column {h!r}: not a number: {v!r}",
                                    path=h) from exc
    return {h: np.asarray(v) for h, v in out.items()}


def _sniff_header(path):
    try:
        with open(path, encoding="utf-8") as fh:
            line = fh.readline()
    except OSError as exc:
        raise DataFileError(f"{path}: {exc.strerror or exc}", path=str(path)) from exc
    if not line.strip():
        raise DataFileError(f"{path}: empty file", path=str(path))
    return [h.strip() for h in line.strip().split(",")]


@dataclass
class ReflectionRecord:
    omega: np.ndarray
    r: np.ndarray
    sigma: Optional[np.ndarray] = None


def write_reflection(path, omega, r, sigma=None):
    """``sigma`` is the per-quadrature standard deviation."""
    r = np.asarray(r, dtype=complex)
    cols = [np.asarray(omega) / TWO_PI, r.real, r.imag]
    header = list(COLUMNS["reflection"][0])
    if sigma is not None:
        s = np.broadcast_to(np.asarray(sigma, dtype=float), r.shape)
        cols += [s, s]
        header += list(COLUMNS["reflection"][1])
    write_csv(path, header, cols)


def read_reflection(path) -> ReflectionRecord:
    req, opt = COLUMNS["reflection"]
    d = read_csv(path, req, opt)
    sigma = None
    if "sigma_re" in d or "sigma_im" in d:
        parts = [d[k] for k in opt if k in d]
        sigma = np.sqrt(np.mean(np.square(parts), axis=0))
    return ReflectionRecord(TWO_PI * d["freq_hz"], d["re_r"] + 1j * d["im_r"], sigma)


def write_spectrum(path, spectrum: Spectrum, omega_01):
    """Detuning column is (omega - omega_01) / 2pi; the PSD stays per rad/s."""
    sigma = spectrum.sigma if spectrum.sigma is not None else np.zeros_like(spectrum.psd)
    write_csv(path, ["detuning_hz", "psd", "sigma"],
              [(spectrum.omega_grid - omega_01) / TWO_PI, spectrum.psd, sigma])


def read_spectrum(path, omega_01) -> Spectrum:
    req, opt = COLUMNS["spectrum"]
    d = read_csv(path, req, opt)
    sigma = d.get("sigma")
    if sigma is not None and not np.all(sigma > 0):
        sigma = None
    return Spectrum(omega_01 + TWO_PI * d["detuning_hz"], d["psd"], sigma)


def write_powers(path, data):
    """``data`` is a :class:`ratefit.synth.PowerData`."""
    req, opt = COLUMNS["powers"]
    cols = [np.asarray(data.rabi) / TWO_PI, data.p_in, data.p_coh, data.p_incoh, data.p_loss]
    header = list(req)
    sig = [data.sigma_in, data.sigma_coh, data.sigma_incoh, data.sigma_loss]
    if all(s is not None for s in sig):
        cols += sig
        header += list(opt)
    write_csv(path, header, cols)


def read_powers(path):
    from .synth import PowerData

    req, opt = COLUMNS["powers"]
    d = read_csv(path, req, opt)
    present = [k for k in opt if k in d]
    if present and len(present) != len(opt):
        missing = [k for k in opt if k not in d]
        raise DataFileError(f"{path}: incomplete sigma columns, missing {missing}", path=missing[0])
    sig = [d.get(k) for k in opt]
    return PowerData(TWO_PI * d["rabi_hz"], d["p_in"], d["p_coh"], d["p_incoh"], d["p_loss"],
                     *sig)


def write_trace(path, trace: ComplexTrace):
    sigma = trace.sigma if trace.sigma is not None else np.zeros(trace.t_grid.shape)
    if trace.role == "amplitude":
        write_csv(path, ["t_s", "re_v", "im_v", "sigma"],
                  [trace.t_grid, trace.values.real, trace.values.imag, sigma])
    else:
        write_csv(path, ["t_s", "power", "sigma"], [trace.t_grid, trace.values, sigma])


def read_trace(path) -> ComplexTrace:
    """Amplitude or power record, chosen by the header."""
    header = _sniff_header(path)
    kind = "dynamics_power" if "power" in header else "dynamics_amplitude"
    req, opt = COLUMNS[kind]
    d = read_csv(path, req, opt)
    sigma = d.get("sigma")
    if sigma is not None and not np.all(sigma > 0):
        sigma = None
    if kind == "dynamics_power":
        return ComplexTrace(d["t_s"], d["power"], sigma, role="power")
    return ComplexTrace(d["t_s"], d["re_v"] + 1j * d["im_v"], sigma, role="amplitude")


# ---------------------------------------------------------------- config

def config_schema() -> dict:
    text = resources.files("ratefit").joinpath("schemas/config.json").read_text(encoding="utf-8")
    return json.loads(text)


def validate_config(cfg) -> None:
    """Raise ConfigError naming the offending field path."""
    validator = jsonschema.Draft202012Validator(config_schema())
    errors = sorted(validator.iter_errors(cfg), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        parts = [str(p) for p in e.absolute_path]
        if e.validator == "additionalProperties" and isinstance(e.instance, dict):
            extra = sorted(set(e.instance) - set(e.schema.get("properties", {})))
            parts += extra[:1]
        where = "/".join(parts) or "<root>"
        raise ConfigError(f"config field {where}: {e.message}", path=where)


def load_config(path=None) -> dict:
    """Defaults overlaid with the JSON file at ``path``, validated."""
    cfg = default_config()
    if path is not None:
        try:
            user = json.loads(Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"{path}: {exc.strerror or exc}", path=str(path)) from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON: {exc.msg} (line {exc.lineno})",
                              path=str(path)) from exc
        if not isinstance(user, dict):
            raise ConfigError(f"{path}: top level must be an object", path="<root>")
        validate_config(user)
        cfg = merge(cfg, user)
    validate_config(cfg)
    return cfg


# ---------------------------------------------------------------- results

_HZ_UNITS = {"rad/s": ("Hz", 1.0 / TWO_PI)}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if obj is None or isinstance(obj, (int, str)):
        return obj
    return repr(obj)


def fit_result_to_dict(fit, kind=None) -> dict:
    """Parameters, one-sigma errors and covariance with rates in Hz.

    Parameters labelled rad/s are divided by 2pi; others keep their unit.
    ``diagnostics`` holds fitter metadata in internal units.
    """
    scale = np.ones(len(fit.names))
    units = {}
    for i, n in enumerate(fit.names):
        u = fit.units.get(n, "")
        if u in _HZ_UNITS:
            units[n], scale[i] = _HZ_UNITS[u]
        else:
            units[n] = u
    values = fit.values * scale
    cov = fit.covariance * np.outer(scale, scale)
    errs = np.sqrt(np.clip(np.diag(cov), 0.0, None))
    return _jsonable({
        "schema_version": SCHEMA_VERSION,
        "kind": kind,
        "names": list(fit.names),
        "params": dict(zip(fit.names, values)),
        "errors": dict(zip(fit.names, errs)),
        "units": units,
        "covariance": cov,
        "converged": bool(fit.converged),
        "n_iter": int(fit.n_iter),
        "residual_norm": float(fit.residual_norm),
        "diagnostics": fit.meta,
    })


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2, allow_nan=True) + "\n"


def write_json(path, obj) -> None:
    Path(path).write_text(dumps(obj), encoding="utf-8")
