"""Command-line entry point: ``ratefit simulate | fit | table1``.

Exit codes: 0 success, 2 bad config or data file, 3 physics validity error,
4 fit did not converge (the partial result is still written), 5 a table row
failed.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import io, pipeline, synth
from .estimators import (FitResult, circle_fit, fit_complex_decay, fit_exponential_power,
                         fit_full_spectrum, fit_mollow_triplet, fit_scattering_powers,
                         single_point_rates)
from .exceptions import ConfigError, FitError, RateFitError, ValidityError
from .units import TWO_PI

EXIT_OK, EXIT_CONFIG, EXIT_PHYSICS, EXIT_NOCONV, EXIT_FAILED_ROW = 0, 2, 3, 4, 5

SIMULATE_KINDS = ("reflection", "spectrum", "powers", "dynamics")
FIT_KINDS = ("reflection", "triplet", "spectrum", "powers", "single-point", "dynamics")


class _Exit(Exception):
    def __init__(self, code, message=""):
        super().__init__(message)
        self.code = code


def _say(args, text):
    if not args.quiet:
        print(text)


def _sidecar(path: Path, payload: dict):
    io.write_json(path.with_suffix(".json"), payload)


# ---------------------------------------------------------------- simulate

def cmd_simulate(args, cfg) -> int:
    out = Path(args.out or f"{args.kind}.csv")
    f01 = synth.device_f01(cfg)
    w01 = TWO_PI * f01
    written = []
    if args.kind == "reflection":
        d = synth.simulate_reflection(cfg, args.seed)
        io.write_reflection(out, d.omega, d.r, d.sigma)
        written.append(out)
    elif args.kind == "spectrum":
        spectra = synth.simulate_spectra(cfg, "spectrum", args.seed)
        for k, sp in enumerate(spectra):
            path = out if len(spectra) == 1 else out.with_name(f"{out.stem}_{k}{out.suffix}")
            io.write_spectrum(path, sp, w01)
            written.append(path)
    elif args.kind == "powers":
        io.write_powers(out, synth.simulate_powers(cfg, args.seed))
        written.append(out)
    else:
        io.write_trace(out, synth.simulate_dynamics(cfg, None, args.seed))
        written.append(out)
    _sidecar(out, {"kind": args.kind, "seed": args.seed, "f01_hz": f01,
                   "files": [p.name for p in written], "config": cfg,
                   "schema_version": io.SCHEMA_VERSION})
    _say(args, "\n".join(f"wrote {p}" for p in written))
    return EXIT_OK


# ---------------------------------------------------------------- fit

def _ref(cfg, key, device_key):
    v = cfg["fit"].get(key)
    return TWO_PI * (v if v is not None else cfg["device"][device_key])


def _fit_single_point(data, cfg) -> FitResult:
    """Per-row estimates; the result is their mean with the per-row
    propagated sigma, and the rows are listed in ``meta``."""
    f = cfg["fit"]
    gr = _ref(cfg, "gamma_r_ref_hz", "gamma_r_hz")
    g2 = f.get("gamma_2_ref_hz")
    g2 = None if g2 is None else TWO_PI * g2
    est, err = [], []
    for k in range(np.size(data.rabi)):
        try:
            r = single_point_rates(float(data.p_loss[k]), float(data.p_incoh[k]),
                                   float(data.rabi[k]), gamma_r_ref=gr,
                                   gamma_phi=TWO_PI * f["gamma_phi_hz"], gamma_2_ref=g2,
                                   saturation_correction=f["saturation_correction"])
        except ValueError as exc:
            raise type(exc)(f"row {k + 1} (rabi {data.rabi[k] / TWO_PI:.6g} Hz): {exc}") from exc
        est.append(r.gamma_n)
        s = 0.0 if data.sigma_loss is None else float(data.sigma_loss[k])
        err.append(2.0 * (1.0 + r.correction) * s)
    est = np.asarray(est)
    sigma = float(np.sqrt(np.mean(np.square(err))))
    res = FitResult(("gamma_n",), [est.mean()], [[sigma**2]], units={"gamma_n": "rad/s"})
    res.meta.update(rows_hz=(est / TWO_PI).tolist(), gamma_r_ref=gr)
    return res


def _run_fit(kind, paths, cfg) -> FitResult:
    w01 = TWO_PI * synth.device_f01(cfg)
    if kind == "reflection":
        d = io.read_reflection(paths[0])
        return circle_fit(d.omega, d.r, d.sigma)
    if kind == "triplet":
        return fit_mollow_triplet(io.read_spectrum(paths[0], w01))
    if kind == "spectrum":
        spectra = [io.read_spectrum(p, w01) for p in paths]
        drives = synth.spectrum_drives(cfg, "spectrum")
        if len(drives) != len(spectra):
            raise ConfigError(f"spectrum.detuning_hz lists {len(drives)} drives for "
                              f"{len(spectra)} data files", path="spectrum/detuning_hz")
        gr = _ref(cfg, "gamma_r_ref_hz", "gamma_r_hz")
        g2_hz = cfg["fit"].get("gamma_2_ref_hz")
        g2 = 0.5 * gr if g2_hz is None else TWO_PI * g2_hz
        init = {"gamma_1": 2.0 * g2, "gamma_phi": 0.02 * g2,
                "omega": [d.rabi for d in drives], "delta": [d.delta for d in drives]}
        return fit_full_spectrum(spectra, gr, [d.omega_p for d in drives], init)
    if kind == "powers":
        d = io.read_powers(paths[0])
        rel = cfg["fit"]["rabi_rel_sigma"]
        rel = cfg["powers"]["rabi_rel_sigma"] if rel is None else rel
        return fit_scattering_powers(d.rabi, d.p_coh, d.p_incoh, d.p_loss, d.sigma_coh,
                                     d.sigma_incoh, d.sigma_loss, rabi_rel_sigma=rel)
    if kind == "single-point":
        return _fit_single_point(io.read_powers(paths[0]), cfg)
    trace = io.read_trace(paths[0])
    if trace.role == "power":
        return fit_exponential_power(trace)
    return fit_complex_decay(trace)


def cmd_fit(args, cfg) -> int:
    paths = [Path(p) for p in args.data]
    if args.kind != "spectrum" and len(paths) != 1:
        raise ConfigError(f"fit {args.kind} takes exactly one data file", path="--data")
    out = Path(args.out or f"fit_{args.kind.replace('-', '_')}.json")
    try:
        fit = _run_fit(args.kind, paths, cfg)
    except FitError as exc:
        io.write_json(out, {"schema_version": io.SCHEMA_VERSION, "kind": args.kind,
                            "converged": False, "error": f"{type(exc).__name__}: {exc}",
                            "params": {}, "errors": {}})
        raise _Exit(EXIT_NOCONV, f"fit failed: {exc}") from exc
    payload = io.fit_result_to_dict(fit, kind=args.kind)
    io.write_json(out, payload)
    for n in fit.names:
        _say(args, f"{n:>14s} = {payload['params'][n]:.6g} +- {payload['errors'][n]:.2g} "
                   f"{payload['units'][n]}")
    if not fit.converged:
        raise _Exit(EXIT_NOCONV, "fit did not converge; partial result written")
    return EXIT_OK


# ---------------------------------------------------------------- table1

def format_table(report) -> str:
    names = ("gamma_r", "gamma_n", "gamma_phi", "gamma_1", "gamma_2")
    lines = [f"{'method':<12s}" + "".join(f"{n:>16s}" for n in names) + "  (kHz)"]
    for row in report["rows"]:
        if row["failed"]:
            lines.append(f"{row['method']:<12s}  FAILED: {row['message']}")
            continue
        cells = []
        for n in names:
            if n in row["values_hz"]:
                cells.append(f"{row['values_hz'][n] / 1e3:9.1f}({row['errors_hz'][n] / 1e3:.1f})")
            else:
                cells.append("")
        tag = "  95%" if row["confidence"] > 0.9 else ""
        lines.append(f"{row['method']:<12s}" + "".join(f"{c:>16s}" for c in cells) + tag)
    c = report["consistency"]
    lines.append(f"consistent within {c['n_sigma']:g} sigma: {c['consistent']}")
    return "\n".join(lines)


def cmd_table1(args, cfg) -> int:
    rows, _ = pipeline.table1(cfg, args.seed)
    report = pipeline.report(rows, cfg, args.seed)
    text = io.dumps(report)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    _say(args, format_table(report))
    return EXIT_FAILED_ROW if report["any_failed"] else EXIT_OK


# ---------------------------------------------------------------- main

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config overlaid on the defaults")
    common.add_argument("--out", help="output path")
    common.add_argument("--seed", type=int, default=0, help="noise seed (default 0)")
    common.add_argument("--quiet", action="store_true", help="no console summary")

    p = argparse.ArgumentParser(prog="ratefit", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("simulate", parents=[common], help="write a synthetic data set")
    s.add_argument("kind", choices=SIMULATE_KINDS)
    f = sub.add_parser("fit", parents=[common], help="fit a data set")
    f.add_argument("kind", choices=FIT_KINDS)
    f.add_argument("--data", nargs="+", required=True, help="CSV file(s)")
    sub.add_parser("table1", parents=[common], help="cross-method rate table (JSON report)")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = io.load_config(args.config)
        handler = {"simulate": cmd_simulate, "fit": cmd_fit, "table1": cmd_table1}[args.command]
        return handler(args, cfg)
    except _Exit as exc:
        print(f"ratefit: {exc}", file=sys.stderr)
        return exc.code
    except ConfigError as exc:
        print(f"ratefit: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValidityError, RateFitError, ValueError) as exc:
        print(f"ratefit: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PHYSICS


if __name__ == "__main__":
    sys.exit(main())
