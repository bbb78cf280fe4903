"""Cross-method rate table: recovery, consistency and determinism."""
import warnings

import numpy as np
import pytest

from ratefit import io, pipeline
from ratefit.exceptions import FitWarning
from ratefit.presets import METHODS, default_config, merge

TRUTH_HZ = {"gamma_r": 227e3, "gamma_n": 48e3, "gamma_phi": 3e3, "gamma_1": 275e3,
            "gamma_2": 140.5e3}

# one-sigma errors quoted for the measured device (kHz), per row and rate
QUOTED_KHZ = {
    "Reflection": {"gamma_r": 1, "gamma_2": 1},
    "On-res.MT": {"gamma_n": 7, "gamma_phi": 4, "gamma_1": 7, "gamma_2": 2},
    "Off-res.MT": {"gamma_n": 6, "gamma_phi": 3, "gamma_1": 6, "gamma_2": 3},
    "Scattering": {"gamma_r": 2, "gamma_n": 1, "gamma_phi": 1, "gamma_1": 2, "gamma_2": 1},
    "SinglePoint": {"gamma_n": 3, "gamma_phi": 2, "gamma_1": 2},
    "Dynamics": {"gamma_n": 11, "gamma_phi": 5, "gamma_1": 11, "gamma_2": 1},
}


def _table(cfg, seed=0, threads=1):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", FitWarning)
        return pipeline.table1(cfg, seed, threads=threads)


def test_noiseless_rows_recover_truth():
    cfg = merge(default_config(), {"noisy": False, "on_res_mt": {"forward": "triplet"}})
    rows, _ = _table(cfg)
    assert [r.method for r in rows] == list(METHODS)
    for r in rows:
        assert not r.failed, r.message
        for name, (v, _) in r.to_hz().items():
            assert v == pytest.approx(TRUTH_HZ[name], rel=1e-6), (r.method, name)


def test_seed0_rows_consistent_and_errors_match_quoted():
    cfg = default_config()
    rows, _ = _table(cfg)
    rep = pipeline.report(rows, cfg, 0)
    assert not rep["any_failed"]
    assert rep["consistency"]["consistent"], rep["consistency"]["violations"]
    for r in rep["rows"]:
        for name, q in QUOTED_KHZ[r["method"]].items():
            ratio = r["errors_hz"][name] / 1e3 / q
            assert 0.5 <= ratio <= 2.0, (r["method"], name, ratio)


def test_strong_dephasing_off_resonant_recovery():
    cfg = merge(default_config(), {"device": {"gamma_phi_hz": 30e3}})
    rows, _ = _table(cfg)
    off = rows[METHODS.index("Off-res.MT")]
    assert not off.failed, off.message
    assert off.to_hz()["gamma_phi"][0] == pytest.approx(30e3, rel=0.2)


def test_thread_count_does_not_change_report():
    cfg = default_config()
    a = pipeline.report(_table(cfg, threads=1)[0], cfg, 0)
    b = pipeline.report(_table(cfg, threads=5)[0], cfg, 0)
    assert io.dumps(a) == io.dumps(b)


def test_thread_cap_from_environment(monkeypatch):
    monkeypatch.setenv("RATEFIT_THREADS", "3")
    assert pipeline.thread_cap() == 3
    monkeypatch.setenv("RATEFIT_THREADS", "junk")
    assert pipeline.thread_cap(default=2) == 2


def test_failed_reference_row_fails_dependents(monkeypatch):
    def boom(cfg, seed):
        raise ValueError("no circle")

    monkeypatch.setattr(pipeline, "run_reflection", boom)
    rows, _ = _table(default_config())
    assert all(r.failed for r in rows)
    assert "no circle" in rows[0].message
    rep = pipeline.report(rows, default_config(), 0)
    assert rep["any_failed"] and rep["consistency"]["consistent"]


def test_report_scale_marks_dynamics_row():
    cfg = default_config()
    rows, _ = _table(cfg)
    rep = pipeline.report(rows, cfg, 0)
    dyn = rep["rows"][METHODS.index("Dynamics")]
    assert dyn["confidence"] == 0.95
    for n, e in dyn["errors_hz"].items():
        assert e == pytest.approx(pipeline.DYNAMICS_REPORT_SCALE * dyn["one_sigma_hz"][n])
    assert np.isclose(rep["rows"][0]["confidence"], 0.683)
