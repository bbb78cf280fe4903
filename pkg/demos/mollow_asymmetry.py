"""Resonant and detuned fluorescence spectra of the table device.

Prints the fitted line weights of the saturated resonant triplet and the
near/far sideband ratio off resonance, with and without pure dephasing,
against the dressed-state rate model.
"""
import numpy as np

from ratefit.estimators import fit_mollow_triplet
from ratefit.qed.dressed import dressed_asymmetry
from ratefit.qed.rates import DriveConfig, RateSet
from ratefit.qed.spectrum import incoherent_spectrum
from ratefit.units import TWO_PI

W01 = TWO_PI * 5.0e9


def fitted_triplet(drive, rates, n=6001):
    width = np.hypot(drive.rabi, drive.delta)
    grid = drive.omega_p + np.linspace(-6 * width, 6 * width, n)
    return fit_mollow_triplet(incoherent_spectrum(grid, drive, rates))


def main():
    rates = RateSet.from_hz(227e3, 48e3, 3e3)
    f = fitted_triplet(DriveConfig.from_detuning(W01, 0.0, TWO_PI * 9e6), rates)
    w = [f[k] / rates.gamma_r for k in ("area_red", "area_center", "area_blue")]
    print("resonant, 9 MHz drive: weights red/center/blue = "
          + " / ".join(f"{x:.4f}" for x in w))
    print(f"  gamma_1 = {f['gamma_1'] / TWO_PI / 1e3:.1f} kHz, "
          f"gamma_2 = {f['gamma_2'] / TWO_PI / 1e3:.1f} kHz")
    for gphi in (7e3, 0.0):
        rates = RateSet.from_hz(227e3, 48e3, gphi)
        for det in (825e3, -825e3):
            drive = DriveConfig.from_detuning(W01, TWO_PI * det, TWO_PI * 1.41e6)
            f = fitted_triplet(drive, rates)
            near, far = ((f["area_red"], f["area_blue"]) if drive.delta > 0
                         else (f["area_blue"], f["area_red"]))
            dressed = dressed_asymmetry(drive, rates).near_far_ratio
            print(f"gamma_phi {gphi / 1e3:3.0f} kHz, detuning {det / 1e3:+5.0f} kHz: "
                  f"near/far fitted {near / far:.4f}, dressed model {dressed:.4f}")


if __name__ == "__main__":
    main()
