"""Scattered power budget versus drive strength for the table device.

Prints coherent, incoherent and lost power per unit gamma_r on a Rabi sweep,
the regime thresholds and the drive at which coherent reflection vanishes.
"""
import numpy as np

from ratefit.qed.power import power_curves, region_boundaries
from ratefit.qed.rates import RateSet
from ratefit.units import TWO_PI

KHZ = TWO_PI * 1e3


def main():
    rates = RateSet.from_hz(229e3, 49e3, 1e3)
    b = region_boundaries(rates)
    print(f"low-power edge {b.omega_low / KHZ:.1f} kHz, saturation {b.omega_sat / KHZ:.1f} kHz, "
          f"critical gamma_n {b.gamma_n_crit / KHZ:.1f} kHz, "
          f"coherent dip {b.omega_dip / KHZ:.1f} kHz")
    rabi = KHZ * np.geomspace(10, 3000, 12)
    p_in, p_coh, p_incoh, p_loss = power_curves(rabi, rates.gamma_r, rates.gamma_n,
                                                rates.gamma_phi)
    print(f"{'rabi kHz':>9s} {'P_in':>10s} {'P_coh':>10s} {'P_incoh':>10s} {'P_loss':>10s}")
    for row in zip(rabi / KHZ, *(p / rates.gamma_r for p in (p_in, p_coh, p_incoh, p_loss))):
        print("".join(f"{v:10.4g} " for v in row))


if __name__ == "__main__":
    main()
