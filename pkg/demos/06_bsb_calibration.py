"""Blue-sideband flopping: the calibration curves behind every schedule.

Driving the blue sideband of one mode flops each ion between (down, n)
and (up, n+1) at a rate set by its Lamb-Dicke parameter. Ions sitting on
different parts of a mode's eigenvector flop at visibly different rates,
which is exactly what makes the mode patterns usable for geometry design.
"""

import numpy as np

from iongeom import TrapConfig, bsb_evolution, chain_modes
from iongeom.constants import MASS_BE9, RAMAN_WAVEVECTOR_BE9

RABI = 41e3  # carrier Rabi rate, Hz


def chain(n):
    cfg = TrapConfig(
        ion_count=n,
        axial_com_frequency=0.62e6,
        ion_mass=MASS_BE9,
        raman_wavevector=RAMAN_WAVEVECTOR_BE9,
    )
    return chain_modes(cfg)


# single ion: pure two-level flop at eta * Omega
_, spec1, eta1 = chain(1)
times = np.linspace(0.0, 60e-6, 13)
trace = bsb_evolution(spec1, eta1, 1, RABI, times, mean_n=0.0)
print("single ion, ground-state mode: P(down) vs cos^2(eta Omega t)")
analytic = np.cos(eta1.eta[0, 0] * 2 * np.pi * RABI * times) ** 2
for t, p, a in zip(times, trace.p_down[:, 0], analytic):
    print(f"  {t * 1e6:5.1f} us   {p:.4f}   {a:.4f}")

# six ions on mode 3 with a realistic thermal state: per-ion curves split
_, spec6, eta6 = chain(6)
times = np.linspace(0.0, 100e-6, 11)
trace6 = bsb_evolution(spec6, eta6, 3, RABI, times, mean_n=0.1)
print()
print(f"six ions, mode 3, nbar = 0.1 (Fock truncation {trace6.n_max}):")
print("   t [us]   " + "  ".join(f"ion{i}" for i in range(1, 7)) + "   avg")
for k, t in enumerate(times):
    row = "  ".join(f"{p:.2f}" for p in trace6.p_down[k])
    print(f"  {t * 1e6:6.1f}   {row}   {trace6.average[k]:.3f}")
print()
print("mode-3 Lamb-Dicke parameters:", np.round(eta6.eta[:, 2], 4))
print("(ions 3 and 4 barely participate, so they barely flop)")
