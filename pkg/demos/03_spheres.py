"""Spheres and hyperspheres: 6 and 8 qubits on cross-polytope graphs.

Six qubits on an octahedron (sphere) and eight on a 16-cell (4D sphere)
need the odd modes only; chain-mirror pairs are the missing antipodal
edges. Sweeping the trap frequency shows how far off-resonant mode
contamination can be pushed down.
"""

import numpy as np

from iongeom import DesignProblem, TrapConfig, chain_modes, cross_polytope, design_schedule
from iongeom.constants import MASS_BE9, RAMAN_WAVEVECTOR_BE9


def design_at(n_ions, modes, fz):
    cfg = TrapConfig(
        ion_count=n_ions,
        axial_com_frequency=fz,
        ion_mass=MASS_BE9,
        raman_wavevector=RAMAN_WAVEVECTOR_BE9,
    )
    _, spectrum, eta = chain_modes(cfg)
    problem = DesignProblem(
        target=cross_polytope(n_ions), spectrum=spectrum, eta=eta, allowed_modes=modes
    )
    return design_schedule(problem)


for n_ions, modes in ((6, (1, 3, 5)), (8, (1, 3, 5, 7))):
    sol = design_at(n_ions, modes, fz=1.0e6)
    print(f"{n_ions} qubits on a {'sphere' if n_ions == 6 else '4D hypersphere'}:")
    for layer in sol.schedule.layers:
        print(
            f"  mode {layer.mode_index}: {layer.detuning / 1e3:+8.2f} kHz"
            f"  {layer.duration * 1e6:6.2f} us"
        )
    print(f"  fidelity {sol.achieved_fidelity:.5f} "
          f"(rank-one design {sol.rank_one_fidelity:.5f})")
    print()

print("fidelity vs trap frequency (8 qubits):")
for fz in np.linspace(0.3e6, 1.5e6, 7):
    sol = design_at(8, (1, 3, 5, 7), fz)
    bar = "#" * int((sol.achieved_fidelity - 0.99) * 2000)
    print(f"  {fz / 1e6:4.2f} MHz  F = {sol.achieved_fidelity:.5f}  {bar}")
