"""Design a square-plaquette interaction for four ions.

Four qubits on a plaquette means all-to-all coupling minus the two
diagonals. Coupling near mode 1 gives the all-to-all part; coupling near
mode 3 with opposite detuning sign cancels the (1,4) and (2,3) pairs.
The designer finds detunings and loop-closing durations automatically.
"""

import numpy as np

from iongeom import (
    DesignProblem,
    TrapConfig,
    chain_modes,
    cross_polytope,
    design_schedule,
    solve_weights,
    weights_to_schedule,
)
from iongeom.constants import MASS_BE9, RAMAN_WAVEVECTOR_BE9
from iongeom.design import design_report

cfg = TrapConfig(
    ion_count=4,
    axial_com_frequency=1.0e6,
    ion_mass=MASS_BE9,
    raman_wavevector=RAMAN_WAVEVECTOR_BE9,
)
_, spectrum, eta = chain_modes(cfg)
target = cross_polytope(4)

problem = DesignProblem(
    target=target, spectrum=spectrum, eta=eta, allowed_modes=(1, 3)
)

weights = solve_weights(problem)
print("mode weights:", dict(zip(weights.modes, np.round(weights.weights, 4))))

solution = design_schedule(problem)
text, _ = design_report(problem, solution)
print()
print(text)

print()
print("effective coupling (normalized):")
print(np.round(solution.effective.max_normalized().values, 3))

# The same machinery reproduces a published-style sequence when the
# detunings are dictated instead of searched.
sched = weights_to_schedule(
    weights,
    spectrum,
    base_detuning=100e3,
    detunings={1: 107.6e3, 3: -71.14e3},
)
print()
print("with dictated detunings (loop-closing durations come out k=1):")
for layer in sched.layers:
    print(
        f"  mode {layer.mode_index}: {layer.detuning / 1e3:+8.2f} kHz"
        f"  {layer.duration * 1e6:6.2f} us"
    )
