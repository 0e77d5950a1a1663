"""Pulse-schedule engineering and spin dynamics for 1D ion chains.

The package turns a target interaction graph into a sequence of global
bichromatic drive layers on a trapped-ion chain and simulates the
resulting quantum spin dynamics exactly at small qubit numbers.

Subpackage map:

    chain      equilibrium positions, axial normal modes, Lamb-Dicke factors
    coupling   multimode spin-spin couplings, schedules, loop closure, fidelity
    targets    built-in interaction-graph targets and file loading
    design     least-squares weight solving and schedule synthesis
    dynamics   exact state-vector evolution of layered spin Hamiltonians
    sideband   blue-sideband calibration dynamics with thermal phonons
    config     YAML config schema with strict unit suffixes
    cli        command-line entry points (modes, design, fidelity, evolve,
               bsb, sweep)
"""

from .chain import (
    EquilibriumPositions,
    LambDickeMatrix,
    ModeSpectrum,
    TrapConfig,
    chain_modes,
    equilibrium_positions,
    lamb_dicke,
    normal_modes,
)
from .coupling import (
    CouplingMatrix,
    FidelityReport,
    LaserLayer,
    LoopClosureReport,
    Schedule,
    coupling_matrix,
    effective_coupling,
    fidelity,
    layer_coupling_matrix,
    loop_closure_report,
)
from .design import (
    DesignProblem,
    DesignSolution,
    WeightSolution,
    design_report,
    design_schedule,
    solve_weights,
    weights_to_schedule,
)
from .dynamics import (
    ObservableTrace,
    OffsetModel,
    SpinState,
    compare_three_ways,
    evolve_static,
    floquet_xy,
    floquet_xyz,
    global_rotation,
    ising_layer_unitary,
    run_ising_schedule,
)
from .sideband import (
    SidebandTrace,
    SpinPhononState,
    ThermalWeights,
    bsb_evolution,
    bsb_hamiltonian,
)
from .targets import (
    TargetGraph,
    cayley_tree_c36,
    cross_polytope,
    custom_target,
    leaves_only_tree,
    triangular_torus,
)

__version__ = "0.1.0"
