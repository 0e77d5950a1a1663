"""Exact state-vector dynamics of layered spin Hamiltonians.

Basis convention: qubit 1 is the most significant bit of the 2^N basis
index and spin-down maps to bit 0, so index 0 is the all-down state.  With
that ordering the single-qubit Paulis are

    sx = [[0, 1], [1, 0]]    sy = [[0, 1j], [-1j, 0]]    sz = diag(-1, +1)

and sigma_phi = sx cos(phi) - sy sin(phi).  Layer unitaries are built by
dense Hermitian eigendecomposition; at the N <= 10 scale this is exact and
fast enough that no product-formula shortcut is worth its error budget.

All Hamiltonian coefficients are angular rates (rad/s) and durations are
seconds, with hbar = 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coupling import CouplingMatrix, Schedule

SX = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SY = np.array([[0.0, 1.0j], [-1.0j, 0.0]], dtype=complex)
SZ = np.array([[-1.0, 0.0], [0.0, 1.0]], dtype=complex)
ID2 = np.eye(2, dtype=complex)

NORM_TOL = 1e-10


@dataclass(frozen=True)
class SpinState:
    """Pure state over the 2^N spin basis."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        n = amps.size
        if n < 2 or n & (n - 1) != 0:
            raise ValueError(f"amplitude vector length {n} is not a power of two")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state norm {norm} deviates from 1 beyond {NORM_TOL}")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def all_down(cls, n_qubits: int) -> "SpinState":
        amps = np.zeros(2**n_qubits, dtype=complex)
        amps[0] = 1.0
        return cls(amplitudes=amps)

    @property
    def n_qubits(self) -> int:
        return int(np.log2(self.amplitudes.size))

    def apply(self, unitary: np.ndarray) -> "SpinState":
        return SpinState(amplitudes=unitary @ self.amplitudes)

    def sz_per_site(self) -> np.ndarray:
        """Expectation value of sigma_z on every qubit."""
        probs = np.abs(self.amplitudes) ** 2
        n = self.n_qubits
        idx = np.arange(probs.size)
        out = np.empty(n)
        for i in range(1, n + 1):
            bits = (idx >> (n - i)) & 1
            out[i - 1] = np.sum(probs * (2 * bits - 1))
        return out


@dataclass(frozen=True)
class OffsetModel:
    """Systematic inhomogeneities of the global drive.

    ``qubit_gradient`` is the linear qubit-frequency slope in Hz per meter
    (measured from the chain center); ``beam_width_axial`` the full axial
    extent of the Raman beam in meters, with the Gaussian amplitude profile
    Omega(x) = Omega_0 exp(-2 x^2 / w^2) using w = beam_width_axial / 2;
    ``beam_center_offset`` shifts the beam center off the chain center.
    """

    qubit_gradient: float = 0.0
    beam_width_axial: float = 270e-6
    beam_center_offset: float = 0.0
    base_rabi: float = 41e3

    def __post_init__(self):
        if self.beam_width_axial <= 0:
            raise ValueError("beam_width_axial must be > 0")

    def rabi_factors(self, positions: np.ndarray) -> np.ndarray:
        """Per-ion Rabi amplitude relative to the beam-center value."""
        x = positions - np.mean(positions) - self.beam_center_offset
        w = self.beam_width_axial / 2.0
        return np.exp(-2.0 * x**2 / w**2)

    def qubit_freq_offsets(self, positions: np.ndarray) -> np.ndarray:
        """Per-ion qubit frequency offsets (Hz) from the chain center."""
        x = positions - np.mean(positions)
        return self.qubit_gradient * x


def _single_site(op: np.ndarray, site: int, n: int) -> np.ndarray:
    """Embed a 2x2 operator on 1-based qubit ``site`` (qubit 1 = MSB)."""
    out = np.array([[1.0 + 0.0j]])
    for i in range(1, n + 1):
        out = np.kron(out, op if i == site else ID2)
    return out


def _pair_term(op: np.ndarray, i: int, j: int, n: int) -> np.ndarray:
    out = np.array([[1.0 + 0.0j]])
    for site in range(1, n + 1):
        out = np.kron(out, op if site in (i, j) else ID2)
    return out


def _sz_diagonals(n: int) -> np.ndarray:
    """sz_diag[i, b] = <b| sigma_z^(i+1) |b>."""
    idx = np.arange(2**n)
    return np.stack([2 * ((idx >> (n - i)) & 1) - 1 for i in range(1, n + 1)]).astype(float)


def sigma_phi(phase: float) -> np.ndarray:
    return np.cos(phase) * SX - np.sin(phase) * SY


def pair_hamiltonian(j: CouplingMatrix, phase: float) -> np.ndarray:
    """H = sum_{i<j} J_ij sigma_phi^i sigma_phi^j as a dense matrix."""
    n = j.n_ions
    op = sigma_phi(phase)
    h = np.zeros((2**n, 2**n), dtype=complex)
    vals = j.values
    for a in range(1, n + 1):
        for b in range(a + 1, n + 1):
            if vals[a - 1, b - 1] != 0.0:
                h += vals[a - 1, b - 1] * _pair_term(op, a, b, n)
    return h


def xy_hamiltonian(j: CouplingMatrix) -> np.ndarray:
    return pair_hamiltonian(j, 0.0) + pair_hamiltonian(j, -np.pi / 2.0)


def heisenberg_hamiltonian(j: CouplingMatrix) -> np.ndarray:
    n = j.n_ions
    h = xy_hamiltonian(j)
    vals = j.values
    for a in range(1, n + 1):
        for b in range(a + 1, n + 1):
            if vals[a - 1, b - 1] != 0.0:
                h += vals[a - 1, b - 1] * _pair_term(SZ, a, b, n)
    return h


def evolution_unitary(h: np.ndarray, duration: float) -> np.ndarray:
    """exp(-i H t) for Hermitian H via eigendecomposition."""
    evals, evecs = np.linalg.eigh(h)
    return (evecs * np.exp(-1.0j * evals * duration)[None, :]) @ evecs.conj().T


def ising_layer_unitary(
    j: CouplingMatrix,
    phase: float,
    duration: float,
    offsets: OffsetModel | None = None,
    positions: np.ndarray | None = None,
) -> np.ndarray:
    """Unitary of one global interaction layer.

    Ideal layer: exp(-i sum_{i<j} J_ij sigma_phi sigma_phi * tau).  With an
    offset model and physical ion positions, the couplings are rescaled by
    the per-ion beam factors Omega_i Omega_j / Omega_0^2 and a per-ion
    sigma_z term pi * df_i (angular, from the qubit-frequency gradient) is
    added before exponentiation.
    """
    if offsets is not None:
        if positions is None:
            raise ValueError("positions required when offsets are given")
        positions = np.asarray(positions, dtype=float)
        if positions.size != j.n_ions:
            raise ValueError(
                f"{positions.size} positions for {j.n_ions}-ion coupling matrix"
            )
        factors = offsets.rabi_factors(positions)
        vals = j.values * np.outer(factors, factors)
        np.fill_diagonal(vals, 0.0)
        h = pair_hamiltonian(CouplingMatrix(values=vals), phase)
        zcoef = np.pi * offsets.qubit_freq_offsets(positions)
        h += np.diag(zcoef @ _sz_diagonals(j.n_ions)).astype(complex)
    else:
        h = pair_hamiltonian(j, phase)
    return evolution_unitary(h, duration)


def global_rotation(state: SpinState, axis: str, angle: float) -> SpinState:
    """Apply exp(-i angle sigma_axis / 2) to every qubit."""
    ops = {"x": SX, "y": SY, "z": SZ}
    if axis not in ops:
        raise ValueError(f"axis must be one of x, y, z; got {axis!r}")
    u1 = np.cos(angle / 2.0) * ID2 - 1.0j * np.sin(angle / 2.0) * ops[axis]
    u = np.array([[1.0 + 0.0j]])
    for _ in range(state.n_qubits):
        u = np.kron(u, u1)
    return state.apply(u)


@dataclass(frozen=True)
class ObservableTrace:
    """Per-site and average magnetization after every recorded step.

    Row 0 is the initial state (step label 0, time 0).
    """

    steps: np.ndarray
    times: np.ndarray
    sz: np.ndarray
    labels: tuple[str, ...] = ()

    @property
    def average(self) -> np.ndarray:
        return self.sz.mean(axis=1)

    @property
    def n_sites(self) -> int:
        return self.sz.shape[1]

    def to_csv(self) -> str:
        cols = ["step", "time"] + [f"site_{i}" for i in range(1, self.n_sites + 1)]
        cols.append("average")
        lines = [",".join(cols)]
        avg = self.average
        for k in range(len(self.steps)):
            row = [f"{int(self.steps[k])}", f"{self.times[k]:.12g}"]
            row += [f"{v:.12g}" for v in self.sz[k]]
            row.append(f"{avg[k]:.12g}")
            lines.append(",".join(row))
        return "\n".join(lines) + "\n"

    def to_json_dict(self) -> dict:
        return {
            "steps": [int(s) for s in self.steps],
            "times": self.times.tolist(),
            "sz": self.sz.tolist(),
            "average": self.average.tolist(),
            "labels": list(self.labels),
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "ObservableTrace":
        return cls(
            steps=np.array(data["steps"]),
            times=np.array(data["times"], dtype=float),
            sz=np.array(data["sz"], dtype=float),
            labels=tuple(data.get("labels", ())),
        )


class _TraceRecorder:
    def __init__(self, state: SpinState):
        self.steps = [0]
        self.times = [0.0]
        self.sz = [state.sz_per_site()]
        self.labels = ["initial"]

    def record(self, state: SpinState, time: float, label: str):
        self.steps.append(self.steps[-1] + 1)
        self.times.append(time)
        self.sz.append(state.sz_per_site())
        self.labels.append(label)

    def trace(self) -> ObservableTrace:
        return ObservableTrace(
            steps=np.array(self.steps),
            times=np.array(self.times),
            sz=np.array(self.sz),
            labels=tuple(self.labels),
        )


def run_ising_schedule(
    state0: SpinState,
    schedule: Schedule,
    layer_matrices,
    offsets: OffsetModel | None = None,
    positions: np.ndarray | None = None,
    repetitions: int | None = None,
) -> ObservableTrace:
    """Evolve through the schedule, recording after every layer.

    ``layer_matrices`` gives the coupling matrix of each layer in order.
    ``repetitions`` overrides the schedule's own repetition count (zero is
    allowed and returns just the initial point).
    """
    if len(layer_matrices) != len(schedule.layers):
        raise ValueError(
            f"{len(schedule.layers)} layers but {len(layer_matrices)} matrices"
        )
    reps = schedule.repetitions if repetitions is None else repetitions
    unitaries = [
        ising_layer_unitary(m, layer.phase, layer.duration, offsets, positions)
        for m, layer in zip(layer_matrices, schedule.layers)
    ]
    rec = _TraceRecorder(state0)
    state = state0
    t = 0.0
    for _ in range(reps):
        for layer, u in zip(schedule.layers, unitaries):
            state = state.apply(u)
            t += layer.duration
            rec.record(state, t, f"mode{layer.mode_index}")
    return rec.trace()


def evolve_static(state0: SpinState, h: np.ndarray, times) -> ObservableTrace:
    """Evolution under a fixed Hamiltonian, sampled at the given times.

    The time grid must start at 0 (row 0 of any trace is the initial
    state).
    """
    times = np.asarray(times, dtype=float)
    if times.size == 0 or times[0] != 0.0:
        raise ValueError("time grid must start at 0")
    evals, evecs = np.linalg.eigh(h)
    coeff = evecs.conj().T @ state0.amplitudes
    rec = _TraceRecorder(state0)
    for t in times[1:]:
        amps = evecs @ (np.exp(-1.0j * evals * t) * coeff)
        rec.record(SpinState(amplitudes=amps), float(t), "static")
    return rec.trace()


def floquet_xy(
    state0: SpinState,
    t1: float,
    t3: float,
    j1: CouplingMatrix,
    j3: CouplingMatrix,
    n_periods: int,
) -> ObservableTrace:
    """Periodic XX/YY drive: [XX(J1,t1), XX(J3,t3), YY(J1,t1), YY(J3,t3)].

    Records after every layer for ``n_periods`` periods of T = 2(t1+t3).
    """
    seq = [
        (j1, 0.0, t1, "XX1"),
        (j3, 0.0, t3, "XX3"),
        (j1, -np.pi / 2.0, t1, "YY1"),
        (j3, -np.pi / 2.0, t3, "YY3"),
    ]
    unitaries = [
        (ising_layer_unitary(j, phase, tau), tau, label)
        for j, phase, tau, label in seq
    ]
    rec = _TraceRecorder(state0)
    state = state0
    t = 0.0
    for _ in range(n_periods):
        for u, tau, label in unitaries:
            state = state.apply(u)
            t += tau
            rec.record(state, t, label)
    return rec.trace()


def floquet_xyz(
    state0: SpinState,
    t1: float,
    t3: float,
    j1: CouplingMatrix,
    j3: CouplingMatrix,
    n_steps: int,
) -> ObservableTrace:
    """Trotterized Heisenberg drive, eight global operations per step.

    Per step: XX(J1,t1), XX(J3,t3), YY(J1,t1), YY(J3,t3), then the ZZ pair
    implemented in a rotated frame as R_y, XX(J1,t1), XX(J3,t3), R_y-dagger
    where R_y applies exp(-i (pi/4) sigma_y) per qubit (a pi/2 Bloch
    rotation taking sigma_x to -sigma_z, so the conjugated XX layers are ZZ
    layers).  Records after each of the eight operations.
    """
    u_xx1 = ising_layer_unitary(j1, 0.0, t1)
    u_xx3 = ising_layer_unitary(j3, 0.0, t3)
    u_yy1 = ising_layer_unitary(j1, -np.pi / 2.0, t1)
    u_yy3 = ising_layer_unitary(j3, -np.pi / 2.0, t3)
    rec = _TraceRecorder(state0)
    state = state0
    t = 0.0
    for _ in range(n_steps):
        for u, tau, label in [
            (u_xx1, t1, "XX1"),
            (u_xx3, t3, "XX3"),
            (u_yy1, t1, "YY1"),
            (u_yy3, t3, "YY3"),
        ]:
            state = state.apply(u)
            t += tau
            rec.record(state, t, label)
        state = global_rotation(state, "y", np.pi / 2.0)
        rec.record(state, t, "Ry")
        for u, tau, label in [(u_xx1, t1, "ZZ1"), (u_xx3, t3, "ZZ3")]:
            state = state.apply(u)
            t += tau
            rec.record(state, t, label)
        state = global_rotation(state, "y", -np.pi / 2.0)
        rec.record(state, t, "Ry_dag")
    return rec.trace()


def compare_three_ways(
    h_desired: np.ndarray,
    state0: SpinState,
    schedule: Schedule,
    layer_matrices,
    offsets: OffsetModel | None,
    positions: np.ndarray | None = None,
    repetitions: int | None = None,
) -> tuple[ObservableTrace, ObservableTrace, ObservableTrace]:
    """Desired vs ideal-implemented vs offset-perturbed dynamics.

    Returns three traces on a common time axis: dense evolution under
    ``h_desired`` sampled at the layer boundaries, the layered schedule
    without offsets, and the layered schedule with the offset model.
    """
    ideal = run_ising_schedule(
        state0, schedule, layer_matrices, offsets=None, repetitions=repetitions
    )
    perturbed = run_ising_schedule(
        state0,
        schedule,
        layer_matrices,
        offsets=offsets,
        positions=positions,
        repetitions=repetitions,
    )
    desired = evolve_static(state0, h_desired, ideal.times)
    return desired, ideal, perturbed
