"""Phonon-mediated spin-spin couplings and stroboscopic schedules.

A global bichromatic beat at absolute detuning ``mu`` (Hz, relative to the
qubit carrier) drives all axial modes at once.  The time-averaged Ising
coupling between ions i and j is the multimode sum

    J_ij = Omega_i Omega_j sum_m eta_im eta_jm omega_m / (mu^2 - omega_m^2)

with every frequency angular (rad/s), so J is an angular rate too.  Near a
single mode M the sum collapses to the rank-one pattern
``b_iM b_jM / (mu - omega_M)``, which is what schedule design exploits.

Sequencing several such drives with durations tau_l and a common Pauli
phase produces the effective coupling ``Jbar = sum_l J_l tau_l / sum_l
tau_l``.  A layer leaves no spin-phonon entanglement behind when every
mode's detuning-duration product is an integer (phonon loop closure); the
closure report quantifies how well a schedule approximates that.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .chain import LambDickeMatrix, ModeSpectrum

DEFAULT_CLOSURE_TOL = 0.05
RESONANCE_GUARD_HZ = 1.0


class ResonanceError(ValueError):
    """Beat detuning sits inside the guard band of a motional mode."""


class NonCommutingScheduleError(ValueError):
    """Layers with different Pauli phases cannot be time-averaged."""


class ZeroMatrixError(ValueError):
    """Fidelity overlap is undefined for an identically zero matrix."""


@dataclass(frozen=True)
class LaserLayer:
    """One constant-parameter global interaction layer.

    ``mode_index`` is the 1-based addressed mode; ``detuning`` is the signed
    offset (Hz) of the beat from that mode, ``duration`` in seconds,
    ``phase`` selects the Pauli axis sigma_phi = sigma_x cos(phi) -
    sigma_y sin(phi), and ``rabi`` is the global carrier Rabi rate in Hz.
    """

    mode_index: int
    detuning: float
    duration: float
    phase: float = 0.0
    rabi: float = 41e3

    def __post_init__(self):
        if self.mode_index < 1:
            raise ValueError(f"mode_index must be >= 1, got {self.mode_index}")
        if self.duration <= 0:
            raise ValueError(f"duration must be > 0, got {self.duration}")
        if self.detuning == 0:
            raise ValueError("detuning must be nonzero")

    def beat_detuning(self, spectrum: ModeSpectrum) -> float:
        """Absolute beat detuning mu (Hz) implied by mode and offset."""
        return spectrum.frequency_of(self.mode_index) + self.detuning


@dataclass(frozen=True)
class Schedule:
    """Ordered interaction layers, repeated ``repetitions`` times."""

    layers: tuple[LaserLayer, ...]
    repetitions: int = 1

    def __post_init__(self):
        if len(self.layers) == 0:
            raise ValueError("schedule must contain at least one layer")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        object.__setattr__(self, "layers", tuple(self.layers))

    @property
    def cycle_duration(self) -> float:
        return sum(layer.duration for layer in self.layers)

    @property
    def total_duration(self) -> float:
        return self.repetitions * self.cycle_duration

    def to_json_dict(self) -> dict:
        return {
            "layers": [
                {
                    "mode_index": layer.mode_index,
                    "detuning_hz": layer.detuning,
                    "duration_s": layer.duration,
                    "phase_rad": layer.phase,
                    "rabi_hz": layer.rabi,
                }
                for layer in self.layers
            ],
            "repetitions": self.repetitions,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "Schedule":
        layers = tuple(
            LaserLayer(
                mode_index=int(spec["mode_index"]),
                detuning=float(spec["detuning_hz"]),
                duration=float(spec["duration_s"]),
                phase=float(spec["phase_rad"]),
                rabi=float(spec["rabi_hz"]),
            )
            for spec in data["layers"]
        )
        return cls(layers=layers, repetitions=int(data["repetitions"]))


@dataclass(frozen=True)
class CouplingMatrix:
    """Symmetric zero-diagonal spin-spin coupling matrix.

    ``values`` are angular rates (rad/s) unless ``normalized`` is set, in
    which case they are dimensionless with max |entry| scaled to 1.
    """

    values: np.ndarray
    normalized: bool = False

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValueError(f"coupling matrix must be square, got shape {v.shape}")
        if not np.allclose(v, v.T, atol=1e-12 * max(1.0, np.abs(v).max())):
            raise ValueError("coupling matrix must be symmetric")
        if np.abs(np.diag(v)).max(initial=0.0) != 0.0:
            raise ValueError("coupling matrix must have zero diagonal")
        object.__setattr__(self, "values", v)

    @property
    def n_ions(self) -> int:
        return self.values.shape[0]

    def max_normalized(self) -> "CouplingMatrix":
        """Rescale so the largest |entry| is 1 (no-op for a zero matrix)."""
        peak = np.abs(self.values).max()
        if peak == 0.0:
            return CouplingMatrix(values=self.values.copy(), normalized=True)
        return CouplingMatrix(values=self.values / peak, normalized=True)

    def upper_triangle(self) -> np.ndarray:
        """Entries i<j flattened row-major (the fidelity inner-product set)."""
        iu = np.triu_indices(self.n_ions, k=1)
        return self.values[iu]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# n={self.n_ions} normalized={int(self.normalized)}\n")
        writer = csv.writer(buf, lineterminator="\n")
        for row in self.values:
            writer.writerow([f"{x:.17g}" for x in row])
        return buf.getvalue()

    def to_json_dict(self) -> dict:
        return {
            "n": self.n_ions,
            "normalized": self.normalized,
            "values": self.values.tolist(),
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "CouplingMatrix":
        return cls(values=np.array(data["values"], dtype=float),
                   normalized=bool(data["normalized"]))


@dataclass(frozen=True)
class FidelityReport:
    """Normalized-overlap score with both matrices rescaled to max 1."""

    fidelity: float
    implemented: CouplingMatrix
    target: CouplingMatrix
    residuals: np.ndarray

    def to_json_dict(self) -> dict:
        return {
            "fidelity": self.fidelity,
            "implemented": self.implemented.to_json_dict(),
            "target": self.target.to_json_dict(),
            "residuals": self.residuals.tolist(),
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "FidelityReport":
        return cls(
            fidelity=float(data["fidelity"]),
            implemented=CouplingMatrix.from_json_dict(data["implemented"]),
            target=CouplingMatrix.from_json_dict(data["target"]),
            residuals=np.array(data["residuals"], dtype=float),
        )


def coupling_matrix(
    spectrum: ModeSpectrum,
    eta: LambDickeMatrix,
    rabi_per_ion,
    mu: float,
) -> CouplingMatrix:
    """Multimode coupling matrix for a drive at absolute detuning ``mu`` (Hz).

    ``rabi_per_ion`` is the per-ion carrier Rabi rate in Hz (scalar
    broadcasts).  Output entries are angular rates (rad/s).

    Raises
    ------
    ResonanceError
        If ``mu`` lies within 1 Hz of any mode frequency.
    """
    gap = np.min(np.abs(mu - spectrum.frequencies))
    if gap < RESONANCE_GUARD_HZ:
        m = int(np.argmin(np.abs(mu - spectrum.frequencies))) + 1
        raise ResonanceError(
            f"mu = {mu:.6g} Hz within {RESONANCE_GUARD_HZ} Hz of mode {m} "
            f"({spectrum.frequency_of(m):.6g} Hz)"
        )
    omega_m = 2.0 * np.pi * spectrum.frequencies
    mu_ang = 2.0 * np.pi * mu
    omega_i = 2.0 * np.pi * np.broadcast_to(
        np.asarray(rabi_per_ion, dtype=float), (spectrum.n_ions,)
    )
    weights = omega_m / (mu_ang**2 - omega_m**2)
    j = (eta.eta * weights[None, :]) @ eta.eta.T
    j = j * np.outer(omega_i, omega_i)
    np.fill_diagonal(j, 0.0)
    j = 0.5 * (j + j.T)
    return CouplingMatrix(values=j)


def layer_coupling_matrix(
    layer: LaserLayer,
    spectrum: ModeSpectrum,
    eta: LambDickeMatrix,
    rabi_per_ion=None,
) -> CouplingMatrix:
    """Coupling matrix generated by one layer (Rabi defaults to the layer's)."""
    rabi = layer.rabi if rabi_per_ion is None else rabi_per_ion
    return coupling_matrix(spectrum, eta, rabi, layer.beat_detuning(spectrum))


def effective_coupling(schedule: Schedule, layer_matrices) -> CouplingMatrix:
    """Duration-weighted average coupling of a commuting-layer schedule.

    ``layer_matrices`` holds one CouplingMatrix per layer, in order.  All
    layers must share a Pauli phase modulo pi (sigma_phi sigma_phi is
    invariant under phi -> phi + pi); otherwise the composition does not
    commute and time-averaging is wrong.
    """
    if len(layer_matrices) != len(schedule.layers):
        raise ValueError(
            f"{len(schedule.layers)} layers but {len(layer_matrices)} matrices"
        )
    phases = np.array([layer.phase for layer in schedule.layers])
    rel = (phases - phases[0]) / np.pi
    if not np.allclose(rel, np.round(rel), atol=1e-9):
        raise NonCommutingScheduleError(
            "layers differ in Pauli phase; use the dynamics module for "
            "non-commuting sequences"
        )
    durations = np.array([layer.duration for layer in schedule.layers])
    total = durations.sum()
    jbar = sum(
        m.values * (tau / total) for m, tau in zip(layer_matrices, durations)
    )
    return CouplingMatrix(values=jbar)


@dataclass(frozen=True)
class LayerClosure:
    """Detuning-duration products of one layer against every mode."""

    mode_index: int
    products: np.ndarray
    deviations: np.ndarray
    closed: bool


@dataclass(frozen=True)
class LoopClosureReport:
    """Per-layer phonon loop closure diagnostics."""

    layers: tuple[LayerClosure, ...]
    tolerance: float

    @property
    def all_closed(self) -> bool:
        return all(layer.closed for layer in self.layers)

    @property
    def max_deviation(self) -> float:
        return max(float(layer.deviations.max()) for layer in self.layers)

    def to_json_dict(self) -> dict:
        return {
            "tolerance": self.tolerance,
            "all_closed": self.all_closed,
            "layers": [
                {
                    "mode_index": lc.mode_index,
                    "products": lc.products.tolist(),
                    "deviations": lc.deviations.tolist(),
                    "closed": lc.closed,
                }
                for lc in self.layers
            ],
        }


def loop_closure_report(
    schedule: Schedule,
    spectrum: ModeSpectrum,
    tolerance: float = DEFAULT_CLOSURE_TOL,
) -> LoopClosureReport:
    """Check each layer's phase-space loop closure on every mode.

    For layer duration tau and per-mode detunings delta_m = mu - omega_m
    (Hz), the products delta_m * tau must all sit within ``tolerance`` of an
    integer for the layer to disentangle spins from motion at its end.
    """
    entries = []
    for layer in schedule.layers:
        mu = layer.beat_detuning(spectrum)
        products = (mu - spectrum.frequencies) * layer.duration
        deviations = np.abs(products - np.round(products))
        entries.append(
            LayerClosure(
                mode_index=layer.mode_index,
                products=products,
                deviations=deviations,
                closed=bool(np.all(deviations <= tolerance)),
            )
        )
    return LoopClosureReport(layers=tuple(entries), tolerance=tolerance)


def overlap_cosine(a: CouplingMatrix, b: CouplingMatrix) -> float:
    """Inner-product cosine over i<j entries, in [-1, 1]."""
    va = a.upper_triangle()
    vb = b.upper_triangle()
    na = np.linalg.norm(va)
    nb = np.linalg.norm(vb)
    if na == 0.0 or nb == 0.0:
        raise ZeroMatrixError("overlap undefined for an identically zero matrix")
    return float(np.dot(va, vb) / (na * nb))


def fidelity(implemented: CouplingMatrix, target: CouplingMatrix) -> FidelityReport:
    """Normalized-overlap fidelity F = (1 + cos(J_impl, J_target)) / 2.

    The inner product runs over the strict upper triangle.  Both matrices
    are reported rescaled to max |entry| = 1, along with their entrywise
    residuals at that normalization.
    """
    if implemented.n_ions != target.n_ions:
        raise ValueError(
            f"dimension mismatch: {implemented.n_ions} vs {target.n_ions}"
        )
    cos = overlap_cosine(implemented, target)
    f = float(np.clip(0.5 * (1.0 + cos), 0.0, 1.0))
    impl_n = implemented.max_normalized()
    targ_n = target.max_normalized()
    return FidelityReport(
        fidelity=f,
        implemented=impl_n,
        target=targ_n,
        residuals=impl_n.values - targ_n.values,
    )
