"""Equilibrium structure and axial normal modes of a 1D ion chain.

The chain sits in a harmonic axial well, optionally stiffened by a quartic
term.  Working in dimensionless units (lengths in the Coulomb length scale
``l = (e^2 / (4 pi eps0 M wz^2))^(1/3)``, energies in ``e^2/(4 pi eps0 l)``)
the potential per ion is

    V(u) = sum_i (u_i^2 / 2 + alpha u_i^4 / 4) + sum_{i<j} 1 / |u_i - u_j|

Equilibrium positions are the stationary point of V, found by damped Newton
iteration.  Axial mode frequencies follow from the Hessian of V at the
stationary point: ``omega_m = omega_z sqrt(lambda_m)`` with ``lambda_m`` the
Hessian eigenvalues, and the orthonormal eigenvector columns give the
per-ion mode participations used everywhere downstream.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .constants import ELEMENTARY_CHARGE, EPSILON_0, HBAR


class SolverError(RuntimeError):
    """Equilibrium solver failed to converge."""


class UnstableConfigError(RuntimeError):
    """Hessian has a non-positive eigenvalue: no stable linear chain."""


@dataclass(frozen=True)
class TrapConfig:
    """Physical parameters of the axial trap and drive geometry.

    Parameters
    ----------
    ion_count : int
        Number of ions N in the chain.
    axial_com_frequency : float
        Single-ion axial oscillation frequency omega_z / 2 pi, in Hz.
    quartic_coefficient : float
        Dimensionless alpha multiplying the u^4/4 term of the potential.
        Zero recovers the purely harmonic trap.
    ion_mass : float
        Ion mass in kg.
    raman_wavevector : float
        Net Raman beat wavevector Delta-k along the axis, in rad/m.  Sets
        the Lamb-Dicke scale.
    """

    ion_count: int
    axial_com_frequency: float
    ion_mass: float
    raman_wavevector: float
    quartic_coefficient: float = 0.0

    def __post_init__(self):
        if int(self.ion_count) != self.ion_count or self.ion_count < 1:
            raise ValueError(f"ion_count must be a positive integer, got {self.ion_count}")
        if self.axial_com_frequency <= 0:
            raise ValueError("axial_com_frequency must be > 0")
        if self.ion_mass <= 0:
            raise ValueError("ion_mass must be > 0")
        if self.raman_wavevector <= 0:
            raise ValueError("raman_wavevector must be > 0")
        if self.quartic_coefficient < 0:
            raise ValueError("quartic_coefficient must be >= 0 (attractive quartic only)")

    @property
    def omega_z(self) -> float:
        """Angular COM frequency, rad/s."""
        return 2.0 * np.pi * self.axial_com_frequency

    @property
    def length_scale(self) -> float:
        """Coulomb length scale l in meters."""
        return (
            ELEMENTARY_CHARGE**2
            / (4.0 * np.pi * EPSILON_0 * self.ion_mass * self.omega_z**2)
        ) ** (1.0 / 3.0)


@dataclass(frozen=True)
class EquilibriumPositions:
    """Converged chain positions, dimensionless and physical."""

    dimensionless_positions: np.ndarray
    length_scale: float

    @property
    def physical_positions(self) -> np.ndarray:
        """Positions in meters."""
        return self.length_scale * self.dimensionless_positions


@dataclass(frozen=True)
class ModeSpectrum:
    """Axial normal modes: ascending frequencies (Hz) and eigenvector columns.

    ``eigenvectors[:, m]`` is the orthonormal participation vector of mode
    ``m + 1``; mode numbering is 1-based in all user-facing interfaces, with
    mode 1 the lowest (center-of-mass) mode.
    """

    frequencies: np.ndarray
    eigenvectors: np.ndarray

    @property
    def n_ions(self) -> int:
        return len(self.frequencies)

    def frequency_of(self, mode_index: int) -> float:
        """Frequency in Hz of a 1-based mode index."""
        if not 1 <= mode_index <= self.n_ions:
            raise ValueError(f"mode_index must be in 1..{self.n_ions}, got {mode_index}")
        return float(self.frequencies[mode_index - 1])

    def vector_of(self, mode_index: int) -> np.ndarray:
        """Eigenvector of a 1-based mode index."""
        if not 1 <= mode_index <= self.n_ions:
            raise ValueError(f"mode_index must be in 1..{self.n_ions}, got {mode_index}")
        return self.eigenvectors[:, mode_index - 1]


@dataclass(frozen=True)
class LambDickeMatrix:
    """eta[i, m] = b[i, m] * dk * sqrt(hbar / (2 M omega_m)), dimensionless."""

    eta: np.ndarray


def potential_gradient(u: np.ndarray, alpha: float) -> np.ndarray:
    """Gradient of the dimensionless chain potential at positions ``u``."""
    diff = u[:, None] - u[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        inv2 = np.where(diff != 0.0, 1.0 / diff**2, 0.0)
    coulomb = np.sum(np.sign(diff) * inv2, axis=1)
    return u + alpha * u**3 - coulomb


def potential_hessian(u: np.ndarray, alpha: float) -> np.ndarray:
    """Hessian of the dimensionless chain potential at positions ``u``."""
    diff = u[:, None] - u[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        inv3 = np.where(diff != 0.0, 1.0 / np.abs(diff) ** 3, 0.0)
    hess = -2.0 * inv3
    np.fill_diagonal(hess, 1.0 + 3.0 * alpha * u**2 + 2.0 * np.sum(inv3, axis=1))
    return hess


def equilibrium_positions(
    config: TrapConfig,
    gradient_tol: float = 1e-12,
    max_iterations: int = 200,
) -> EquilibriumPositions:
    """Solve for the stationary chain configuration.

    Damped Newton iteration from a uniformly spaced seed.  The step is
    halved whenever the gradient norm fails to decrease; convergence is
    declared at max-norm(gradient) < ``gradient_tol``.

    Raises
    ------
    SolverError
        If the gradient norm has not converged after ``max_iterations``.
    """
    n = config.ion_count
    alpha = config.quartic_coefficient
    u = (np.arange(1, n + 1) - (n + 1) / 2.0) * 1.0

    grad = potential_gradient(u, alpha)
    for _ in range(max_iterations):
        if np.max(np.abs(grad)) < gradient_tol:
            break
        step = np.linalg.solve(potential_hessian(u, alpha), -grad)
        scale = 1.0
        for _ in range(60):
            trial = u + scale * step
            trial_grad = potential_gradient(trial, alpha)
            if np.max(np.abs(trial_grad)) < np.max(np.abs(grad)) or scale < 1e-12:
                break
            scale *= 0.5
        u, grad = trial, trial_grad
    else:
        raise SolverError(
            f"equilibrium solver stalled after {max_iterations} iterations; "
            f"residual max-norm {np.max(np.abs(grad)):.3e}"
        )

    u = np.sort(u)
    return EquilibriumPositions(dimensionless_positions=u, length_scale=config.length_scale)


def normal_modes(config: TrapConfig, eq: EquilibriumPositions) -> ModeSpectrum:
    """Diagonalize the chain Hessian into axial normal modes.

    Frequencies come back in Hz, strictly ascending.  Each eigenvector
    column is normalized and signed so its largest-magnitude component is
    positive, which keeps downstream coupling patterns reproducible.

    Raises
    ------
    UnstableConfigError
        If any Hessian eigenvalue is non-positive.
    """
    hess = potential_hessian(eq.dimensionless_positions, config.quartic_coefficient)
    eigvals, eigvecs = np.linalg.eigh(hess)
    if eigvals[0] <= 0.0:
        raise UnstableConfigError(
            f"non-positive Hessian eigenvalue {eigvals[0]:.3e}; configuration unstable"
        )

    # Deterministic sign: largest-|component| entry of each column positive.
    for m in range(eigvecs.shape[1]):
        k = int(np.argmax(np.abs(eigvecs[:, m])))
        if eigvecs[k, m] < 0:
            eigvecs[:, m] = -eigvecs[:, m]

    freqs_hz = config.axial_com_frequency * np.sqrt(eigvals)
    return ModeSpectrum(frequencies=freqs_hz, eigenvectors=eigvecs)


def lamb_dicke(config: TrapConfig, spectrum: ModeSpectrum) -> LambDickeMatrix:
    """Per-ion, per-mode Lamb-Dicke parameters for the Raman beat."""
    omega_m = 2.0 * np.pi * spectrum.frequencies
    scale = config.raman_wavevector * np.sqrt(HBAR / (2.0 * config.ion_mass * omega_m))
    eta = spectrum.eigenvectors * scale[None, :]
    if np.max(np.abs(eta)) >= 1.0:
        warnings.warn(
            f"Lamb-Dicke parameter reaches {np.max(np.abs(eta)):.3f}; "
            "outside the Lamb-Dicke regime",
            stacklevel=2,
        )
    return LambDickeMatrix(eta=eta)


def chain_modes(config: TrapConfig) -> tuple[EquilibriumPositions, ModeSpectrum, LambDickeMatrix]:
    """Convenience pipeline: positions, spectrum and Lamb-Dicke matrix."""
    eq = equilibrium_positions(config)
    spectrum = normal_modes(config, eq)
    return eq, spectrum, lamb_dicke(config, spectrum)
