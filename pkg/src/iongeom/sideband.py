"""Multi-ion blue-sideband dynamics on a single motional mode.

The drive couples every spin to one phonon ladder through

    H_bsb = sum_i eta_im Omega_i (sigma_plus^i a_dag + sigma_minus^i a)

with Omega_i the angular carrier Rabi rate of ion i.  The initial state is
all spins down tensored with a thermal phonon mixture; since that mixture
is diagonal in the Fock basis and the dynamics is unitary, each Fock
branch evolves independently and observables are the thermally weighted
averages of the branch observables.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chain import LambDickeMatrix, ModeSpectrum
from .dynamics import SZ, _single_site

SIGMA_PLUS = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)

TOP_LEVEL_TOL = 1e-4
THERMAL_TAIL_TOL = 1e-6
N_MAX_CAP = 64


class TruncationError(RuntimeError):
    """Phonon population leaked into the top Fock level beyond tolerance."""


@dataclass(frozen=True)
class SpinPhononState:
    """Pure state on the spin (x) truncated-Fock product space.

    Basis ordering is spin index major (qubit 1 the most significant bit,
    all-down = 0) and Fock index minor.
    """

    amplitudes: np.ndarray
    n_max: int

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.size % (self.n_max + 1) != 0:
            raise ValueError(
                f"{amps.size} amplitudes do not factor over {self.n_max + 1} "
                "Fock levels"
            )
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > 1e-10:
            raise ValueError(f"state norm {norm} deviates from 1 beyond 1e-10")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def all_down_fock(cls, n_ions: int, n_max: int, phonons: int) -> "SpinPhononState":
        if not 0 <= phonons <= n_max:
            raise ValueError(f"phonon number {phonons} outside 0..{n_max}")
        amps = np.zeros(2**n_ions * (n_max + 1), dtype=complex)
        amps[phonons] = 1.0
        return cls(amplitudes=amps, n_max=n_max)

    @property
    def n_ions(self) -> int:
        return int(np.log2(self.amplitudes.size // (self.n_max + 1)))

    def top_level_population(self) -> float:
        """Population of the highest Fock level (truncation monitor)."""
        probs = np.abs(self.amplitudes.reshape(-1, self.n_max + 1)) ** 2
        return float(probs[:, -1].sum())


@dataclass(frozen=True)
class ThermalWeights:
    """Truncated thermal occupation weights p_n = nbar^n / (nbar+1)^(n+1)."""

    mean_n: float
    weights: np.ndarray

    @classmethod
    def build(cls, mean_n: float, n_max: int) -> "ThermalWeights":
        if mean_n < 0:
            raise ValueError("mean_n must be >= 0")
        n = np.arange(n_max + 1)
        weights = mean_n**n / (mean_n + 1.0) ** (n + 1)
        tw = cls(mean_n=mean_n, weights=weights)
        if tw.tail > THERMAL_TAIL_TOL:
            raise ValueError(
                f"thermal tail {tw.tail:.3g} above {THERMAL_TAIL_TOL}; "
                f"increase n_max beyond {n_max}"
            )
        return tw

    @property
    def n_max(self) -> int:
        return len(self.weights) - 1

    @property
    def tail(self) -> float:
        return float(1.0 - self.weights.sum())


def thermal_branch_count(mean_n: float) -> int:
    """Smallest n with thermal tail below tolerance (0 for a ground-state mode)."""
    if mean_n == 0.0:
        return 0
    # tail after n levels is (nbar / (nbar + 1))^(n + 1)
    return int(np.ceil(np.log(THERMAL_TAIL_TOL) / np.log(mean_n / (mean_n + 1.0)))) - 1


def default_n_max(mean_n: float) -> int:
    """Default truncation: thermal support with a floor of 8 levels."""
    return max(8, thermal_branch_count(mean_n))


def bsb_hamiltonian(eta_mode, rabi_per_ion, n_max: int) -> np.ndarray:
    """Blue-sideband Hamiltonian on the spin (x) Fock product space.

    ``eta_mode`` holds the per-ion Lamb-Dicke parameters of the addressed
    mode and ``rabi_per_ion`` the carrier Rabi rates in Hz (scalar
    broadcasts).  Fock space is truncated at ``n_max`` phonons; basis
    ordering is spin index major, Fock index minor.
    """
    eta_mode = np.asarray(eta_mode, dtype=float)
    n_ions = eta_mode.size
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    omega = 2.0 * np.pi * np.broadcast_to(
        np.asarray(rabi_per_ion, dtype=float), (n_ions,)
    )
    dim_fock = n_max + 1
    lower = np.diag(np.sqrt(np.arange(1, dim_fock)), k=1)  # a |n> = sqrt(n) |n-1>
    raise_op = lower.T
    h = np.zeros((2**n_ions * dim_fock,) * 2, dtype=complex)
    for i in range(1, n_ions + 1):
        sp = _single_site(SIGMA_PLUS, i, n_ions)
        g = eta_mode[i - 1] * omega[i - 1]
        h += g * np.kron(sp, raise_op)
        h += g * np.kron(sp.conj().T, lower)
    return h


def excitation_number_operator(n_ions: int, n_max: int) -> np.ndarray:
    """Diagonal of K = (number of up spins) - (phonon number), conserved."""
    up_counts = np.zeros(2**n_ions)
    for i in range(1, n_ions + 1):
        up_counts += (np.diag(_single_site(SZ, i, n_ions)).real + 1.0) / 2.0
    phonons = np.arange(n_max + 1, dtype=float)
    return (up_counts[:, None] - phonons[None, :]).ravel()


@dataclass(frozen=True)
class SidebandTrace:
    """Per-ion and averaged spin-down populations on a time grid."""

    times: np.ndarray
    p_down: np.ndarray
    mean_n: float
    n_max: int

    @property
    def average(self) -> np.ndarray:
        return self.p_down.mean(axis=1)

    def to_csv(self) -> str:
        n = self.p_down.shape[1]
        cols = ["time"] + [f"p_down_site_{i}" for i in range(1, n + 1)] + ["average"]
        lines = [",".join(cols)]
        avg = self.average
        for k, t in enumerate(self.times):
            row = [f"{t:.12g}"] + [f"{v:.12g}" for v in self.p_down[k]] + [f"{avg[k]:.12g}"]
            lines.append(",".join(row))
        return "\n".join(lines) + "\n"

    def to_json_dict(self) -> dict:
        return {
            "times": self.times.tolist(),
            "p_down": self.p_down.tolist(),
            "average": self.average.tolist(),
            "mean_n": self.mean_n,
            "n_max": self.n_max,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "SidebandTrace":
        return cls(
            times=np.array(data["times"], dtype=float),
            p_down=np.array(data["p_down"], dtype=float),
            mean_n=float(data["mean_n"]),
            n_max=int(data["n_max"]),
        )


def _branch_p_down(
    eig: tuple[np.ndarray, np.ndarray],
    n_ions: int,
    n_max: int,
    start_n: int,
    times: np.ndarray,
) -> np.ndarray:
    """P(down) per ion for the branch starting in |down...down> x |n>.

    ``eig`` is the shared (eigenvalues, eigenvectors) pair of the sideband
    Hamiltonian.  Raises TruncationError if the top Fock level acquires
    population beyond tolerance at any sampled time.
    """
    evals, evecs = eig
    dim_fock = n_max + 1
    psi0 = SpinPhononState.all_down_fock(n_ions, n_max, start_n)
    coeff = evecs.conj().T @ psi0.amplitudes
    phases = np.exp(-1.0j * np.outer(times, evals))
    states = (evecs @ (phases * coeff[None, :]).T).T
    probs = np.abs(states) ** 2
    probs = probs.reshape(len(times), 2**n_ions, dim_fock)
    top = probs[:, :, n_max].sum(axis=1).max()
    if top > TOP_LEVEL_TOL:
        raise TruncationError(
            f"top Fock level population {top:.3g} exceeds {TOP_LEVEL_TOL} "
            f"(n_max = {n_max})"
        )
    spin_probs = probs.sum(axis=2)
    idx = np.arange(2**n_ions)
    out = np.empty((len(times), n_ions))
    for i in range(1, n_ions + 1):
        down = ((idx >> (n_ions - i)) & 1) == 0
        out[:, i - 1] = spin_probs[:, down].sum(axis=1)
    return out


def bsb_evolution(
    spectrum: ModeSpectrum,
    eta: LambDickeMatrix,
    mode_index: int,
    carrier_rabi: float,
    times,
    mean_n: float = 0.0,
    rabi_per_ion=None,
    n_max: int | None = None,
) -> SidebandTrace:
    """Thermal-averaged blue-sideband flopping on one mode.

    Evolves each Fock branch |down..down> x |n> under the sideband
    Hamiltonian and combines the per-ion P(down) curves with normalized
    thermal weights.  If population leaks into the top Fock level the
    truncation is doubled and the evolution retried, up to a hard cap.
    """
    times = np.asarray(times, dtype=float)
    eta_mode = eta.eta[:, mode_index - 1]
    n_ions = eta_mode.size
    rabi = carrier_rabi if rabi_per_ion is None else rabi_per_ion
    n_branches = thermal_branch_count(mean_n)
    trunc = default_n_max(mean_n) if n_max is None else n_max

    while True:
        weights = ThermalWeights.build(mean_n, trunc)
        h = bsb_hamiltonian(eta_mode, rabi, trunc)
        eig = np.linalg.eigh(h)
        try:
            branches = [
                _branch_p_down(eig, n_ions, trunc, n, times)
                for n in range(n_branches + 1)
            ]
            break
        except TruncationError:
            if 2 * trunc > N_MAX_CAP:
                raise
            trunc *= 2

    live = weights.weights[: n_branches + 1]
    live = live / live.sum()
    p_down = sum(w * b for w, b in zip(live, branches))
    return SidebandTrace(times=times, p_down=p_down, mean_n=mean_n, n_max=trunc)
