"""Pulse-schedule synthesis for a target interaction graph.

Design proceeds in two stages.  First, least squares finds per-mode
weights w_m so that the rank-one mode patterns P_m[i,j] = b_im b_jm
combine into the target: min || sum_m w_m P_m - J_target ||_F over the
allowed modes.  Second, each nonzero weight becomes one interaction
layer.  Near its addressed mode a layer contributes

    contribution_m  ~  tau_m / (omega_m * delta_m)

to the duration-weighted effective coupling (the 1/omega_m factor is the
Lamb-Dicke prefactor eta^2 omega cancellation), so choosing

    sign(delta_m) = sign(w_m),   tau_m = k_m / |delta_m|,
    |delta_m| = sqrt(k_m / (s * |w_m| * omega_m))

with integer k_m realizes the weights exactly for any global scale s > 0,
while closing the addressed mode's phonon loop exactly (the integer
detuning-duration product).  The scale s is swept through a grid of base
detunings and cycle multipliers; candidates are scored by the full
multimode fidelity of their effective coupling against the target, with
preference for candidates whose layers also close the spectator-mode
loops within tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .chain import LambDickeMatrix, ModeSpectrum
from .coupling import (
    CouplingMatrix,
    LaserLayer,
    LoopClosureReport,
    Schedule,
    effective_coupling,
    fidelity,
    layer_coupling_matrix,
    loop_closure_report,
)
from .targets import TargetGraph

DEFAULT_DETUNING_GRID = np.arange(50e3, 150e3 + 1e-9, 100.0)
DEFAULT_K_MAX = 6
DEFAULT_PRUNE_FRACTION = 0.02
DEFAULT_RESONANCE_MARGIN = 2e3


class UnrealizableWeightError(ValueError):
    """A weight cannot be realized inside the detuning band.

    Carries ``suggested_k_max`` when a larger cycle multiplier would fix it.
    """

    def __init__(self, message: str, suggested_k_max: int | None = None):
        super().__init__(message)
        self.suggested_k_max = suggested_k_max


class InfeasibleDesignError(RuntimeError):
    """No candidate schedule satisfied the design constraints."""


@dataclass(frozen=True)
class DesignProblem:
    """Target graph plus the chain it must be realized on."""

    target: TargetGraph
    spectrum: ModeSpectrum
    eta: LambDickeMatrix
    allowed_modes: tuple[int, ...]
    detuning_grid: np.ndarray = field(default_factory=lambda: DEFAULT_DETUNING_GRID.copy())
    max_layers: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "allowed_modes", tuple(self.allowed_modes))
        if len(self.allowed_modes) == 0:
            raise ValueError("allowed_modes must be nonempty")
        n = self.spectrum.n_ions
        for m in self.allowed_modes:
            if not 1 <= m <= n:
                raise ValueError(f"allowed mode {m} outside 1..{n}")
        if self.target.n_ions != n:
            raise ValueError(
                f"target has {self.target.n_ions} qubits but chain has {n} ions"
            )
        grid = np.asarray(self.detuning_grid, dtype=float)
        if grid.size == 0 or np.any(grid <= 0):
            raise ValueError("detuning_grid must hold positive candidate magnitudes")
        object.__setattr__(self, "detuning_grid", grid)


@dataclass(frozen=True)
class WeightSolution:
    """Least-squares mode weights with solver diagnostics."""

    modes: tuple[int, ...]
    weights: np.ndarray
    residual_norm: float
    rank: int
    nullspace_dim: int

    def nonzero(self, prune_fraction: float = DEFAULT_PRUNE_FRACTION):
        """(mode, weight) pairs above the pruning threshold."""
        peak = np.abs(self.weights).max()
        if peak == 0.0:
            return []
        keep = np.abs(self.weights) > prune_fraction * peak
        return [(m, float(w)) for m, w, k in zip(self.modes, self.weights, keep) if k]


@dataclass(frozen=True)
class DesignSolution:
    """A realized schedule with its quality metrics."""

    weights: WeightSolution
    schedule: Schedule
    achieved_fidelity: float
    rank_one_fidelity: float
    scale: float
    base_detuning: float
    cycle_multiplier: int
    closure: LoopClosureReport
    effective: CouplingMatrix


def mode_patterns(spectrum: ModeSpectrum, modes) -> list[np.ndarray]:
    """Zero-diagonal outer products b_m b_m^T for the given 1-based modes."""
    out = []
    for m in modes:
        b = spectrum.vector_of(m)
        p = np.outer(b, b)
        np.fill_diagonal(p, 0.0)
        out.append(p)
    return out


def solve_weights(problem: DesignProblem) -> WeightSolution:
    """Least-squares mode weights matching the target pattern.

    The target is rescaled to unit Frobenius norm over its strict upper
    triangle before solving, so weights are comparable across targets.
    Rank deficiency is reported through ``nullspace_dim``; the returned
    weights are then the minimum-norm solution.
    """
    n = problem.spectrum.n_ions
    iu = np.triu_indices(n, k=1)
    patterns = mode_patterns(problem.spectrum, problem.allowed_modes)
    design = np.stack([p[iu] for p in patterns], axis=1)
    y = problem.target.coupling.values[iu]
    norm = np.linalg.norm(y)
    if norm == 0.0:
        raise ValueError("target coupling is identically zero")
    weights, _, rank, _ = np.linalg.lstsq(design, y / norm, rcond=None)
    residual = np.linalg.norm(design @ weights - y / norm)
    return WeightSolution(
        modes=tuple(problem.allowed_modes),
        weights=weights,
        residual_norm=float(residual),
        rank=int(rank),
        nullspace_dim=len(problem.allowed_modes) - int(rank),
    )


def rank_one_coupling(spectrum: ModeSpectrum, weights: WeightSolution) -> CouplingMatrix:
    """The near-resonant design matrix sum_m w_m P_m."""
    patterns = mode_patterns(spectrum, weights.modes)
    total = sum(w * p for w, p in zip(weights.weights, patterns))
    return CouplingMatrix(values=total)


def _layer_plan(
    modes: np.ndarray,
    w: np.ndarray,
    freqs: np.ndarray,
    base_detuning: float,
    cycle_multiplier: int,
    k_max: int,
    band: tuple[float, float],
):
    """Per-mode (k, signed detuning) realizing weight ratios exactly.

    Returns (k_array, delta_array) or raises UnrealizableWeightError.
    """
    lo, hi = band
    r = np.abs(w) * freqs[modes - 1]
    scale = cycle_multiplier / (r.max() * base_detuning**2)
    k = np.maximum(1, np.ceil(scale * r * lo**2 - 1e-12).astype(int))
    delta_mag = np.sqrt(k / (scale * r))
    bad = (delta_mag > hi * (1 + 1e-12)) | (k > k_max)
    if np.any(bad):
        worst = int(np.argmax(delta_mag))
        needed = math.ceil(r.max() * lo**2 / (r.min() * hi**2))
        raise UnrealizableWeightError(
            f"weight on mode {modes[worst]} needs |detuning| "
            f"{delta_mag[worst]:.3g} Hz, outside the band [{lo:.3g}, {hi:.3g}]; "
            f"try k_max >= {needed}",
            suggested_k_max=needed,
        )
    return k, delta_mag * np.sign(w)


def weights_to_schedule(
    weights: WeightSolution,
    spectrum: ModeSpectrum,
    base_detuning: float,
    k_max: int = DEFAULT_K_MAX,
    cycle_multiplier: int = 1,
    band: tuple[float, float] | None = None,
    detunings: dict[int, float] | None = None,
    rabi: float = 41e3,
    phase: float = 0.0,
    prune_fraction: float = DEFAULT_PRUNE_FRACTION,
    repetitions: int = 1,
) -> Schedule:
    """Realize solved weights as loop-closed interaction layers.

    One layer per surviving weight, ordered by mode number.  Detuning
    signs follow the weight signs so each layer's near-resonant
    contribution carries the right orientation; durations are k/|detuning|
    with integer k, which closes the addressed mode's phonon loop exactly.

    When ``detunings`` is given (mode -> signed Hz) those magnitudes are
    used as-is and the integer multipliers k_m are rounded to match the
    weight ratios as closely as possible; otherwise magnitudes are derived
    from ``base_detuning`` within ``band``.
    """
    if base_detuning <= 0:
        raise ValueError("base_detuning must be > 0")
    live = weights.nonzero(prune_fraction)
    if not live:
        raise ValueError("all weights are zero; nothing to schedule")
    modes = np.array([m for m, _ in live])
    w = np.array([wi for _, wi in live])
    freqs = spectrum.frequencies

    if detunings is not None:
        missing = [int(m) for m in modes if m not in detunings]
        if missing:
            raise ValueError(f"detunings missing for modes {missing}")
        delta = np.array([
            abs(detunings[int(m)]) * np.sign(wi) for m, wi in zip(modes, w)
        ])
        q = np.abs(w) * freqs[modes - 1] * delta**2
        k = np.maximum(1, np.round(q / q.min()).astype(int))
        if np.any(k > k_max):
            worst = int(np.argmax(k))
            raise UnrealizableWeightError(
                f"weight on mode {modes[worst]} needs duration multiplier "
                f"{k[worst]} > k_max = {k_max}; try k_max >= {int(k.max())}",
                suggested_k_max=int(k.max()),
            )
    else:
        if band is None:
            band = (base_detuning, max(3.0 * base_detuning, 150e3))
        k, delta = _layer_plan(
            modes, w, freqs, base_detuning, cycle_multiplier, k_max, band
        )

    layers = [
        LaserLayer(
            mode_index=int(m),
            detuning=float(d),
            duration=float(ki / abs(d)),
            phase=phase,
            rabi=rabi,
        )
        for m, d, ki in zip(modes, delta, k)
    ]
    return Schedule(layers=tuple(layers), repetitions=repetitions)


def realized_weights(schedule: Schedule, spectrum: ModeSpectrum) -> dict[int, float]:
    """Rank-one weights a schedule actually implements, max-normalized."""
    freqs = spectrum.frequencies
    raw = {}
    for layer in schedule.layers:
        omega = freqs[layer.mode_index - 1]
        contribution = layer.duration / (omega * layer.detuning)
        raw[layer.mode_index] = raw.get(layer.mode_index, 0.0) + contribution
    peak = max(abs(v) for v in raw.values())
    return {m: v / peak for m, v in raw.items()}


def _full_model_fidelities(
    problem: DesignProblem,
    modes: np.ndarray,
    deltas: np.ndarray,
    taus: np.ndarray,
) -> np.ndarray:
    """Vectorized fidelity of candidate schedules (axis 0) vs the target."""
    freqs = problem.spectrum.frequencies
    eta = problem.eta.eta
    n = problem.spectrum.n_ions
    mus = freqs[modes - 1][None, :] + deltas
    omega_ang = 2.0 * np.pi * freqs
    mu_ang = 2.0 * np.pi * mus
    mode_weights = omega_ang[None, None, :] / (
        mu_ang[:, :, None] ** 2 - omega_ang[None, None, :] ** 2
    )
    j_layers = np.einsum("im,clm,jm->clij", eta, mode_weights, eta)
    share = taus / taus.sum(axis=1, keepdims=True)
    jbar = np.einsum("clij,cl->cij", j_layers, share)
    iu = np.triu_indices(n, k=1)
    v = jbar[:, iu[0], iu[1]]
    t = problem.target.coupling.values[iu]
    t = t / np.linalg.norm(t)
    with np.errstate(invalid="ignore"):
        cos = (v @ t) / np.linalg.norm(v, axis=1)
    return 0.5 * (1.0 + cos)


def design_schedule(
    problem: DesignProblem,
    k_max: int = DEFAULT_K_MAX,
    rabi: float = 41e3,
    phase: float = 0.0,
    prune_fraction: float = DEFAULT_PRUNE_FRACTION,
    closure_tolerance: float = 0.05,
    resonance_margin: float = DEFAULT_RESONANCE_MARGIN,
) -> DesignSolution:
    """Grid-search the detuning scale for the best realizable schedule.

    Every candidate pairs a base detuning from ``problem.detuning_grid``
    with a cycle multiplier K in 1..k_max; both fix the global weight
    scale.  Candidates whose drives collide with a motional mode are
    discarded.  Scoring is lexicographic: schedules whose spectator-mode
    loops close within ``closure_tolerance`` beat those that do not
    (exactly commensurate spectra are rare, so this tier is often empty),
    then higher full-model fidelity, then shorter total duration.
    """
    weights = solve_weights(problem)
    live = weights.nonzero(prune_fraction)
    if not live:
        raise InfeasibleDesignError("least squares produced no usable weights")
    if problem.max_layers is not None and len(live) > problem.max_layers:
        live = sorted(live, key=lambda mw: -abs(mw[1]))[: problem.max_layers]
        live = sorted(live)
    modes = np.array([m for m, _ in live])
    w = np.array([wi for _, wi in live])
    freqs = problem.spectrum.frequencies
    r = np.abs(w) * freqs[modes - 1]
    grid = problem.detuning_grid
    lo, hi = float(grid.min()), float(grid.max())

    # Candidate axis: (base detuning x cycle multiplier), flattened.
    base = np.repeat(grid, k_max)
    mult = np.tile(np.arange(1, k_max + 1), grid.size)
    scale = mult / (r.max() * base**2)
    k = np.maximum(1, np.ceil(scale[:, None] * r[None, :] * lo**2 - 1e-12).astype(int))
    delta_mag = np.sqrt(k / (scale[:, None] * r[None, :]))
    feasible = (delta_mag <= hi * (1 + 1e-12)).all(axis=1) & (k <= k_max).all(axis=1)

    deltas = delta_mag * np.sign(w)[None, :]
    mus = freqs[modes - 1][None, :] + deltas
    clear = np.abs(mus[:, :, None] - freqs[None, None, :]) > resonance_margin
    feasible &= clear.all(axis=(1, 2)) & (mus > 0).all(axis=1)
    if not feasible.any():
        raise InfeasibleDesignError(
            "no candidate detuning realizes the weights inside the band; "
            f"grid [{lo:.3g}, {hi:.3g}] Hz, k_max = {k_max}"
        )

    taus = k / delta_mag
    fid = _full_model_fidelities(problem, modes, deltas, taus)

    products = (mus[:, :, None] - freqs[None, None, :]) * taus[:, :, None]
    closure_dev = np.abs(products - np.round(products)).max(axis=(1, 2))
    closure_ok = closure_dev <= closure_tolerance

    total_tau = taus.sum(axis=1)
    order = np.lexsort(
        (total_tau, -fid, ~closure_ok, ~feasible)
    )
    best = int(order[0])

    schedule = Schedule(
        layers=tuple(
            LaserLayer(
                mode_index=int(m),
                detuning=float(d),
                duration=float(ki / abs(d)),
                phase=phase,
                rabi=rabi,
            )
            for m, d, ki in zip(modes, deltas[best], k[best])
        ),
        repetitions=1,
    )

    layer_mats = [
        layer_coupling_matrix(layer, problem.spectrum, problem.eta, rabi_per_ion=rabi)
        for layer in schedule.layers
    ]
    jbar = effective_coupling(schedule, layer_mats)
    achieved = fidelity(jbar, problem.target.coupling).fidelity
    rank_one = fidelity(
        rank_one_coupling(problem.spectrum, weights), problem.target.coupling
    ).fidelity

    return DesignSolution(
        weights=weights,
        schedule=schedule,
        achieved_fidelity=achieved,
        rank_one_fidelity=rank_one,
        scale=float(np.abs(jbar.values).max()),
        base_detuning=float(base[best]),
        cycle_multiplier=int(mult[best]),
        closure=loop_closure_report(schedule, problem.spectrum, closure_tolerance),
        effective=jbar,
    )


def design_report(problem: DesignProblem, solution: DesignSolution) -> tuple[str, dict]:
    """Human-readable layer table plus a machine-readable JSON twin."""
    lines = [
        f"target: {problem.target.name}  ({problem.target.n_ions} qubits)",
        f"{'mode':>4}  {'detuning [kHz]':>14}  {'time [us]':>10}",
    ]
    for layer in solution.schedule.layers:
        lines.append(
            f"{layer.mode_index:>4}  {layer.detuning / 1e3:>14.3f}  "
            f"{layer.duration * 1e6:>10.3f}"
        )
    lines.append(f"achieved fidelity: {solution.achieved_fidelity:.6f}")
    lines.append(f"rank-one design fidelity: {solution.rank_one_fidelity:.6f}")
    lines.append(f"coupling scale: {solution.scale:.6g} rad/s")
    lines.append(
        f"loop closure: {'ok' if solution.closure.all_closed else 'violated'} "
        f"(max deviation {solution.closure.max_deviation:.4f}, "
        f"tolerance {solution.closure.tolerance})"
    )
    text = "\n".join(lines)

    impl = solution.effective.max_normalized()
    report = {
        "target": problem.target.to_json_dict(),
        "schedule": solution.schedule.to_json_dict(),
        "weights": {
            "modes": list(solution.weights.modes),
            "values": solution.weights.weights.tolist(),
            "nullspace_dim": solution.weights.nullspace_dim,
        },
        "achieved_fidelity": solution.achieved_fidelity,
        "rank_one_fidelity": solution.rank_one_fidelity,
        "scale_rad_per_s": solution.scale,
        "base_detuning_hz": solution.base_detuning,
        "cycle_multiplier": solution.cycle_multiplier,
        "implemented_normalized": impl.to_json_dict(),
        "closure": solution.closure.to_json_dict(),
    }
    return text, report
