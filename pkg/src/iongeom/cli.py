"""Command-line front end: modes, design, fidelity, evolve, bsb, sweep.

Every subcommand reads one YAML config (see config.py for the schema),
writes deterministic CSV/JSON artifacts into the output directory, and
exits 0 on success, 1 on validation errors, 2 on infeasible designs or
missed fidelity thresholds, 3 on numerical failures.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib.metadata import version as _pkg_version
from pathlib import Path

import numpy as np

from . import chain
from .chain import SolverError, UnstableConfigError
from .config import (
    ConfigError,
    DesignDirective,
    RunConfig,
    load_config,
)
from .coupling import (
    NonCommutingScheduleError,
    ResonanceError,
    Schedule,
    effective_coupling,
    fidelity,
    layer_coupling_matrix,
    loop_closure_report,
)
from .design import (
    DesignProblem,
    InfeasibleDesignError,
    UnrealizableWeightError,
    design_report,
    design_schedule,
)
from .dynamics import (
    SpinState,
    compare_three_ways,
    evolve_static,
    floquet_xy,
    floquet_xyz,
    pair_hamiltonian,
    run_ising_schedule,
)
from .sideband import TruncationError, bsb_evolution
from .targets import TargetValidationError

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_INFEASIBLE = 2
EXIT_NUMERICAL = 3


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _require(value, name: str):
    if value is None:
        raise CliError(f"config section '{name}' is required for this command", EXIT_VALIDATION)
    return value


def _json_dumps(data) -> str:
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


class _Writer:
    def __init__(self, out_dir: Path, formats: tuple[str, ...]):
        self.out_dir = out_dir
        self.formats = formats
        out_dir.mkdir(parents=True, exist_ok=True)

    def csv(self, name: str, content: str):
        if "csv" in self.formats:
            (self.out_dir / f"{name}.csv").write_text(content)

    def json(self, name: str, data):
        if "json" in self.formats:
            (self.out_dir / f"{name}.json").write_text(_json_dumps(data))

    def text(self, name: str, content: str):
        (self.out_dir / name).write_text(content)


def _matrix_csv(values: np.ndarray, header: str) -> str:
    lines = [f"# {header}"]
    for row in np.atleast_2d(values):
        lines.append(",".join(f"{v:.17g}" for v in row))
    return "\n".join(lines) + "\n"


def _chain_pipeline(cfg: RunConfig):
    trap = _require(cfg.trap, "trap")
    eq = chain.equilibrium_positions(trap)
    spectrum = chain.normal_modes(trap, eq)
    eta = chain.lamb_dicke(trap, spectrum)
    return trap, eq, spectrum, eta


def _resolve_schedule(cfg: RunConfig, spectrum, eta):
    """Inline schedule as-is; a design directive runs the designer."""
    sched = _require(cfg.schedule, "schedule")
    if isinstance(sched, Schedule):
        return sched, None
    directive: DesignDirective = sched
    target = _require(cfg.target, "target")
    modes = directive.allowed_modes or tuple(range(1, spectrum.n_ions + 1))
    problem = DesignProblem(
        target=target,
        spectrum=spectrum,
        eta=eta,
        allowed_modes=modes,
        detuning_grid=directive.grid(),
        max_layers=directive.max_layers,
    )
    solution = design_schedule(
        problem, k_max=directive.k_max, rabi=directive.rabi, phase=directive.phase
    )
    return solution.schedule, solution


def cmd_modes(cfg: RunConfig, writer: _Writer, threshold: float) -> int:
    trap, eq, spectrum, eta = _chain_pipeline(cfg)
    u = eq.dimensionless_positions
    writer.csv(
        "positions",
        "ion,dimensionless,meters\n"
        + "\n".join(
            f"{i + 1},{u[i]:.17g},{eq.physical_positions[i]:.17g}" for i in range(len(u))
        )
        + "\n",
    )
    writer.csv(
        "frequencies",
        "mode,frequency_hz\n"
        + "\n".join(
            f"{m + 1},{f:.17g}" for m, f in enumerate(spectrum.frequencies)
        )
        + "\n",
    )
    writer.csv(
        "eigenvectors",
        _matrix_csv(spectrum.eigenvectors, "rows = ions, columns = modes"),
    )
    writer.csv("lamb_dicke", _matrix_csv(eta.eta, "rows = ions, columns = modes"))
    writer.json(
        "modes",
        {
            "ion_count": trap.ion_count,
            "length_scale_m": eq.length_scale,
            "positions_dimensionless": u.tolist(),
            "positions_m": eq.physical_positions.tolist(),
            "frequencies_hz": spectrum.frequencies.tolist(),
            "eigenvectors": spectrum.eigenvectors.tolist(),
            "lamb_dicke": eta.eta.tolist(),
        },
    )
    return EXIT_OK


def cmd_design(cfg: RunConfig, writer: _Writer, threshold: float) -> int:
    trap, eq, spectrum, eta = _chain_pipeline(cfg)
    sched = _require(cfg.schedule, "schedule")
    if isinstance(sched, Schedule):
        raise CliError(
            "the design command needs a 'schedule: design:' directive", EXIT_VALIDATION
        )
    schedule, solution = _resolve_schedule(cfg, spectrum, eta)
    target = cfg.target
    problem = DesignProblem(
        target=target,
        spectrum=spectrum,
        eta=eta,
        allowed_modes=sched.allowed_modes or tuple(range(1, spectrum.n_ions + 1)),
        detuning_grid=sched.grid(),
        max_layers=sched.max_layers,
    )
    text, report = design_report(problem, solution)
    writer.text("design.txt", text + "\n")
    writer.json("design", report)
    writer.json("schedule", solution.schedule.to_json_dict())
    writer.csv(
        "effective",
        solution.effective.max_normalized().to_csv(),
    )
    writer.csv("target", target.coupling.to_csv())
    print(text)
    if solution.achieved_fidelity < threshold:
        raise CliError(
            f"achieved fidelity {solution.achieved_fidelity:.6f} below threshold "
            f"{threshold}",
            EXIT_INFEASIBLE,
        )
    return EXIT_OK


def cmd_fidelity(cfg: RunConfig, writer: _Writer, threshold: float) -> int:
    trap, eq, spectrum, eta = _chain_pipeline(cfg)
    target = _require(cfg.target, "target")
    schedule, solution = _resolve_schedule(cfg, spectrum, eta)
    mats = [layer_coupling_matrix(l, spectrum, eta) for l in schedule.layers]
    jbar = effective_coupling(schedule, mats)
    report = fidelity(jbar, target.coupling)
    closure = loop_closure_report(schedule, spectrum)
    writer.json(
        "fidelity",
        {"fidelity": report.to_json_dict(), "closure": closure.to_json_dict()},
    )
    writer.csv("implemented", report.implemented.to_csv())
    writer.csv("target", report.target.to_csv())
    print(f"fidelity: {report.fidelity:.6f}")
    if report.fidelity < threshold:
        raise CliError(
            f"fidelity {report.fidelity:.6f} below threshold {threshold}",
            EXIT_INFEASIBLE,
        )
    return EXIT_OK


def _write_trace(writer: _Writer, name: str, trace) -> None:
    writer.csv(name, trace.to_csv())
    writer.json(name, trace.to_json_dict())


def cmd_evolve(cfg: RunConfig, writer: _Writer, threshold: float) -> int:
    trap, eq, spectrum, eta = _chain_pipeline(cfg)
    dyn = _require(cfg.dynamics, "dynamics")
    schedule, solution = _resolve_schedule(cfg, spectrum, eta)
    mats = [layer_coupling_matrix(l, spectrum, eta) for l in schedule.layers]
    state0 = SpinState.all_down(trap.ion_count)
    positions = eq.physical_positions
    offsets = cfg.offsets

    if dyn.sequence == "ising":
        trace = run_ising_schedule(
            state0,
            schedule,
            mats,
            offsets=offsets,
            positions=positions if offsets else None,
            repetitions=dyn.repetitions,
        )
        _write_trace(writer, "trace", trace)
        if dyn.compare_three_ways:
            jbar = effective_coupling(schedule, mats)
            target = cfg.target
            if target is not None:
                h_desired = pair_hamiltonian(
                    type(jbar)(
                        values=target.coupling.values * np.abs(jbar.values).max()
                    ),
                    schedule.layers[0].phase,
                )
            else:
                h_desired = pair_hamiltonian(jbar, schedule.layers[0].phase)
            desired, ideal, perturbed = compare_three_ways(
                h_desired,
                state0,
                schedule,
                mats,
                offsets,
                positions,
                repetitions=dyn.repetitions,
            )
            _write_trace(writer, "trace_desired", desired)
            _write_trace(writer, "trace_ideal", ideal)
            _write_trace(writer, "trace_offsets", perturbed)
    elif dyn.sequence in ("floquet_xy", "floquet_xyz"):
        if len(schedule.layers) < 2:
            raise CliError(
                "floquet sequences need a two-layer schedule (two coupling patterns)",
                EXIT_VALIDATION,
            )
        t1 = dyn.t1 if dyn.t1 is not None else schedule.layers[0].duration
        t3 = dyn.t3 if dyn.t3 is not None else schedule.layers[1].duration
        runner = floquet_xy if dyn.sequence == "floquet_xy" else floquet_xyz
        trace = runner(state0, t1, t3, mats[0], mats[1], dyn.repetitions)
        _write_trace(writer, "trace", trace)
    else:  # static
        jbar = effective_coupling(schedule, mats)
        h = pair_hamiltonian(jbar, schedule.layers[0].phase)
        cycle = schedule.cycle_duration
        times = np.arange(dyn.repetitions + 1) * cycle
        trace = evolve_static(state0, h, times)
        _write_trace(writer, "trace", trace)
    return EXIT_OK


def cmd_bsb(cfg: RunConfig, writer: _Writer, threshold: float) -> int:
    trap, eq, spectrum, eta = _chain_pipeline(cfg)
    spec = _require(cfg.bsb, "bsb")
    if not 1 <= spec.mode_index <= trap.ion_count:
        raise CliError(
            f"bsb.mode {spec.mode_index} outside 1..{trap.ion_count}", EXIT_VALIDATION
        )
    rabi_per_ion = None
    if cfg.offsets is not None:
        rabi_per_ion = spec.carrier_rabi * cfg.offsets.rabi_factors(
            eq.physical_positions
        )
    trace = bsb_evolution(
        spectrum,
        eta,
        spec.mode_index,
        spec.carrier_rabi,
        spec.times,
        mean_n=spec.mean_n,
        rabi_per_ion=rabi_per_ion,
    )
    writer.csv("bsb", trace.to_csv())
    writer.json("bsb", trace.to_json_dict())
    return EXIT_OK


def cmd_sweep(cfg: RunConfig, writer: _Writer, threshold: float) -> int:
    trap = _require(cfg.trap, "trap")
    sweep = _require(cfg.sweep, "sweep")
    rows = []

    def evaluate(trap_cfg, target, schedule_cfg):
        eq = chain.equilibrium_positions(trap_cfg)
        spectrum = chain.normal_modes(trap_cfg, eq)
        eta = chain.lamb_dicke(trap_cfg, spectrum)
        if isinstance(schedule_cfg, Schedule):
            mats = [layer_coupling_matrix(l, spectrum, eta) for l in schedule_cfg.layers]
            jbar = effective_coupling(schedule_cfg, mats)
            return fidelity(jbar, target.coupling).fidelity, None
        modes = schedule_cfg.allowed_modes or tuple(range(1, spectrum.n_ions + 1))
        problem = DesignProblem(
            target=target,
            spectrum=spectrum,
            eta=eta,
            allowed_modes=modes,
            detuning_grid=schedule_cfg.grid(),
            max_layers=schedule_cfg.max_layers,
        )
        sol = design_schedule(
            problem, k_max=schedule_cfg.k_max, rabi=schedule_cfg.rabi,
            phase=schedule_cfg.phase,
        )
        return sol.achieved_fidelity, sol.base_detuning

    if sweep.axis in ("omega_z", "alpha"):
        target = _require(cfg.target, "target")
        schedule_cfg = _require(cfg.schedule, "schedule")
        for value in sweep.values:
            if sweep.axis == "omega_z":
                trap_cfg = chain.TrapConfig(
                    ion_count=trap.ion_count,
                    axial_com_frequency=float(value),
                    ion_mass=trap.ion_mass,
                    raman_wavevector=trap.raman_wavevector,
                    quartic_coefficient=trap.quartic_coefficient,
                )
            else:
                trap_cfg = chain.TrapConfig(
                    ion_count=trap.ion_count,
                    axial_com_frequency=trap.axial_com_frequency,
                    ion_mass=trap.ion_mass,
                    raman_wavevector=trap.raman_wavevector,
                    quartic_coefficient=float(value),
                )
            fid, base = evaluate(trap_cfg, target, schedule_cfg)
            rows.append({"value": float(value), "fidelity": fid, "base_detuning_hz": base})
    elif sweep.axis == "detuning":
        target = _require(cfg.target, "target")
        schedule_cfg = _require(cfg.schedule, "schedule")
        if isinstance(schedule_cfg, Schedule):
            raise CliError(
                "detuning sweeps need a 'schedule: design:' directive", EXIT_VALIDATION
            )
        eq = chain.equilibrium_positions(trap)
        spectrum = chain.normal_modes(trap, eq)
        eta = chain.lamb_dicke(trap, spectrum)
        modes = schedule_cfg.allowed_modes or tuple(range(1, spectrum.n_ions + 1))
        for value in sweep.values:
            problem = DesignProblem(
                target=target,
                spectrum=spectrum,
                eta=eta,
                allowed_modes=modes,
                detuning_grid=np.array([float(value)]),
                max_layers=schedule_cfg.max_layers,
            )
            try:
                sol = design_schedule(
                    problem, k_max=schedule_cfg.k_max, rabi=schedule_cfg.rabi,
                    phase=schedule_cfg.phase,
                )
                rows.append(
                    {"value": float(value), "fidelity": sol.achieved_fidelity,
                     "base_detuning_hz": sol.base_detuning}
                )
            except (InfeasibleDesignError, UnrealizableWeightError):
                rows.append(
                    {"value": float(value), "fidelity": float("nan"),
                     "base_detuning_hz": None}
                )
    else:  # s sweep over leaves-only trees
        from .targets import leaves_only_tree

        raw_target = cfg.raw.get("target", {})
        if raw_target.get("name") != "leaves_only_tree":
            raise CliError(
                "s sweeps need target.name = leaves_only_tree", EXIT_VALIDATION
            )
        n_qubits = raw_target.get("n_qubits")
        schedule_cfg = cfg.schedule
        for value in sweep.values:
            target = leaves_only_tree(int(n_qubits), float(value))
            row = {"value": float(value), "weight_ratio": float(2.0 ** value)}
            if schedule_cfg is not None:
                fid, base = evaluate(trap, target, schedule_cfg)
                row["fidelity"] = fid
                row["base_detuning_hz"] = base
            rows.append(row)

    cols = sorted({k for row in rows for k in row})
    cols = ["value"] + [c for c in cols if c != "value"]
    lines = [",".join(cols)]
    for row in rows:
        lines.append(
            ",".join(
                ""
                if row.get(c) is None
                else f"{row[c]:.12g}"
                for c in cols
            )
        )
    writer.csv("sweep", "\n".join(lines) + "\n")
    writer.json("sweep", {"axis": sweep.axis, "rows": rows})
    return EXIT_OK


COMMANDS = {
    "modes": cmd_modes,
    "design": cmd_design,
    "fidelity": cmd_fidelity,
    "evolve": cmd_evolve,
    "bsb": cmd_bsb,
    "sweep": cmd_sweep,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="iongeom",
        description="Pulse-schedule engineering for programmable ion-chain geometries",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="YAML config file")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument(
            "--format", choices=["csv", "json", "both"], default="both",
            help="artifact formats to write",
        )
        p.add_argument(
            "--threshold", type=float, default=0.0,
            help="minimum acceptable fidelity (design / fidelity commands)",
        )
        p.add_argument(
            "--seedless", action="store_true",
            help="reserved; all computation is deterministic already",
        )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        formats = ("csv", "json") if args.format == "both" else (args.format,)
        if cfg.output_formats != ("csv", "json") and args.format == "both":
            formats = cfg.output_formats
        out_dir = Path(args.out if args.out != "out" or not cfg.output_directory
                       else cfg.output_directory)
        writer = _Writer(out_dir, formats)
        code = COMMANDS[args.command](cfg, writer, args.threshold)
        writer.json(
            "meta",
            {
                "command": args.command,
                "config": cfg.raw,
                "package": "iongeom",
                "version": _pkg_version("iongeom"),
            },
        )
        return code
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (ConfigError, TargetValidationError, NonCommutingScheduleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (InfeasibleDesignError, UnrealizableWeightError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (SolverError, UnstableConfigError, ResonanceError, TruncationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
