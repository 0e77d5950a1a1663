"""Strict config parsing with explicit unit suffixes.

Every dimensioned value in a config file is a string like ``"107.6 kHz"``
or ``"9.29 us"``; bare numbers are rejected wherever a unit is expected,
and unknown keys are rejected everywhere.  Dimensionless values
(ion counts, the quartic coefficient, weights, exponents) are plain
numbers.  All quantities normalize to SI on load.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml

from .chain import TrapConfig
from .coupling import LaserLayer, Schedule
from .dynamics import OffsetModel
from .targets import BUILTIN_TARGETS, TargetGraph, custom_target


class ConfigError(ValueError):
    """Configuration file failed validation; message carries the key path."""


UNIT_TABLES = {
    "frequency": {"Hz": 1.0, "kHz": 1e3, "MHz": 1e6, "GHz": 1e9},
    "time": {"s": 1.0, "ms": 1e-3, "us": 1e-6, "ns": 1e-9},
    "length": {"m": 1.0, "mm": 1e-3, "um": 1e-6, "nm": 1e-9},
    "mass": {"kg": 1.0, "amu": 1.66053906660e-27, "Da": 1.66053906660e-27},
    "wavevector": {"rad/m": 1.0, "rad/um": 1e6},
    "gradient": {"Hz/m": 1.0, "Hz/um": 1e6, "kHz/m": 1e3, "kHz/um": 1e9},
}

_QUANTITY_RE = re.compile(r"^\s*([+-]?[\d.]+(?:[eE][+-]?\d+)?)\s*([A-Za-z/]+)\s*$")


def parse_quantity(value, kind: str, path: str) -> float:
    """Parse ``value`` as a quantity of the given kind, returning SI units."""
    table = UNIT_TABLES[kind]
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        raise ConfigError(
            f"{path}: bare number {value!r} needs a unit suffix "
            f"({', '.join(table)})"
        )
    if not isinstance(value, str):
        raise ConfigError(f"{path}: expected a quantity string, got {value!r}")
    match = _QUANTITY_RE.match(value)
    if not match:
        raise ConfigError(f"{path}: cannot parse quantity {value!r}")
    number, unit = match.groups()
    if unit not in table:
        raise ConfigError(
            f"{path}: unknown {kind} unit {unit!r} (expected one of {', '.join(table)})"
        )
    return float(number) * table[unit]


def parse_number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}: expected a plain number, got {value!r}")
    return float(value)


def parse_int(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{path}: expected an integer, got {value!r}")
    return value


def parse_angle(value, path: str) -> float:
    """Angles accept bare radians or a 'deg' / 'rad' suffix."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if isinstance(value, str):
        match = _QUANTITY_RE.match(value)
        if match:
            number, unit = match.groups()
            if unit == "rad":
                return float(number)
            if unit == "deg":
                return float(number) * np.pi / 180.0
    raise ConfigError(f"{path}: expected radians (bare number) or 'deg'/'rad' suffix")


def _require_mapping(value, path: str) -> dict:
    if not isinstance(value, dict):
        raise ConfigError(f"{path}: expected a mapping")
    return value


def _check_keys(section: dict, allowed, required, path: str):
    for key in section:
        if key not in allowed:
            raise ConfigError(f"{path}.{key}: unknown key")
    for key in required:
        if key not in section:
            raise ConfigError(f"{path}.{key}: missing required key")


def parse_trap(section, path: str = "trap") -> TrapConfig:
    section = _require_mapping(section, path)
    _check_keys(
        section,
        allowed={
            "ion_count",
            "axial_com_frequency",
            "ion_mass",
            "raman_wavevector",
            "quartic_coefficient",
        },
        required={"ion_count", "axial_com_frequency", "ion_mass", "raman_wavevector"},
        path=path,
    )
    try:
        return TrapConfig(
            ion_count=parse_int(section["ion_count"], f"{path}.ion_count"),
            axial_com_frequency=parse_quantity(
                section["axial_com_frequency"], "frequency", f"{path}.axial_com_frequency"
            ),
            ion_mass=parse_quantity(section["ion_mass"], "mass", f"{path}.ion_mass"),
            raman_wavevector=parse_quantity(
                section["raman_wavevector"], "wavevector", f"{path}.raman_wavevector"
            ),
            quartic_coefficient=(
                parse_number(
                    section["quartic_coefficient"], f"{path}.quartic_coefficient"
                )
                if "quartic_coefficient" in section
                else 0.0
            ),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"{path}: {exc}") from exc


def parse_target(section, path: str = "target") -> TargetGraph:
    section = _require_mapping(section, path)
    if "file" in section:
        _check_keys(section, allowed={"file"}, required={"file"}, path=path)
        file_path = Path(section["file"])
        if not file_path.exists():
            raise ConfigError(f"{path}.file: no such file {file_path}")
        return custom_target(file_path)
    _check_keys(
        section,
        allowed={"name", "n_qubits", "s", "rows", "cols"},
        required={"name"},
        path=path,
    )
    name = section["name"]
    if name not in BUILTIN_TARGETS:
        raise ConfigError(
            f"{path}.name: unknown target {name!r} "
            f"(builtin: {', '.join(sorted(BUILTIN_TARGETS))})"
        )
    try:
        if name == "cross_polytope":
            return BUILTIN_TARGETS[name](parse_int(section["n_qubits"], f"{path}.n_qubits"))
        if name == "leaves_only_tree":
            return BUILTIN_TARGETS[name](
                parse_int(section["n_qubits"], f"{path}.n_qubits"),
                parse_number(section["s"], f"{path}.s"),
            )
        if name == "triangular_torus":
            rows = parse_int(section.get("rows", 3), f"{path}.rows")
            cols = parse_int(section.get("cols", 3), f"{path}.cols")
            return BUILTIN_TARGETS[name](rows, cols)
        return BUILTIN_TARGETS[name]()
    except KeyError as exc:
        raise ConfigError(f"{path}.{exc.args[0]}: missing required key") from exc
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


@dataclass(frozen=True)
class DesignDirective:
    """Parameters of a 'design the schedule for me' request."""

    allowed_modes: tuple[int, ...] | None
    detuning_min: float
    detuning_max: float
    detuning_step: float
    k_max: int
    rabi: float
    phase: float
    max_layers: int | None

    def grid(self) -> np.ndarray:
        return np.arange(self.detuning_min, self.detuning_max + 1e-9, self.detuning_step)


def parse_schedule(section, path: str = "schedule"):
    """Inline Schedule or DesignDirective, depending on the keys present."""
    section = _require_mapping(section, path)
    if "design" in section:
        _check_keys(section, allowed={"design"}, required={"design"}, path=path)
        d = _require_mapping(section["design"], f"{path}.design")
        _check_keys(
            d,
            allowed={
                "allowed_modes",
                "detuning_min",
                "detuning_max",
                "detuning_step",
                "k_max",
                "rabi",
                "phase",
                "max_layers",
            },
            required=set(),
            path=f"{path}.design",
        )
        modes = None
        if "allowed_modes" in d:
            raw = d["allowed_modes"]
            if not isinstance(raw, list) or not raw:
                raise ConfigError(f"{path}.design.allowed_modes: expected a nonempty list")
            modes = tuple(
                parse_int(m, f"{path}.design.allowed_modes[{i}]") for i, m in enumerate(raw)
            )
        return DesignDirective(
            allowed_modes=modes,
            detuning_min=parse_quantity(
                d.get("detuning_min", "50 kHz"), "frequency", f"{path}.design.detuning_min"
            ),
            detuning_max=parse_quantity(
                d.get("detuning_max", "150 kHz"), "frequency", f"{path}.design.detuning_max"
            ),
            detuning_step=parse_quantity(
                d.get("detuning_step", "0.1 kHz"), "frequency", f"{path}.design.detuning_step"
            ),
            k_max=parse_int(d.get("k_max", 6), f"{path}.design.k_max"),
            rabi=parse_quantity(d.get("rabi", "41 kHz"), "frequency", f"{path}.design.rabi"),
            phase=parse_angle(d.get("phase", 0.0), f"{path}.design.phase"),
            max_layers=(
                parse_int(d["max_layers"], f"{path}.design.max_layers")
                if "max_layers" in d
                else None
            ),
        )
    _check_keys(section, allowed={"layers", "repetitions"}, required={"layers"}, path=path)
    raw_layers = section["layers"]
    if not isinstance(raw_layers, list) or not raw_layers:
        raise ConfigError(f"{path}.layers: expected a nonempty list")
    layers = []
    for i, raw in enumerate(raw_layers):
        lp = f"{path}.layers[{i}]"
        raw = _require_mapping(raw, lp)
        _check_keys(
            raw,
            allowed={"mode", "detuning", "duration", "phase", "rabi"},
            required={"mode", "detuning", "duration"},
            path=lp,
        )
        try:
            layers.append(
                LaserLayer(
                    mode_index=parse_int(raw["mode"], f"{lp}.mode"),
                    detuning=parse_quantity(raw["detuning"], "frequency", f"{lp}.detuning"),
                    duration=parse_quantity(raw["duration"], "time", f"{lp}.duration"),
                    phase=parse_angle(raw.get("phase", 0.0), f"{lp}.phase"),
                    rabi=parse_quantity(
                        raw.get("rabi", "41 kHz"), "frequency", f"{lp}.rabi"
                    ),
                )
            )
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"{lp}: {exc}") from exc
    repetitions = parse_int(section.get("repetitions", 1), f"{path}.repetitions")
    try:
        return Schedule(layers=tuple(layers), repetitions=repetitions)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def parse_offsets(section, path: str = "offsets") -> OffsetModel:
    section = _require_mapping(section, path)
    _check_keys(
        section,
        allowed={"qubit_gradient", "beam_width_axial", "beam_center_offset", "base_rabi"},
        required=set(),
        path=path,
    )
    try:
        return OffsetModel(
            qubit_gradient=(
                parse_quantity(section["qubit_gradient"], "gradient", f"{path}.qubit_gradient")
                if "qubit_gradient" in section
                else 0.0
            ),
            beam_width_axial=(
                parse_quantity(
                    section["beam_width_axial"], "length", f"{path}.beam_width_axial"
                )
                if "beam_width_axial" in section
                else 270e-6
            ),
            beam_center_offset=(
                parse_quantity(
                    section["beam_center_offset"], "length", f"{path}.beam_center_offset"
                )
                if "beam_center_offset" in section
                else 0.0
            ),
            base_rabi=(
                parse_quantity(section["base_rabi"], "frequency", f"{path}.base_rabi")
                if "base_rabi" in section
                else 41e3
            ),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"{path}: {exc}") from exc


def parse_time_grid(section, path: str) -> np.ndarray:
    section = _require_mapping(section, path)
    _check_keys(section, allowed={"start", "stop", "points"}, required={"stop", "points"}, path=path)
    start = (
        parse_quantity(section["start"], "time", f"{path}.start")
        if "start" in section
        else 0.0
    )
    stop = parse_quantity(section["stop"], "time", f"{path}.stop")
    points = parse_int(section["points"], f"{path}.points")
    if points < 2:
        raise ConfigError(f"{path}.points: need at least 2 points")
    return np.linspace(start, stop, points)


@dataclass(frozen=True)
class DynamicsSpec:
    sequence: str
    repetitions: int
    t1: float | None
    t3: float | None
    compare_three_ways: bool


def parse_dynamics(section, path: str = "dynamics") -> DynamicsSpec:
    section = _require_mapping(section, path)
    _check_keys(
        section,
        allowed={"sequence", "repetitions", "t1", "t3", "compare_three_ways"},
        required={"sequence"},
        path=path,
    )
    sequence = section["sequence"]
    if sequence not in ("ising", "floquet_xy", "floquet_xyz", "static"):
        raise ConfigError(
            f"{path}.sequence: expected ising | floquet_xy | floquet_xyz | static, "
            f"got {sequence!r}"
        )
    return DynamicsSpec(
        sequence=sequence,
        repetitions=parse_int(section.get("repetitions", 1), f"{path}.repetitions"),
        t1=(
            parse_quantity(section["t1"], "time", f"{path}.t1") if "t1" in section else None
        ),
        t3=(
            parse_quantity(section["t3"], "time", f"{path}.t3") if "t3" in section else None
        ),
        compare_three_ways=bool(section.get("compare_three_ways", False)),
    )


@dataclass(frozen=True)
class BsbSpec:
    mode_index: int
    carrier_rabi: float
    mean_n: float
    times: np.ndarray


def parse_bsb(section, path: str = "bsb") -> BsbSpec:
    section = _require_mapping(section, path)
    _check_keys(
        section,
        allowed={"mode", "carrier_rabi", "mean_n", "times"},
        required={"mode", "carrier_rabi", "times"},
        path=path,
    )
    mean_n = (
        parse_number(section["mean_n"], f"{path}.mean_n") if "mean_n" in section else 0.0
    )
    if mean_n < 0:
        raise ConfigError(f"{path}.mean_n: must be >= 0")
    return BsbSpec(
        mode_index=parse_int(section["mode"], f"{path}.mode"),
        carrier_rabi=parse_quantity(
            section["carrier_rabi"], "frequency", f"{path}.carrier_rabi"
        ),
        mean_n=mean_n,
        times=parse_time_grid(section["times"], f"{path}.times"),
    )


@dataclass(frozen=True)
class SweepSpec:
    axis: str
    values: np.ndarray


def parse_sweep(section, path: str = "sweep") -> SweepSpec:
    section = _require_mapping(section, path)
    _check_keys(section, allowed={"axis", "values"}, required={"axis", "values"}, path=path)
    axis = section["axis"]
    kinds = {"omega_z": "frequency", "detuning": "frequency", "alpha": None, "s": None}
    if axis not in kinds:
        raise ConfigError(
            f"{path}.axis: expected omega_z | detuning | alpha | s, got {axis!r}"
        )
    raw = section["values"]
    if not isinstance(raw, list) or not raw:
        raise ConfigError(f"{path}.values: expected a nonempty list")
    kind = kinds[axis]
    values = []
    for i, v in enumerate(raw):
        vp = f"{path}.values[{i}]"
        values.append(
            parse_quantity(v, kind, vp) if kind else parse_number(v, vp)
        )
    return SweepSpec(axis=axis, values=np.array(values))


@dataclass(frozen=True)
class RunConfig:
    """Everything a CLI run can need; sections absent from the file are None."""

    trap: TrapConfig | None
    target: TargetGraph | None
    schedule: Schedule | DesignDirective | None
    offsets: OffsetModel | None
    dynamics: DynamicsSpec | None
    bsb: BsbSpec | None
    sweep: SweepSpec | None
    output_directory: str | None
    output_formats: tuple[str, ...]
    raw: dict


TOP_LEVEL_KEYS = {
    "trap",
    "target",
    "schedule",
    "offsets",
    "dynamics",
    "bsb",
    "sweep",
    "output",
}


def load_config(path) -> RunConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: YAML parse error: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    for key in raw:
        if key not in TOP_LEVEL_KEYS:
            raise ConfigError(f"{key}: unknown top-level key")

    out_dir = None
    formats = ("csv", "json")
    if "output" in raw:
        out = _require_mapping(raw["output"], "output")
        _check_keys(out, allowed={"directory", "formats"}, required=set(), path="output")
        out_dir = out.get("directory")
        if "formats" in out:
            fmts = out["formats"]
            if not isinstance(fmts, list) or not fmts:
                raise ConfigError("output.formats: expected a nonempty list")
            for f in fmts:
                if f not in ("csv", "json"):
                    raise ConfigError(f"output.formats: unknown format {f!r}")
            formats = tuple(fmts)

    return RunConfig(
        trap=parse_trap(raw["trap"]) if "trap" in raw else None,
        target=parse_target(raw["target"]) if "target" in raw else None,
        schedule=parse_schedule(raw["schedule"]) if "schedule" in raw else None,
        offsets=parse_offsets(raw["offsets"]) if "offsets" in raw else None,
        dynamics=parse_dynamics(raw["dynamics"]) if "dynamics" in raw else None,
        bsb=parse_bsb(raw["bsb"]) if "bsb" in raw else None,
        sweep=parse_sweep(raw["sweep"]) if "sweep" in raw else None,
        output_directory=out_dir,
        output_formats=formats,
        raw=raw,
    )
