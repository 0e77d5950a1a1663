import numpy as np
import pytest

from iongeom.config import (
    ConfigError,
    DesignDirective,
    load_config,
    parse_angle,
    parse_quantity,
    parse_schedule,
    parse_sweep,
    parse_target,
    parse_trap,
)
from iongeom.coupling import Schedule


class TestQuantities:
    @pytest.mark.parametrize(
        "text,kind,expected",
        [
            ("107.6 kHz", "frequency", 107.6e3),
            ("0.62 MHz", "frequency", 0.62e6),
            ("9.29 us", "time", 9.29e-6),
            ("270 um", "length", 270e-6),
            ("9.012182 amu", "mass", 9.012182 * 1.66053906660e-27),
            ("2.84e7 rad/m", "wavevector", 2.84e7),
            ("0.167 kHz/um", "gradient", 0.167e9),
        ],
    )
    def test_parses_with_suffix(self, text, kind, expected):
        assert parse_quantity(text, kind, "k") == pytest.approx(expected)

    def test_bare_number_rejected(self):
        with pytest.raises(ConfigError, match="unit suffix"):
            parse_quantity(107.6, "frequency", "trap.axial_com_frequency")

    def test_wrong_unit_family_rejected(self):
        with pytest.raises(ConfigError, match="unknown frequency unit"):
            parse_quantity("10 us", "frequency", "k")

    def test_garbage_rejected(self):
        with pytest.raises(ConfigError):
            parse_quantity("fast", "frequency", "k")

    def test_angle_accepts_radians_and_degrees(self):
        assert parse_angle(1.25, "k") == 1.25
        assert parse_angle("90 deg", "k") == pytest.approx(np.pi / 2)
        assert parse_angle("0.5 rad", "k") == 0.5
        with pytest.raises(ConfigError):
            parse_angle("10 kHz", "k")


class TestTrapSection:
    def test_valid(self):
        trap = parse_trap(
            {
                "ion_count": 4,
                "axial_com_frequency": "0.62 MHz",
                "ion_mass": "9.012182 amu",
                "raman_wavevector": "2.84e7 rad/m",
                "quartic_coefficient": 1.5,
            }
        )
        assert trap.ion_count == 4
        assert trap.axial_com_frequency == pytest.approx(0.62e6)
        assert trap.quartic_coefficient == 1.5

    def test_missing_key_named(self):
        with pytest.raises(ConfigError, match="trap.ion_mass"):
            parse_trap(
                {
                    "ion_count": 4,
                    "axial_com_frequency": "0.62 MHz",
                    "raman_wavevector": "2.84e7 rad/m",
                }
            )

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError, match="trap.massd"):
            parse_trap(
                {
                    "ion_count": 4,
                    "axial_com_frequency": "0.62 MHz",
                    "ion_mass": "9.012182 amu",
                    "raman_wavevector": "2.84e7 rad/m",
                    "massd": "1 amu",
                }
            )

    def test_mixed_units_without_suffix_rejected(self):
        with pytest.raises(ConfigError, match="unit suffix"):
            parse_trap(
                {
                    "ion_count": 4,
                    "axial_com_frequency": 620000,
                    "ion_mass": "9.012182 amu",
                    "raman_wavevector": "2.84e7 rad/m",
                }
            )


class TestTargetSection:
    def test_builtin_with_params(self):
        t = parse_target({"name": "cross_polytope", "n_qubits": 6})
        assert t.n_ions == 6

    def test_leaves_tree_needs_s(self):
        with pytest.raises(ConfigError, match="target.s"):
            parse_target({"name": "leaves_only_tree", "n_qubits": 6})

    def test_unknown_name(self):
        with pytest.raises(ConfigError, match="unknown target"):
            parse_target({"name": "dodecahedron"})

    def test_file_target(self, tmp_path):
        f = tmp_path / "edges.txt"
        f.write_text("1 2 1.0\n2 3 0.5\n")
        t = parse_target({"file": str(f)})
        assert t.n_ions == 3

    def test_missing_file(self):
        with pytest.raises(ConfigError, match="no such file"):
            parse_target({"file": "/nonexistent/x.csv"})


class TestScheduleSection:
    def test_inline_layers(self):
        sched = parse_schedule(
            {
                "layers": [
                    {"mode": 1, "detuning": "107.6 kHz", "duration": "9.29 us"},
                    {
                        "mode": 3,
                        "detuning": "-71.14 kHz",
                        "duration": "14.06 us",
                        "phase": 0.0,
                        "rabi": "41 kHz",
                    },
                ],
                "repetitions": 12,
            }
        )
        assert isinstance(sched, Schedule)
        assert sched.repetitions == 12
        assert sched.layers[1].detuning == pytest.approx(-71.14e3)

    def test_design_directive_defaults(self):
        d = parse_schedule({"design": {"allowed_modes": [1, 3]}})
        assert isinstance(d, DesignDirective)
        assert d.allowed_modes == (1, 3)
        grid = d.grid()
        assert grid[0] == pytest.approx(50e3)
        assert grid[-1] == pytest.approx(150e3)
        assert grid[1] - grid[0] == pytest.approx(100.0)

    def test_layer_unknown_key(self):
        with pytest.raises(ConfigError, match=r"layers\[0\].det"):
            parse_schedule(
                {"layers": [{"mode": 1, "det": "1 kHz", "duration": "1 us"}]}
            )

    def test_bad_duration_value(self):
        with pytest.raises(ConfigError):
            parse_schedule(
                {"layers": [{"mode": 1, "detuning": "1 kHz", "duration": "0 us"}]}
            )


class TestSweepSection:
    def test_frequency_axis_values(self):
        s = parse_sweep({"axis": "omega_z", "values": ["0.3 MHz", "0.5 MHz"]})
        assert s.values == pytest.approx([0.3e6, 0.5e6])

    def test_dimensionless_axis_values(self):
        s = parse_sweep({"axis": "s", "values": [-2.0, 0.0, 2.0]})
        assert s.values == pytest.approx([-2.0, 0.0, 2.0])

    def test_bad_axis(self):
        with pytest.raises(ConfigError, match="axis"):
            parse_sweep({"axis": "temperature", "values": [1]})

    def test_units_required_on_frequency_axis(self):
        with pytest.raises(ConfigError, match="unit suffix"):
            parse_sweep({"axis": "omega_z", "values": [300000]})


class TestLoadConfig:
    def test_full_round_trip(self, tmp_path):
        cfg_file = tmp_path / "run.yaml"
        cfg_file.write_text(
            "trap:\n"
            "  ion_count: 4\n"
            "  axial_com_frequency: 0.62 MHz\n"
            "  ion_mass: 9.012182 amu\n"
            "  raman_wavevector: 2.84e7 rad/m\n"
            "target:\n"
            "  name: cross_polytope\n"
            "  n_qubits: 4\n"
            "schedule:\n"
            "  design:\n"
            "    allowed_modes: [1, 3]\n"
            "offsets:\n"
            "  qubit_gradient: 0.167 kHz/um\n"
            "  beam_width_axial: 270 um\n"
            "output:\n"
            "  formats: [json]\n"
        )
        cfg = load_config(cfg_file)
        assert cfg.trap.ion_count == 4
        assert cfg.target.n_ions == 4
        assert isinstance(cfg.schedule, DesignDirective)
        assert cfg.offsets.qubit_gradient == pytest.approx(0.167e9)
        assert cfg.output_formats == ("json",)

    def test_unknown_top_level_key(self, tmp_path):
        cfg_file = tmp_path / "bad.yaml"
        cfg_file.write_text("trapp:\n  ion_count: 2\n")
        with pytest.raises(ConfigError, match="trapp"):
            load_config(cfg_file)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="not found"):
            load_config(tmp_path / "nope.yaml")
