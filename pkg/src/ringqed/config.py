"""Typed run configuration on top of the block-structured text format.

A run file groups settings into sections; every key carries its unit in
the name.  Sections are optional so one file can drive any subset of
the command-line tools; each loader method raises a clear error when
the section it needs is missing.

    [ring]
    total_length_um = 200.0
    gaas_length_um = 60.0
    taper_length_um = 10.5
    group_index = 2.2625
    design_wavelength_nm = 910.0
    n_tapers = 2            # optional

    [loss]
    alpha_gaas_db_per_cm = 75.0
    alpha_ln_db_per_cm = 0.5
    taper_efficiency = 0.982

    [coupling]
    self_coupling = 0.9597
    round_trip_amplitude = 0.9597

    [emitter]
    qd_wavelength_nm = 912.3
    cavity_wavelength_nm = 908.75
    cavity_linewidth_nm = 0.0478
    purcell_peak = 3.52
    free_rate_per_ns = 0.42

    [strain_tuning]
    base_wavelength_nm = 912.3
    rate_pm_per_v = 0.57
    clamping_factor = 1.0   # optional
    voltage_min_v = -500.0  # optional
    voltage_max_v = 500.0   # optional
    electrode_gap_um = 5.0  # optional

    [run]
    seed = 1234             # optional

Device fleets for the planner live in their own files, one
[device.NAME] section per device.
"""

from __future__ import annotations

from dataclasses import dataclass

from .cqed import EmitterCavityState
from .errors import ParseError
from .planner import DeviceTuningSpec
from .resonator import CouplingState, LossBudget, RingGeometry
from .strain import TuningCalibration
from .textio import parse_blocks_file

__all__ = ["RunConfig", "load_config", "load_fleet"]


@dataclass(frozen=True)
class RunConfig:
    """Parsed run file; section payloads stay as Section objects."""

    path: str
    sections: dict

    def _section(self, name):
        if name not in self.sections:
            raise ParseError(f"missing [{name}] section", path=self.path)
        return self.sections[name]

    def has(self, name):
        return name in self.sections

    def ring_geometry(self):
        sec = self._section("ring")
        return RingGeometry(
            total_length_m=sec.get_float("total_length_um") * 1e-6,
            gaas_length_m=sec.get_float("gaas_length_um") * 1e-6,
            taper_length_m=sec.get_float("taper_length_um") * 1e-6,
            group_index=sec.get_float("group_index"),
            design_wavelength_m=sec.get_float("design_wavelength_nm") * 1e-9,
            n_tapers=sec.get_int("n_tapers", 2),
        )

    def loss_budget(self):
        sec = self._section("loss")
        return LossBudget.from_taper_efficiency(
            geometry=self.ring_geometry(),
            efficiency=sec.get_float("taper_efficiency"),
            alpha_gaas_db_per_cm=sec.get_float("alpha_gaas_db_per_cm"),
            alpha_ln_db_per_cm=sec.get_float("alpha_ln_db_per_cm"),
        )

    def coupling_state(self):
        sec = self._section("coupling")
        return CouplingState(
            self_coupling=sec.get_float("self_coupling"),
            round_trip_amplitude=sec.get_float("round_trip_amplitude"),
        )

    def emitter_state(self):
        sec = self._section("emitter")
        return EmitterCavityState(
            qd_wavelength_nm=sec.get_float("qd_wavelength_nm"),
            cavity_wavelength_nm=sec.get_float("cavity_wavelength_nm"),
            cavity_linewidth_nm=sec.get_float("cavity_linewidth_nm"),
            purcell_peak=sec.get_float("purcell_peak"),
            free_rate_per_ns=sec.get_float("free_rate_per_ns"),
        )

    def tuning_calibration(self):
        sec = self._section("strain_tuning")
        return TuningCalibration(
            base_wavelength_m=sec.get_float("base_wavelength_nm") * 1e-9,
            rate_pm_per_v=sec.get_float("rate_pm_per_v"),
            clamping_factor=sec.get_float("clamping_factor", 1.0),
            voltage_min_v=sec.get_float("voltage_min_v", -500.0),
            voltage_max_v=sec.get_float("voltage_max_v", 500.0),
            electrode_gap_m=sec.get_float("electrode_gap_um", 5.0) * 1e-6,
        )

    def seed(self, default=None):
        if not self.has("run"):
            return default
        return self.sections["run"].get_int("seed", default)


def load_config(path):
    """Parse a run file into a RunConfig."""
    sections = parse_blocks_file(path)
    return RunConfig(path=str(path), sections=sections)


def load_fleet(path):
    """Parse a fleet file into a list of DeviceTuningSpec.

    Every section must be named device.<NAME>; limits default to
    +/- 500 V like the strain calibration.
    """
    sections = parse_blocks_file(path)
    if not sections:
        raise ParseError("fleet file has no [device.*] sections",
                         path=str(path))
    devices = []
    for name, sec in sections.items():
        if not name.startswith("device.") or len(name) <= len("device."):
            raise ParseError(
                f"unexpected section [{name}]; fleet files hold only "
                f"[device.<NAME>] sections", path=str(path), line=sec.line)
        devices.append(DeviceTuningSpec(
            name=name[len("device."):],
            qd_wavelength_nm=sec.get_float("qd_wavelength_nm"),
            cavity_wavelength_nm=sec.get_float("cavity_wavelength_nm"),
            strain_rate_pm_per_v=sec.get_float("strain_rate_pm_per_v"),
            eo_rate_pm_per_v=sec.get_float("eo_rate_pm_per_v"),
            strain_limits_v=(sec.get_float("strain_min_v", -500.0),
                             sec.get_float("strain_max_v", 500.0)),
            eo_limits_v=(sec.get_float("eo_min_v", -500.0),
                         sec.get_float("eo_max_v", 500.0)),
        ))
    return devices
